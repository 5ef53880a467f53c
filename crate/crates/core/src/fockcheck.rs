//! Truncated Fock-space oracle for pure noiseless states.
//!
//! Amplitudes follow the Gaussian phase conventions: the two-mode squeezed
//! vacuum has `<a1 a2> = i√(B(B+1))` and the single-mode squeezed vacuum has
//! `<a1²> = i√(B(B+1))`. The beam splitter is the unitary
//! `exp(θ(e^{iφ} a1† a2 - e^{-iφ} a2† a1))`, `cos θ = √T`, which maps
//! `a1† -> √T a1† - √R e^{-iφ} a2†`, the same transformation as the
//! covariance-level beam splitter.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{make_moments, NormalMoments};

pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Largest cutoff chosen automatically.
pub const MAX_AUTO_CUTOFF: usize = 60;

/// Two-mode pure state on `0 <= n1, n2 <= cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    cutoff: usize,
    /// row-major in `(n1, n2)`
    amps: Vec<Complex64>,
}

impl FockState {
    pub fn zeros(cutoff: usize) -> Self {
        Self {
            cutoff,
            amps: vec![Complex64::new(0.0, 0.0); (cutoff + 1) * (cutoff + 1)],
        }
    }

    /// The number state `|n1, n2>`.
    pub fn basis(n1: usize, n2: usize, cutoff: usize) -> Result<Self> {
        if n1 > cutoff || n2 > cutoff {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                reason: format!("|{n1},{n2}> does not fit below cutoff {cutoff}"),
            });
        }
        let mut s = Self::zeros(cutoff);
        s.set(n1, n2, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    /// Tensor product of single-mode amplitude vectors of equal length.
    pub fn product(mode1: &[Complex64], mode2: &[Complex64]) -> Result<Self> {
        if mode1.len() != mode2.len() || mode1.is_empty() {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                reason: "single-mode factors must have the same nonzero length".into(),
            });
        }
        let cutoff = mode1.len() - 1;
        let mut s = Self::zeros(cutoff);
        for (n1, a) in mode1.iter().enumerate() {
            for (n2, b) in mode2.iter().enumerate() {
                s.set(n1, n2, a * b);
            }
        }
        Ok(s)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn get(&self, n1: usize, n2: usize) -> Complex64 {
        if n1 > self.cutoff || n2 > self.cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            self.amps[n1 * (self.cutoff + 1) + n2]
        }
    }

    fn set(&mut self, n1: usize, n2: usize, v: Complex64) {
        let d = self.cutoff + 1;
        self.amps[n1 * d + n2] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Population with either photon number in the top tenth of the range.
    pub fn top_population(&self) -> f64 {
        let edge = self.cutoff - self.cutoff / 10;
        let mut p = 0.0;
        for n1 in 0..=self.cutoff {
            for n2 in 0..=self.cutoff {
                if n1 >= edge.max(1) || n2 >= edge.max(1) {
                    p += self.get(n1, n2).norm_sqr();
                }
            }
        }
        p
    }

    /// Missing norm plus population near the cutoff.
    pub fn tail(&self) -> f64 {
        (1.0 - self.norm_sqr()).max(0.0) + self.top_population()
    }

    pub fn check_tail(&self, tail_tol: f64) -> Result<()> {
        let tail = self.tail();
        if tail > tail_tol {
            Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                tail,
                tail_tol,
            })
        } else {
            Ok(())
        }
    }

    /// `<n1 + n2>`.
    pub fn total_photons(&self) -> f64 {
        let mut n = 0.0;
        for n1 in 0..=self.cutoff {
            for n2 in 0..=self.cutoff {
                n += (n1 + n2) as f64 * self.get(n1, n2).norm_sqr();
            }
        }
        n
    }

    fn amplitude_matrix(&self) -> DMatrix<Complex64> {
        let d = self.cutoff + 1;
        DMatrix::from_fn(d, d, |i, j| self.get(i, j))
    }
}

fn squeeze_param(b: f64) -> Result<f64> {
    if !b.is_finite() {
        return Err(Error::NonFinite("b"));
    }
    if b < 0.0 {
        return Err(Error::NegativeOccupation { name: "b", value: b });
    }
    Ok(b.sqrt().asinh())
}

/// Single-mode squeezed vacuum amplitudes `0..=cutoff` with `<a²> = i√(B(B+1))`.
pub fn smsv_amplitudes(bp_sq: f64, cutoff: usize) -> Result<Vec<Complex64>> {
    let r = squeeze_param(bp_sq)?;
    let mu = Complex64::new(0.0, r.tanh());
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    // c_{2n} = μ^n √((2n)!) / (2^n n!) / √cosh r, built by recurrence
    let mut c = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut n = 0;
    while 2 * n <= cutoff {
        amps[2 * n] = c;
        let k = (n + 1) as f64;
        c *= mu * ((2.0 * k - 1.0) * 2.0 * k).sqrt() / (2.0 * k);
        n += 1;
    }
    Ok(amps)
}

/// Two-mode squeezed vacuum with `B_p` pairs, `<a1 a2> = i√(B_p(B_p+1))`.
pub fn tmsv_fock(bp: f64, cutoff: usize, tail_tol: f64) -> Result<FockState> {
    let r = squeeze_param(bp)?;
    let lambda = Complex64::new(0.0, r.tanh());
    let mut s = FockState::zeros(cutoff);
    let mut c = Complex64::new(1.0 / r.cosh(), 0.0);
    for n in 0..=cutoff {
        s.set(n, n, c);
        c *= lambda;
    }
    s.check_tail(tail_tol)?;
    Ok(s)
}

/// Single-mode squeezed vacuum in mode 1, vacuum in mode 2.
pub fn smsv_fock(bp_sq: f64, cutoff: usize, tail_tol: f64) -> Result<FockState> {
    let mut vac = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    vac[0] = Complex64::new(1.0, 0.0);
    let s = FockState::product(&smsv_amplitudes(bp_sq, cutoff)?, &vac)?;
    s.check_tail(tail_tol)?;
    Ok(s)
}

/// Smallest even cutoff (capped at [`MAX_AUTO_CUTOFF`]) that keeps the tail of
/// `make(cutoff)` below `tail_tol`.
pub fn auto_cutoff<F>(make: F, tail_tol: f64) -> Result<FockState>
where
    F: Fn(usize) -> Result<FockState>,
{
    let mut last_err = None;
    for cutoff in (2..=MAX_AUTO_CUTOFF).step_by(2) {
        let state = make(cutoff)?;
        match state.check_tail(tail_tol) {
            Ok(()) => return Ok(state),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one cutoff tried"))
}

/// Beam splitter as a Fock-space unitary. Each total-photon block is
/// transformed exactly, so the output cutoff is `2 * cutoff`.
pub fn bs_fock(state: &FockState, t: f64, phi: f64) -> Result<FockState> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TransmissivityOutOfRange(t));
    }
    let theta = t.sqrt().acos();
    let cin = state.cutoff;
    let mut out = FockState::zeros(2 * cin);
    let e = Complex64::from_polar(1.0, phi);
    for total in 0..=2 * cin {
        // |k, total - k>, k = 0..=total
        let dim = total + 1;
        let input: Vec<Complex64> = (0..dim).map(|k| state.get(k, total - k)).collect();
        if input.iter().all(|a| a.norm_sqr() == 0.0) {
            continue;
        }
        // H = -i θ (e^{iφ} a1† a2 - e^{-iφ} a2† a1) is Hermitian
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        for k in 0..total {
            let amp = (((k + 1) * (total - k)) as f64).sqrt();
            // a1† a2 |k, N-k> = amp |k+1, N-k-1>
            h[(k + 1, k)] = Complex64::new(0.0, -theta) * e * amp;
            h[(k, k + 1)] = h[(k + 1, k)].conj();
        }
        let eig = SymmetricEigen::new(h);
        let q = &eig.eigenvectors;
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l)));
        let v = q * phases * q.adjoint();
        let x = nalgebra::DVector::from_vec(input);
        let y = v * x;
        for k in 0..dim {
            out.set(k, total - k, y[k]);
        }
    }
    Ok(out)
}

/// Second moments `B_j, C_j, D_12, Dbar_12` by direct operator action.
pub fn fock_moments(state: &FockState) -> Result<NormalMoments> {
    let d = state.cutoff;
    let zero = Complex64::new(0.0, 0.0);
    let (mut b1, mut b2) = (0.0, 0.0);
    let (mut c1, mut c2, mut d12, mut cross) = (zero, zero, zero, zero);
    for n1 in 0..=d {
        for n2 in 0..=d {
            let a = state.get(n1, n2);
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (f1, f2) = (n1 as f64, n2 as f64);
            b1 += f1 * a.norm_sqr();
            b2 += f2 * a.norm_sqr();
            if n1 >= 2 {
                c1 += state.get(n1 - 2, n2).conj() * a * (f1 * (f1 - 1.0)).sqrt();
            }
            if n2 >= 2 {
                c2 += state.get(n1, n2 - 2).conj() * a * (f2 * (f2 - 1.0)).sqrt();
            }
            if n1 >= 1 && n2 >= 1 {
                d12 += state.get(n1 - 1, n2 - 1).conj() * a * (f1 * f2).sqrt();
            }
            if n2 >= 1 {
                // <a1† a2>
                cross += state.get(n1 + 1, n2 - 1).conj() * a * ((f1 + 1.0) * f2).sqrt();
            }
        }
    }
    make_moments(b1, b2, c1, c2, d12, -cross)
}

/// Smallest quadrature variance of mode `mode`, from the 2×2 covariance of
/// `x = (a + a†)/√2`, `p = (a - a†)/(i√2)` evaluated on the state.
pub fn principal_squeeze_variance_fock(state: &FockState, mode: usize) -> Result<f64> {
    let m = fock_moments(state)?;
    let (b, c) = (m.b(mode)?, m.c(mode)?);
    // <x²> = B + Re C + 1/2, <p²> = B - Re C + 1/2, <{x,p}>/2 = Im C
    let cov = Matrix2::new(b + c.re + 0.5, c.im, c.im, b - c.re + 0.5);
    Ok(SymmetricEigen::new(cov).eigenvalues.min())
}

/// Logarithmic negativity of a pure state from its Schmidt coefficients:
/// the partial transpose has trace norm `(Σ s_i)² / Σ s_i²`.
pub fn log_negativity_fock(state: &FockState, tail_tol: f64) -> Result<f64> {
    state.check_tail(tail_tol)?;
    let s = state.amplitude_matrix().svd(false, false).singular_values;
    let sum: f64 = s.iter().sum();
    let sq: f64 = s.iter().map(|x| x * x).sum();
    Ok((2.0 * sum.ln() - sq.ln()).max(0.0))
}
