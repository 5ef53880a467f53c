//! Zero-mean two-mode Gaussian states stored as their six normally ordered
//! second moments, with the two covariance-matrix views derived from them.
//!
//! Moments (all fluctuation moments, first moments are zero):
//!
//! ```text
//! B_j  = <a_j^† a_j>        C_j    = <a_j^2>
//! D_12 = <a_1 a_2>          Dbar_12 = -<a_1^† a_2>
//! ```
//!
//! The normally ordered covariance matrix `A_N` lives in the basis
//! `(β1, β1*, β2, β2*)` and generates the normal characteristic function
//! `C_N(β) = exp(β^† A_N β / 2)`. The symmetric covariance matrix `A_S` lives
//! in the quadrature basis `(x1, p1, x2, p2)` with `a = (x + i p)/√2`, so the
//! vacuum has `A_S = I/2`.
//!
//! # Beam-splitter convention
//!
//! A beam splitter with transmissivity `T`, reflectivity `R = 1 - T` and
//! phase `φ` acts by congruence `A_out = U^† A_N U` with
//!
//! ```text
//!     | √T        0          -√R e^{iφ}   0          |
//! U = | 0         √T         0            -√R e^{-iφ} |
//!     | √R e^{-iφ} 0         √T           0          |
//!     | 0         √R e^{iφ}  0            √T         |
//! ```
//!
//! i.e. `C_N^out(β) = C_N^in(Uβ)`. In the Heisenberg picture this is
//! `a1 -> √T a1 + √R e^{iφ} a2`, `a2 -> -√R e^{-iφ} a1 + √T a2`. The moduli of
//! the output moments do not depend on this choice, the phases of `C_j`,
//! `D_12` and `Dbar_12` do.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which a negative radicand is clamped to zero.
pub const RADICAND_CLAMP: f64 = 1e-10;

/// Default tolerance on the uncertainty bound `d_- >= 1/2`.
pub const EPS_PHYS: f64 = 1e-9;

/// The six second-moment parameters of a zero-mean two-mode Gaussian state.
///
/// Physicality is not enforced on construction; partially transposed or
/// hypothetical moment sets are representable. Use [`is_physical`] to test
/// the uncertainty bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalMoments {
    b1: f64,
    b2: f64,
    c1: Complex64,
    c2: Complex64,
    d12: Complex64,
    dbar12: Complex64,
}

impl NormalMoments {
    pub fn new(b1: f64, b2: f64, c1: Complex64, c2: Complex64, d12: Complex64, dbar12: Complex64) -> Result<Self> {
        check_finite("b1", b1)?;
        check_finite("b2", b2)?;
        for (name, z) in [("c1", c1), ("c2", c2), ("d12", d12), ("dbar12", dbar12)] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        if b1 < 0.0 {
            return Err(Error::NegativeOccupation { name: "b1", value: b1 });
        }
        if b2 < 0.0 {
            return Err(Error::NegativeOccupation { name: "b2", value: b2 });
        }
        Ok(Self {
            b1,
            b2,
            c1,
            c2,
            d12,
            dbar12,
        })
    }

    pub fn vacuum() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            b1: 0.0,
            b2: 0.0,
            c1: zero,
            c2: zero,
            d12: zero,
            dbar12: zero,
        }
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }
    pub fn b2(&self) -> f64 {
        self.b2
    }
    pub fn c1(&self) -> Complex64 {
        self.c1
    }
    pub fn c2(&self) -> Complex64 {
        self.c2
    }
    pub fn d12(&self) -> Complex64 {
        self.d12
    }
    pub fn dbar12(&self) -> Complex64 {
        self.dbar12
    }

    /// `B_j` for mode 1 or 2.
    pub fn b(&self, mode: usize) -> Result<f64> {
        match mode {
            1 => Ok(self.b1),
            2 => Ok(self.b2),
            _ => Err(Error::BadModeIndex(mode)),
        }
    }

    /// `C_j` for mode 1 or 2.
    pub fn c(&self, mode: usize) -> Result<Complex64> {
        match mode {
            1 => Ok(self.c1),
            2 => Ok(self.c2),
            _ => Err(Error::BadModeIndex(mode)),
        }
    }

    /// Moments as `[b1, b2, c1, c2, d12, dbar12]` with the real occupations
    /// promoted to complex numbers.
    pub fn to_array(&self) -> [Complex64; 6] {
        [
            Complex64::new(self.b1, 0.0),
            Complex64::new(self.b2, 0.0),
            self.c1,
            self.c2,
            self.d12,
            self.dbar12,
        ]
    }

    /// Largest componentwise modulus difference between two moment sets.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reads the moments back from a normally ordered covariance matrix laid
    /// out as in [`to_cov_normal`]. Tiny negative occupations produced by
    /// rounding are clamped to zero.
    pub fn from_cov_normal(a: &Matrix4<Complex64>) -> Result<Self> {
        Self::new(
            clamp_occupation(-a[(0, 0)].re),
            clamp_occupation(-a[(2, 2)].re),
            a[(0, 1)],
            a[(2, 3)],
            a[(0, 3)],
            a[(2, 0)],
        )
    }

    /// Inverse of [`to_cov_symmetric`].
    pub fn from_cov_symmetric(s: &Matrix4<f64>) -> Result<Self> {
        let b1 = 0.5 * (s[(0, 0)] + s[(1, 1)]) - 0.5;
        let b2 = 0.5 * (s[(2, 2)] + s[(3, 3)]) - 0.5;
        let c1 = Complex64::new(0.5 * (s[(0, 0)] - s[(1, 1)]), s[(0, 1)]);
        let c2 = Complex64::new(0.5 * (s[(2, 2)] - s[(3, 3)]), s[(2, 3)]);
        let diff = Complex64::new(s[(0, 2)], s[(0, 3)]);
        let sum = Complex64::new(-s[(1, 3)], s[(1, 2)]);
        Self::new(
            clamp_occupation(b1),
            clamp_occupation(b2),
            c1,
            c2,
            0.5 * (sum + diff),
            0.5 * (sum - diff),
        )
    }
}

fn check_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

fn clamp_occupation(b: f64) -> f64 {
    if b < 0.0 && b > -1e-12 {
        0.0
    } else {
        b
    }
}

/// Validating constructor for [`NormalMoments`].
pub fn make_moments(
    b1: f64,
    b2: f64,
    c1: Complex64,
    c2: Complex64,
    d12: Complex64,
    dbar12: Complex64,
) -> Result<NormalMoments> {
    NormalMoments::new(b1, b2, c1, c2, d12, dbar12)
}

/// Normally ordered covariance matrix `A_N` (complex Hermitian, basis
/// `(β1, β1*, β2, β2*)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceNormal(Matrix4<Complex64>);

impl CovarianceNormal {
    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    /// Local block `B_j` (2×2).
    pub fn local_block(&self, mode: usize) -> Result<Matrix2<Complex64>> {
        let offset = mode_offset(mode)?;
        Ok(self.0.fixed_view::<2, 2>(offset, offset).into_owned())
    }

    /// Cross block `D_12` (rows of mode 1, columns of mode 2).
    pub fn cross_block(&self) -> Matrix2<Complex64> {
        self.0.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.0);
        let mut v = [
            eig.eigenvalues[0],
            eig.eigenvalues[1],
            eig.eigenvalues[2],
            eig.eigenvalues[3],
        ];
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Symmetrically ordered covariance matrix `A_S` (real symmetric, basis
/// `(x1, p1, x2, p2)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceSymmetric(Matrix4<f64>);

impl CovarianceSymmetric {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn local_block(&self, mode: usize) -> Result<Matrix2<f64>> {
        let offset = mode_offset(mode)?;
        Ok(self.0.fixed_view::<2, 2>(offset, offset).into_owned())
    }

    pub fn cross_block(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Covariance of the partially transposed state (`p2 -> -p2`).
    pub fn partial_transpose(&self) -> Matrix4<f64> {
        let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
        flip * self.0 * flip
    }
}

fn mode_offset(mode: usize) -> Result<usize> {
    match mode {
        1 => Ok(0),
        2 => Ok(2),
        _ => Err(Error::BadModeIndex(mode)),
    }
}

pub fn to_cov_normal(m: &NormalMoments) -> CovarianceNormal {
    let b1 = Complex64::new(-m.b1, 0.0);
    let b2 = Complex64::new(-m.b2, 0.0);
    let (c1, c2, d, db) = (m.c1, m.c2, m.d12, m.dbar12);
    CovarianceNormal(Matrix4::new(
        b1,
        c1,
        db.conj(),
        d,
        c1.conj(),
        b1,
        d.conj(),
        db,
        db,
        d,
        b2,
        c2,
        d.conj(),
        db.conj(),
        c2.conj(),
        b2,
    ))
}

/// Builds `A_S` from the moments.
///
/// The cross block is `D_S[i][j] = <r1_i r2_j>_sym`, which gives
///
/// ```text
/// D_S = | Re(D - Dbar)   Im(D - Dbar) |
///       | Im(D + Dbar)  -Re(D + Dbar) |
/// ```
///
/// consistent with `A_N` and the normal characteristic function.
pub fn to_cov_symmetric(m: &NormalMoments) -> CovarianceSymmetric {
    let diff = m.d12 - m.dbar12;
    let sum = m.d12 + m.dbar12;
    let (b1, b2, c1, c2) = (m.b1, m.b2, m.c1, m.c2);
    CovarianceSymmetric(Matrix4::new(
        b1 + c1.re + 0.5,
        c1.im,
        diff.re,
        diff.im,
        c1.im,
        b1 - c1.re + 0.5,
        sum.im,
        -sum.re,
        diff.re,
        sum.im,
        b2 + c2.re + 0.5,
        c2.im,
        diff.im,
        -sum.re,
        c2.im,
        b2 - c2.re + 0.5,
    ))
}

/// Local and global determinant invariants of both orderings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSet {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `det A_N`
    pub i_global: f64,
    /// `I1 + I2 + 2 I3`
    pub delta: f64,
    pub is1: f64,
    pub is2: f64,
    pub is3: f64,
    /// `det A_S`
    pub is_global: f64,
    /// `IS1 + IS2 + 2 IS3`
    pub delta_s: f64,
}

impl InvariantSet {
    /// `IS1 + IS2 - 2 IS3`, the seralian of the partially transposed `A_S`.
    pub fn delta_s_pt(&self) -> f64 {
        self.is1 + self.is2 - 2.0 * self.is3
    }
}

pub fn invariants(m: &NormalMoments) -> InvariantSet {
    let an = to_cov_normal(m);
    let as_ = to_cov_symmetric(m);
    let i1 = det2c(&an.0.fixed_view::<2, 2>(0, 0).into_owned());
    let i2 = det2c(&an.0.fixed_view::<2, 2>(2, 2).into_owned());
    let i3 = det2c(&an.cross_block());
    let is1 = as_.0.fixed_view::<2, 2>(0, 0).determinant();
    let is2 = as_.0.fixed_view::<2, 2>(2, 2).determinant();
    let is3 = as_.cross_block().determinant();
    InvariantSet {
        i1,
        i2,
        i3,
        i_global: an.0.determinant().re,
        delta: i1 + i2 + 2.0 * i3,
        is1,
        is2,
        is3,
        is_global: as_.0.determinant(),
        delta_s: is1 + is2 + 2.0 * is3,
    }
}

fn det2c(b: &Matrix2<Complex64>) -> f64 {
    // Blocks of A_N have real determinants by the conjugation structure.
    (b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]).re
}

/// Square root of a radicand that may be slightly negative from rounding.
///
/// Values below zero by no more than `RADICAND_CLAMP * scale` are clamped.
pub(crate) fn clamped_sqrt(x: f64, scale: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -RADICAND_CLAMP * scale.abs().max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand(x))
    }
}

/// Smaller and larger symplectic eigenvalues of a 4×4 covariance matrix from
/// its seralian `delta` and determinant `det`.
pub(crate) fn symplectic_pair(delta: f64, det: f64) -> Result<(f64, f64)> {
    let outer = clamped_sqrt(delta * delta - 4.0 * det, delta * delta)?;
    let lower = clamped_sqrt(0.5 * (delta - outer), delta)?;
    let upper = clamped_sqrt(0.5 * (delta + outer), delta)?;
    Ok((lower, upper))
}

/// Ordinary symplectic eigenvalues `(d_-, d_+)` of `A_S`.
pub fn symplectic_spectrum(m: &NormalMoments) -> Result<(f64, f64)> {
    let inv = invariants(m);
    symplectic_pair(inv.delta_s, inv.is_global)
}

/// Outcome of [`is_physical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    /// Smaller ordinary symplectic eigenvalue; NaN when the symplectic
    /// spectrum is not real.
    pub d_minus: f64,
}

/// Uncertainty-bound check: `A_S` positive semidefinite and `d_- >= 1/2 - tol`.
pub fn is_physical(m: &NormalMoments, tol: f64) -> Physicality {
    let d_minus = symplectic_spectrum(m).map(|(lo, _)| lo).unwrap_or(f64::NAN);
    let sym = to_cov_symmetric(m);
    let min_eig = SymmetricEigen::new(sym.0)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let physical = d_minus.is_finite() && d_minus >= 0.5 - tol && min_eig >= -tol;
    Physicality { physical, d_minus }
}

/// Passive two-mode beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    transmissivity: f64,
    phase: f64,
}

impl BeamSplitter {
    pub fn new(transmissivity: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(Error::TransmissivityOutOfRange(transmissivity));
        }
        check_finite("phase", phase)?;
        Ok(Self { transmissivity, phase })
    }

    pub fn identity() -> Self {
        Self {
            transmissivity: 1.0,
            phase: 0.0,
        }
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn reflectivity(&self) -> f64 {
        1.0 - self.transmissivity
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The transformation undoing `self` (`U^{-1} = U^†`).
    pub fn inverse(&self) -> Self {
        Self {
            transmissivity: self.transmissivity,
            phase: self.phase + std::f64::consts::PI,
        }
    }

    /// The 4×4 matrix acting on `(β1, β1*, β2, β2*)`.
    pub fn matrix(&self) -> Matrix4<Complex64> {
        let t = Complex64::new(self.transmissivity.sqrt(), 0.0);
        let r = self.reflectivity().sqrt();
        let e = Complex64::from_polar(r, self.phase);
        let zero = Complex64::new(0.0, 0.0);
        Matrix4::new(
            t,
            zero,
            -e,
            zero,
            zero,
            t,
            zero,
            -e.conj(),
            e.conj(),
            zero,
            t,
            zero,
            zero,
            e,
            zero,
            t,
        )
    }
}

pub fn apply_beam_splitter(m: &NormalMoments, bs: &BeamSplitter) -> Result<NormalMoments> {
    let u = bs.matrix();
    let out = u.adjoint() * to_cov_normal(m).0 * u;
    NormalMoments::from_cov_normal(&out)
}

/// Local phase shift `a_j -> e^{iθ} a_j`.
pub fn apply_phase_shift(m: &NormalMoments, mode: usize, theta: f64) -> Result<NormalMoments> {
    let e = Complex64::from_polar(1.0, theta);
    let mut out = *m;
    match mode {
        1 => {
            out.c1 = m.c1 * e * e;
            out.d12 = m.d12 * e;
            out.dbar12 = m.dbar12 * e.conj();
        }
        2 => {
            out.c2 = m.c2 * e * e;
            out.d12 = m.d12 * e;
            out.dbar12 = m.dbar12 * e;
        }
        _ => return Err(Error::BadModeIndex(mode)),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn twin() -> NormalMoments {
        make_moments(1.0, 1.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, SQRT_2), c(0.0, 0.0)).unwrap()
    }

    fn squeezed() -> NormalMoments {
        make_moments(1.0, 0.0, c(0.0, SQRT_2), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_input() {
        let z = c(0.0, 0.0);
        assert_eq!(make_moments(f64::NAN, 0.0, z, z, z, z), Err(Error::NonFinite("b1")));
        assert_eq!(
            make_moments(0.0, 0.0, z, c(f64::INFINITY, 0.0), z, z),
            Err(Error::NonFinite("c2"))
        );
        assert!(matches!(
            make_moments(0.0, -0.1, z, z, z, z),
            Err(Error::NegativeOccupation { name: "b2", .. })
        ));
        assert_eq!(make_moments(0.0, 0.0, z, z, z, z).unwrap(), NormalMoments::vacuum());
    }

    #[test]
    fn normal_covariance_layout() {
        assert_eq!(*to_cov_normal(&NormalMoments::vacuum()).matrix(), Matrix4::zeros());

        let a = to_cov_normal(&twin());
        assert_eq!(a.matrix()[(0, 3)], c(0.0, SQRT_2));
        assert_eq!(a.matrix()[(0, 1)], c(0.0, 0.0));
        assert_eq!(a.matrix(), &a.matrix().adjoint());

        let a = to_cov_normal(&squeezed());
        assert_eq!(a.matrix()[(0, 1)], c(0.0, SQRT_2));
        let diag: Vec<f64> = (0..4).map(|i| a.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn symmetric_covariance_layout() {
        let v = to_cov_symmetric(&NormalMoments::vacuum());
        assert_eq!(*v.matrix(), Matrix4::identity() * 0.5);

        let t = *to_cov_symmetric(&twin()).matrix();
        assert_eq!(t.fixed_view::<2, 2>(0, 0).into_owned(), Matrix2::identity() * 1.5);
        assert_eq!(t.fixed_view::<2, 2>(2, 2).into_owned(), Matrix2::identity() * 1.5);
        // Im(D - Dbar) and Im(D + Dbar) are both √2 for D = i√2, Dbar = 0.
        assert_eq!(t[(0, 3)], SQRT_2);
        assert_eq!(t[(1, 2)], SQRT_2);
        assert_eq!(t[(0, 2)], 0.0);
        assert_eq!(t, t.transpose());

        let s = *to_cov_symmetric(&squeezed()).matrix();
        assert_eq!(s[(0, 0)], 1.5);
        assert_eq!(s[(1, 1)], 1.5);
        assert_eq!(s[(0, 1)], SQRT_2);
    }

    #[test]
    fn symmetric_covariance_round_trip() {
        let m = make_moments(0.3, 1.2, c(0.1, -0.2), c(-0.4, 0.3), c(0.2, 0.5), c(-0.1, 0.25)).unwrap();
        let back = NormalMoments::from_cov_symmetric(to_cov_symmetric(&m).matrix()).unwrap();
        assert!(m.max_abs_diff(&back) < 1e-15);
    }

    #[test]
    fn invariant_examples() {
        let v = invariants(&NormalMoments::vacuum());
        assert_eq!((v.i1, v.i2, v.i3, v.delta), (0.0, 0.0, 0.0, 0.0));
        assert_abs_diff_eq!(v.is1, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(v.is2, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(v.is3, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.is_global, 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.delta_s, 0.5, epsilon = 1e-15);

        let t = invariants(&twin());
        assert_abs_diff_eq!(t.i1, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.i2, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.i3, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.delta, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.i3, t.is3, epsilon = 1e-14);

        let s = invariants(&squeezed());
        assert_abs_diff_eq!(s.i1, -1.0, epsilon = 1e-14);
        assert_eq!((s.i2, s.i3), (0.0, 0.0));
        assert_abs_diff_eq!(s.delta, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn physicality_examples() {
        let v = is_physical(&NormalMoments::vacuum(), EPS_PHYS);
        assert!(v.physical);
        assert_abs_diff_eq!(v.d_minus, 0.5, epsilon = 1e-15);

        let t = is_physical(&twin(), EPS_PHYS);
        assert!(t.physical);
        assert_abs_diff_eq!(t.d_minus, 0.5, epsilon = 1e-7);

        let z = c(0.0, 0.0);
        let bad = make_moments(0.0, 0.0, c(0.3, 0.0), z, z, z).unwrap();
        let p = is_physical(&bad, EPS_PHYS);
        assert!(!p.physical);
        assert_abs_diff_eq!(p.d_minus, (0.25f64 - 0.09).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn beam_splitter_examples() {
        assert_eq!(BeamSplitter::new(1.2, 0.0), Err(Error::TransmissivityOutOfRange(1.2)));
        let m = make_moments(0.3, 1.2, c(0.1, -0.2), c(-0.4, 0.3), c(0.2, 0.5), c(-0.1, 0.25)).unwrap();
        let same = apply_beam_splitter(&m, &BeamSplitter::identity()).unwrap();
        assert!(m.max_abs_diff(&same) < 1e-15);

        // balanced splitter turns the twin beam into two squeezed modes
        let out = apply_beam_splitter(&twin(), &BeamSplitter::new(0.5, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(out.b1(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.b2(), 1.0, epsilon = 1e-14);
        assert!((out.c1() - c(0.0, SQRT_2)).norm() < 1e-14);
        assert!((out.c2() - c(0.0, -SQRT_2)).norm() < 1e-14);
        assert!(out.d12().norm() < 1e-14);
        assert!(out.dbar12().norm() < 1e-14);

        // T = 0 swaps the modes, attaching the e^{±iφ} factors
        let phi = 0.7;
        let sw = apply_beam_splitter(&m, &BeamSplitter::new(0.0, phi).unwrap()).unwrap();
        let e = Complex64::from_polar(1.0, phi);
        assert_abs_diff_eq!(sw.b1(), m.b2(), epsilon = 1e-15);
        assert_abs_diff_eq!(sw.b2(), m.b1(), epsilon = 1e-15);
        assert!((sw.c1() - m.c2() * e * e).norm() < 1e-14);
        assert!((sw.c2() - m.c1() * e.conj() * e.conj()).norm() < 1e-14);
        assert!((sw.d12() + m.d12()).norm() < 1e-14);
    }

    #[test]
    fn phase_shift_examples() {
        let out = apply_phase_shift(&squeezed(), 1, FRAC_PI_2).unwrap();
        assert!((out.c1() - c(0.0, -SQRT_2)).norm() < 1e-14);

        let m = make_moments(0.3, 1.2, c(0.1, -0.2), c(-0.4, 0.3), c(0.2, 0.5), c(-0.1, 0.25)).unwrap();
        assert_eq!(apply_phase_shift(&m, 1, 0.0).unwrap(), m);

        let out = apply_phase_shift(&twin(), 2, PI).unwrap();
        assert!((out.d12() - c(0.0, -SQRT_2)).norm() < 1e-14);

        assert_eq!(apply_phase_shift(&m, 3, 0.1), Err(Error::BadModeIndex(3)));
    }
}
