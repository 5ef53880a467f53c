//! Heisenberg–Langevin evolution of the second moments under the χ(2)
//! Hamiltonian with parametric (`g12`) and subharmonic (`g11`, `g22`)
//! couplings, damping and thermal reservoirs.
//!
//! The operator vector `a = (a1, a1†, a2, a2†)` obeys `da/dt = M a + L`.
//! The rows for `a_j†` are the conjugates of the rows for `a_j`, so complex
//! couplings enter them conjugated; for real couplings this is the familiar
//! `±i g` pattern.
//!
//! The evolved quantity is `S_kl = <:a_k a_l:>`, the normally ordered moment
//! matrix. With `c` the commutator part (`c_{a a†} = 1`) and `D_raw` the
//! Langevin correlations `<L_k L_l> = D_raw,kl δ(t - t')`,
//!
//! ```text
//! dS/dt = M S + S Mᵀ + M c + c Mᵀ + D_raw
//! D_raw[a_j, a_j†] = γ_j (n_j + 1),   D_raw[a_j†, a_j] = γ_j n_j
//! ```
//!
//! so a damped mode relaxes to `B_j = n_j`.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factories::{
    squeezed_vacuum, twin_beam, twin_plus_squeezed, two_squeezed, Family, SqueezedVacuumParams, TwinBeamParams,
    TwinPlusSqueezedParams, TwoSqueezedParams, GENERATED_SQUEEZE_PHASE,
};
use crate::ode::{self, Options};
use crate::state::{make_moments, NormalMoments};

/// Default integrator tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    pub g12: Complex64,
    pub g11: Complex64,
    pub g22: Complex64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub nd1: f64,
    pub nd2: f64,
    pub t: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            g12: z,
            g11: z,
            g22: z,
            gamma1: 0.0,
            gamma2: 0.0,
            nd1: 0.0,
            nd2: 0.0,
            t: 0.0,
        }
    }
}

impl HamiltonianParams {
    pub fn validate(&self) -> Result<()> {
        for (name, z) in [("g12", self.g12), ("g11", self.g11), ("g22", self.g22)] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        for (name, x) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("nd1", self.nd1),
            ("nd2", self.nd2),
            ("t", self.t),
        ] {
            if !x.is_finite() {
                return Err(Error::NonFinite(name));
            }
            if x < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be nonnegative, got {x}"),
                });
            }
        }
        Ok(())
    }
}

/// Drift matrix in the basis `(a1, a1†, a2, a2†)`.
pub fn drift_matrix(p: &HamiltonianParams) -> Matrix4<Complex64> {
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    let d1 = Complex64::new(-0.5 * p.gamma1, 0.0);
    let d2 = Complex64::new(-0.5 * p.gamma2, 0.0);
    Matrix4::new(
        d1,
        2.0 * i * p.g11,
        z,
        i * p.g12,
        -2.0 * i * p.g11.conj(),
        d1,
        -i * p.g12.conj(),
        z,
        z,
        i * p.g12,
        d2,
        2.0 * i * p.g22,
        -i * p.g12.conj(),
        z,
        -2.0 * i * p.g22.conj(),
        d2,
    )
}

fn commutator_part() -> Matrix4<Complex64> {
    let mut c = Matrix4::zeros();
    c[(0, 1)] = Complex64::new(1.0, 0.0);
    c[(2, 3)] = Complex64::new(1.0, 0.0);
    c
}

/// Constant inhomogeneity of the normally ordered moment equation.
pub fn diffusion_matrix(p: &HamiltonianParams) -> Matrix4<Complex64> {
    let m = drift_matrix(p);
    let c = commutator_part();
    let mut raw = Matrix4::zeros();
    raw[(0, 1)] = Complex64::new(p.gamma1 * (p.nd1 + 1.0), 0.0);
    raw[(1, 0)] = Complex64::new(p.gamma1 * p.nd1, 0.0);
    raw[(2, 3)] = Complex64::new(p.gamma2 * (p.nd2 + 1.0), 0.0);
    raw[(3, 2)] = Complex64::new(p.gamma2 * p.nd2, 0.0);
    m * c + c * m.transpose() + raw
}

/// `S_kl = <:a_k a_l:>` from the moments.
pub fn moment_matrix(m: &NormalMoments) -> Matrix4<Complex64> {
    let b1 = Complex64::new(m.b1(), 0.0);
    let b2 = Complex64::new(m.b2(), 0.0);
    let (c1, c2, d, db) = (m.c1(), m.c2(), m.d12(), m.dbar12());
    // <a1† a2> = -Dbar, <a1 a2†> = -Dbar*
    Matrix4::new(
        c1,
        b1,
        d,
        -db.conj(),
        b1,
        c1.conj(),
        -db,
        d.conj(),
        d,
        -db,
        c2,
        b2,
        -db.conj(),
        d.conj(),
        b2,
        c2.conj(),
    )
}

pub fn moments_from_matrix(s: &Matrix4<Complex64>) -> Result<NormalMoments> {
    let clamp = |b: f64| if b < 0.0 && b > -1e-12 { 0.0 } else { b };
    make_moments(
        clamp(s[(0, 1)].re),
        clamp(s[(2, 3)].re),
        s[(0, 0)],
        s[(2, 2)],
        s[(0, 2)],
        -s[(1, 2)],
    )
}

/// Largest entrywise violation of symmetry and of the conjugation pattern
/// `S[a†,a†] = S[a,a]*`, `S[a1†,a2†] = S[a1,a2]*`, `S[a1,a2†] = S[a1†,a2]*`,
/// real occupations.
pub fn structure_violation(s: &Matrix4<Complex64>) -> f64 {
    let mut worst = (s - s.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pairs = [((1, 1), (0, 0)), ((3, 3), (2, 2)), ((1, 3), (0, 2)), ((0, 3), (1, 2))];
    for ((a, b), (c, d)) in pairs {
        worst = worst.max((s[(a, b)] - s[(c, d)].conj()).norm());
    }
    worst.max(s[(0, 1)].im.abs()).max(s[(2, 3)].im.abs())
}

fn pack(s: &Matrix4<Complex64>, y: &mut [f64]) {
    for (k, z) in s.iter().enumerate() {
        y[2 * k] = z.re;
        y[2 * k + 1] = z.im;
    }
}

fn unpack(y: &[f64]) -> Matrix4<Complex64> {
    Matrix4::from_iterator((0..16).map(|k| Complex64::new(y[2 * k], y[2 * k + 1])))
}

/// Diagnostics collected over the accepted integrator steps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolutionReport {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub max_structure_violation: f64,
}

/// Evolves `initial` and returns the moments at each of `times`
/// (nondecreasing, starting at or after zero).
pub fn evolve_at_times(
    p: &HamiltonianParams,
    initial: &NormalMoments,
    times: &[f64],
    tol: f64,
) -> Result<(Vec<NormalMoments>, EvolutionReport)> {
    p.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let m = drift_matrix(p);
    let mt = m.transpose();
    let d = diffusion_matrix(p);
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let s = unpack(y);
        pack(&(m * s + s * mt + d), dy);
    };
    let opts = Options::with_tol(tol);
    let mut y = vec![0.0; 32];
    pack(&moment_matrix(initial), &mut y);
    let mut report = EvolutionReport::default();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if !target.is_finite() || target < t {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("times must be finite and nondecreasing from 0, got {target} after {t}"),
            });
        }
        let stats = ode::integrate(rhs, t, target, &mut y, &opts, |_, y| {
            let v = structure_violation(&unpack(y));
            report.max_structure_violation = report.max_structure_violation.max(v);
        })?;
        report.accepted_steps += stats.accepted;
        report.rejected_steps += stats.rejected;
        t = target;
        out.push(moments_from_matrix(&unpack(&y))?);
    }
    Ok((out, report))
}

/// Moments at time `p.t` starting from the two-mode vacuum.
pub fn evolve_moments(p: &HamiltonianParams, tol: f64) -> Result<NormalMoments> {
    let (states, _) = evolve_at_times(p, &NormalMoments::vacuum(), &[p.t], tol)?;
    Ok(states[0])
}

fn real_coupling(name: &'static str, g: Complex64) -> Result<f64> {
    if g.im != 0.0 || g.re < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("factory comparison needs a real nonnegative coupling, got {g}"),
        });
    }
    Ok(g.re)
}

/// The analytic family member generated by undamped evolution with `p`.
pub fn matching_factory(p: &HamiltonianParams, family: Family) -> Result<NormalMoments> {
    let t = p.t;
    let pairs = |g: f64| (g * t).sinh().powi(2);
    let squeezed = |g: f64| (2.0 * g * t).sinh().powi(2);
    match family {
        Family::Twin => twin_beam(&TwinBeamParams {
            bp: pairs(real_coupling("g12", p.g12)?),
            ..Default::default()
        }),
        Family::Squeezed => squeezed_vacuum(&SqueezedVacuumParams {
            bp_sq: squeezed(real_coupling("g11", p.g11)?),
            bs: 0.0,
        }),
        Family::TwoSqueezed => two_squeezed(&TwoSqueezedParams {
            bps: squeezed(real_coupling("g11", p.g11)?),
            bpi: squeezed(real_coupling("g22", p.g22)?),
            theta1: GENERATED_SQUEEZE_PHASE,
            theta2: GENERATED_SQUEEZE_PHASE,
            ..Default::default()
        }),
        Family::Mixed => {
            let g = real_coupling("g11", p.g11)?;
            if p.g22 != p.g11 {
                return Err(Error::InvalidParameter {
                    name: "g22",
                    reason: "the mixed family needs g11 = g22".into(),
                });
            }
            twin_plus_squeezed(&TwinPlusSqueezedParams {
                bp: pairs(real_coupling("g12", p.g12)?),
                bp_sq: squeezed(g),
            })
        }
    }
}

/// Largest moment deviation between the integrated state and the matching
/// analytic family member. Damping must be zero.
pub fn compare_with_factory(p: &HamiltonianParams, family: &str, tol: f64) -> Result<f64> {
    let family: Family = family.parse()?;
    if p.gamma1 != 0.0 || p.gamma2 != 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "factory comparison requires zero damping".into(),
        });
    }
    let expected = matching_factory(p, family)?;
    if p.t == 0.0 {
        return Ok(NormalMoments::vacuum().max_abs_diff(&expected));
    }
    Ok(evolve_moments(p, tol)?.max_abs_diff(&expected))
}
