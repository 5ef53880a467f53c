//! Nonclassicality and entanglement quantifiers and the six-region
//! classification by entanglement and local nonclassicality.

use std::fmt;

use crate::error::{Error, Result};
use crate::state::{invariants, symplectic_pair, to_cov_normal, InvariantSet, NormalMoments};

/// Default absolute tolerance below which an indicator counts as zero.
pub const EPS_REGION: f64 = 1e-12;

/// Tolerance on the agreement of the two global-invariant routes.
pub const EPS_ROUTE: f64 = 1e-10;

/// Lee nonclassicality depth: `max(0, λ_max(A_N))`.
pub fn tau_global(m: &NormalMoments) -> f64 {
    to_cov_normal(m).eigenvalues()[3].max(0.0)
}

/// Local depth of mode `j` as `(|C_j| - B_j, max(0, |C_j| - B_j))`.
pub fn tau_local(m: &NormalMoments, mode: usize) -> Result<(f64, f64)> {
    let raw = m.c(mode)?.norm() - m.b(mode)?;
    Ok((raw, raw.max(0.0)))
}

/// `I_ncl^(j) = |C_j|^2 - B_j^2 = -I_j`.
pub fn local_ncl_invariant(m: &NormalMoments, mode: usize) -> Result<f64> {
    let b = m.b(mode)?;
    Ok(m.c(mode)?.norm_sqr() - b * b)
}

fn ient_from(inv: &InvariantSet) -> f64 {
    0.25 * inv.delta_s_pt() - inv.is_global - 1.0 / 16.0
}

/// Entanglement indicator, positive iff the state is entangled.
pub fn entanglement_indicator(m: &NormalMoments) -> f64 {
    ient_from(&invariants(m))
}

/// Smaller symplectic eigenvalue of the partially transposed `A_S`.
///
/// Evaluated from `Δ̃_S = IS1 + IS2 - 2 IS3` and, independently, from
/// `I' = 4 I_S + 4 I_ent + 1/4`; the two must agree.
pub fn pt_symplectic_min(m: &NormalMoments) -> Result<f64> {
    let inv = invariants(m);
    let (direct, _) = symplectic_pair(inv.delta_s_pt(), inv.is_global)?;
    let i_prime = 4.0 * inv.is_global + 4.0 * ient_from(&inv) + 0.25;
    let (via_ient, _) = symplectic_pair(i_prime, inv.is_global)?;
    if (direct - via_ient).abs() > EPS_ROUTE * direct.max(1.0) {
        return Err(Error::FormulaMismatch {
            direct,
            invariant_form: via_ient,
        });
    }
    Ok(direct)
}

/// `-ln(2 d̃_-)` without the clipping at zero; positive iff entangled.
pub fn log_negativity_raw(m: &NormalMoments) -> Result<f64> {
    Ok(-(2.0 * pt_symplectic_min(m)?).ln())
}

/// Logarithmic negativity `E_N = max(0, -ln(2 d̃_-))` (natural log).
pub fn log_negativity(m: &NormalMoments) -> Result<f64> {
    Ok(log_negativity_raw(m)?.max(0.0))
}

/// Closed-form `E_N` of a pure state in terms of its entanglement indicator.
pub fn log_negativity_pure(ient: f64) -> Result<f64> {
    if ient < 0.0 {
        return Err(Error::NegativeIndicator(ient));
    }
    Ok((2.0 * ient.sqrt() + (1.0 + 4.0 * ient).sqrt()).ln())
}

/// Global nonclassicality invariant, evaluated both as
/// `I_ncl^(1) + I_ncl^(2) + 2 I_ent` and as `-Δ + Δ_S/2 - 2 I_S - 1/8`.
/// Returns the second form.
pub fn global_ncl_invariant(m: &NormalMoments) -> Result<f64> {
    let inv = invariants(m);
    let direct = -inv.i1 - inv.i2 + 2.0 * ient_from(&inv);
    let invariant_form = -inv.delta + 0.5 * inv.delta_s - 2.0 * inv.is_global - 0.125;
    let scale = direct.abs().max(invariant_form.abs()).max(1.0);
    if (direct - invariant_form).abs() > EPS_ROUTE * scale {
        return Err(Error::FormulaMismatch { direct, invariant_form });
    }
    Ok(invariant_form)
}

/// Principal squeeze variance `λ_j = 1/2 + B_j - |C_j|`.
pub fn principal_squeeze_variance(m: &NormalMoments, mode: usize) -> Result<f64> {
    Ok(0.5 + m.b(mode)? - m.c(mode)?.norm())
}

/// Regions by entanglement and number of locally nonclassical modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// entangled, both modes nonclassical
    I,
    /// entangled, one mode nonclassical
    II,
    /// entangled, marginals classical
    III,
    /// separable, both modes nonclassical
    IV,
    /// separable, one mode nonclassical
    V,
    /// classical
    VI,
}

impl Region {
    pub fn from_counts(entangled: bool, nonclassical_modes: usize) -> Self {
        match (entangled, nonclassical_modes) {
            (true, 2) => Region::I,
            (true, 1) => Region::II,
            (true, _) => Region::III,
            (false, 2) => Region::IV,
            (false, 1) => Region::V,
            (false, _) => Region::VI,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
            Region::VI => "VI",
        }
    }

    /// Numeric code 1..=6, convenient for CSV output.
    pub fn code(&self) -> u8 {
        match self {
            Region::I => 1,
            Region::II => 2,
            Region::III => 3,
            Region::IV => 4,
            Region::V => 5,
            Region::VI => 6,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Region label plus the nonclassical mode when exactly one mode is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub region: Region,
    pub nonclassical_mode: Option<usize>,
}

fn classify_values(incl1: f64, incl2: f64, ient: f64, eps: f64) -> Classification {
    let flags = [incl1 > eps, incl2 > eps];
    let count = flags.iter().filter(|&&f| f).count();
    let nonclassical_mode = if count == 1 {
        Some(if flags[0] { 1 } else { 2 })
    } else {
        None
    };
    Classification {
        region: Region::from_counts(ient > eps, count),
        nonclassical_mode,
    }
}

/// Strictly positive indicators (beyond `eps`) count as entangled or
/// nonclassical; boundary values fall into the classical side.
pub fn classify_region(m: &NormalMoments, eps: f64) -> Classification {
    let incl1 = m.c1().norm_sqr() - m.b1() * m.b1();
    let incl2 = m.c2().norm_sqr() - m.b2() * m.b2();
    classify_values(incl1, incl2, entanglement_indicator(m), eps)
}

/// Every quantifier of a state at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSet {
    pub tau_global: f64,
    pub tau1_raw: f64,
    pub tau2_raw: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub incl1: f64,
    pub incl2: f64,
    pub ient: f64,
    pub incl_global: f64,
    pub d_minus_pt: f64,
    pub log_negativity: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub classification: Classification,
}

impl MeasureSet {
    pub fn region(&self) -> Region {
        self.classification.region
    }
}

pub fn measure_set(m: &NormalMoments, eps_region: f64) -> Result<MeasureSet> {
    let (tau1_raw, tau1) = tau_local(m, 1)?;
    let (tau2_raw, tau2) = tau_local(m, 2)?;
    let incl1 = local_ncl_invariant(m, 1)?;
    let incl2 = local_ncl_invariant(m, 2)?;
    let ient = entanglement_indicator(m);
    let d_minus_pt = pt_symplectic_min(m)?;
    Ok(MeasureSet {
        tau_global: tau_global(m),
        tau1_raw,
        tau2_raw,
        tau1,
        tau2,
        incl1,
        incl2,
        ient,
        incl_global: global_ncl_invariant(m)?,
        d_minus_pt,
        log_negativity: (-(2.0 * d_minus_pt).ln()).max(0.0),
        lambda1: principal_squeeze_variance(m, 1)?,
        lambda2: principal_squeeze_variance(m, 2)?,
        classification: classify_values(incl1, incl2, ient, eps_region),
    })
}

/// The added isotropic noise needed to make `σ_1 + ν I` positive
/// semidefinite, found by bisection on the smallest eigenvalue. Used as an
/// independent check on [`tau_global`].
pub fn noise_to_conceal(m: &NormalMoments, tol: f64) -> f64 {
    let sigma = crate::qpd::s_ordered_covariance(m, 1.0);
    let min_eig = |nu: f64| {
        let shifted = sigma + nalgebra::Matrix4::identity() * nu;
        nalgebra::SymmetricEigen::new(shifted)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    if min_eig(0.0) >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while min_eig(hi) < 0.0 {
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_eig(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves the positivity condition for `I_ncl^(j)` as a function of the
/// principal squeeze variance, used to check consistency of the two.
pub fn incl_from_lambda(lambda: f64, b: f64) -> f64 {
    (0.5 - lambda) * (2.0 * b + 0.5 - lambda)
}
