//! The four analytic state families (twin beam, squeezed vacuum, two squeezed
//! vacua, twin beam mixed with squeezed light) and the closed-form output
//! quantifiers published for them after a beam splitter.
//!
//! Phase conventions: the twin beam uses `D_12 = i√(B_p(B_p+1))`, squeezed
//! vacua use `C = i√(B̃(B̃+1))` unless a phase `θ_j` is given explicitly
//! (`C_j = e^{iθ_j}√(...)`). The closed forms below are transcribed as
//! printed; where a printed expression disagrees with the moment pipeline the
//! pipeline is the reference, see the notes on each function.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{make_moments, NormalMoments};

fn nonneg(name: &'static str, x: f64) -> Result<f64> {
    if !x.is_finite() {
        Err(Error::NonFinite(name))
    } else if x < 0.0 {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be nonnegative, got {x}"),
        })
    } else {
        Ok(x)
    }
}

fn check_t(t: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&t) {
        Ok(t)
    } else {
        Err(Error::TransmissivityOutOfRange(t))
    }
}

/// `√(x(x+1))`, the anomalous moment of a pure squeezed or paired field.
fn pair_amp(x: f64) -> f64 {
    (x * (x + 1.0)).sqrt()
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `(I_ncl^(1), I_ncl^(2), I_ent, I_ncl)` after the beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub incl1: f64,
    pub incl2: f64,
    pub ient: f64,
    pub incl_global: f64,
}

impl ClosedForm {
    pub fn as_array(&self) -> [f64; 4] {
        [self.incl1, self.incl2, self.ient, self.incl_global]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwinBeamParams {
    /// mean photon-pair number
    pub bp: f64,
    /// signal noise photons
    pub bs: f64,
    /// idler noise photons
    pub bi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SqueezedVacuumParams {
    pub bp_sq: f64,
    pub bs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoSqueezedParams {
    pub bps: f64,
    pub bpi: f64,
    pub bs: f64,
    pub bi: f64,
    pub theta1: f64,
    pub theta2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwinPlusSqueezedParams {
    pub bp: f64,
    pub bp_sq: f64,
}

pub fn twin_beam(p: &TwinBeamParams) -> Result<NormalMoments> {
    let bp = nonneg("bp", p.bp)?;
    let bs = nonneg("bs", p.bs)?;
    let bi = nonneg("bi", p.bi)?;
    make_moments(
        bp + bs,
        bp + bi,
        zero(),
        zero(),
        Complex64::new(0.0, pair_amp(bp)),
        zero(),
    )
}

/// Printed closed forms for a noisy twin beam behind a beam splitter.
///
/// The `I_ent` expression carries a last term `-TR(B_s+B_i)^2`; the moment
/// pipeline (and the printed `I_ncl`, which agrees with it) requires
/// `-TR(B_s-B_i)^2`. The difference is `4 TR B_s B_i`, so only noisy beams
/// with noise in both arms are affected.
pub fn twin_beam_closed_form(p: &TwinBeamParams, t: f64) -> Result<ClosedForm> {
    let t = check_t(t)?;
    let r = 1.0 - t;
    let (bp, bs, bi) = (p.bp, p.bs, p.bi);
    let pairs = bp * bp + bp;
    let noise = bs + bi;
    let incl1 = 4.0 * t * r * pairs - (bp + t * bs + r * bi).powi(2);
    let incl2 = 4.0 * t * r * pairs - (bp + t * bi + r * bs).powi(2);
    let ient = -(noise * noise - (t - r).powi(2)) * pairs
        - 2.0 * bp * bs * bi * noise
        - (bs * bs + bs) * (bi * bi + bi)
        - t * r * noise * noise;
    let incl_global = 2.0 * bp
        - noise * noise * (2.0 * pairs + 1.0)
        - 2.0 * bp * (1.0 + 2.0 * bs * bi) * noise
        - 2.0 * bs * bi * (noise + bs * bi);
    Ok(ClosedForm {
        incl1,
        incl2,
        ient,
        incl_global,
    })
}

/// Open interval of transmissivities where a noiseless twin beam produces
/// locally nonclassical outputs.
pub fn local_ncl_window(bp: f64) -> (f64, f64) {
    let half = 0.5 / (bp + 1.0).sqrt();
    (0.5 - half, 0.5 + half)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Pair number above which the noisy twin beam is entangled.
    Value(f64),
    /// Total noise `B_s + B_i >= 1`: no pair number entangles the beam.
    Unentangleable,
}

pub fn entanglement_threshold(bs: f64, bi: f64) -> Threshold {
    let total = bs + bi;
    if total >= 1.0 {
        Threshold::Unentangleable
    } else {
        Threshold::Value(bs * bi / (1.0 - total))
    }
}

pub fn squeezed_vacuum(p: &SqueezedVacuumParams) -> Result<NormalMoments> {
    let bp = nonneg("bp_sq", p.bp_sq)?;
    let bs = nonneg("bs", p.bs)?;
    make_moments(bp + bs, 0.0, Complex64::new(0.0, pair_amp(bp)), zero(), zero(), zero())
}

pub fn squeezed_vacuum_closed_form(p: &SqueezedVacuumParams, t: f64) -> Result<ClosedForm> {
    let t = check_t(t)?;
    let r = 1.0 - t;
    let total = p.bp_sq * (1.0 - 2.0 * p.bs) - p.bs * p.bs;
    Ok(ClosedForm {
        incl1: t * t * total,
        incl2: r * r * total,
        ient: t * r * total,
        incl_global: total,
    })
}

/// Largest signal noise for which a noisy squeezed vacuum stays nonclassical.
pub fn squeezed_noise_bound(bp_sq: f64) -> f64 {
    pair_amp(bp_sq) - bp_sq
}

pub fn two_squeezed(p: &TwoSqueezedParams) -> Result<NormalMoments> {
    let bps = nonneg("bps", p.bps)?;
    let bpi = nonneg("bpi", p.bpi)?;
    let bs = nonneg("bs", p.bs)?;
    let bi = nonneg("bi", p.bi)?;
    make_moments(
        bps + bs,
        bpi + bi,
        Complex64::from_polar(pair_amp(bps), p.theta1),
        Complex64::from_polar(pair_amp(bpi), p.theta2),
        zero(),
        zero(),
    )
}

/// Printed closed forms for two squeezed vacua behind a `φ = 0` splitter.
///
/// `I_ncl^(2)` is `I_ncl^(1)` with signal and idler exchanged. The printed
/// `I_ent` contains a term `2 B̃_p^2 (1 + B_s)`, read here as
/// `2 B̃_p^i (1 + B_s)`. The local invariants agree with the pipeline; the
/// printed `I_ent` and `I_ncl` do not once noise is present.
pub fn two_squeezed_closed_form(p: &TwoSqueezedParams, t: f64) -> Result<ClosedForm> {
    let t = check_t(t)?;
    let r = 1.0 - t;
    let (s, i, bs, bi) = (p.bps, p.bpi, p.bs, p.bi);
    let d_prime = 2.0 * (s * (s + 1.0) * i * (i + 1.0)).sqrt();
    let cos = (p.theta1 - p.theta2).cos();
    let local = |s: f64, i: f64, bs: f64, bi: f64| {
        t * t * s * (s + 1.0) + r * r * i * (i + 1.0) + t * r * d_prime * cos
            - (t * s + r * i + t * bs + r * bi).powi(2)
    };
    let b1 = s + bs;
    let b2 = i + bi;
    let incl_global = b1 + b2
        - 2.0 * bs * bi * (2.0 * b1 * (1.0 + i) + 2.0 * i * (1.0 + b1) + bi * (1.0 + 2.0 * b1) + bs * (1.0 + 2.0 * b2))
        - 2.0 * (bs * b1 + bi * b2)
        - (bs + bi).powi(2);
    let ient = t * r * (-d_prime * cos + (s + i + 2.0 * s * i) - (bs + bi).powi(2) - 2.0 * (s - i) * (bs - bi))
        + bs * bi * (2.0 * s * (1.0 + bi) + 2.0 * i * (1.0 + bs) + 4.0 * s * i + (1.0 + bs) * (1.0 + bi));
    Ok(ClosedForm {
        incl1: local(s, i, bs, bi),
        incl2: local(i, s, bi, bs),
        ient,
        incl_global,
    })
}

pub fn twin_plus_squeezed(p: &TwinPlusSqueezedParams) -> Result<NormalMoments> {
    let bp = nonneg("bp", p.bp)?;
    let bq = nonneg("bp_sq", p.bp_sq)?;
    let b = bp + bq + 2.0 * bp * bq;
    let c = Complex64::new(0.0, pair_amp(bq) * (2.0 * bp + 1.0));
    make_moments(
        b,
        b,
        c,
        c,
        Complex64::new(0.0, pair_amp(bp) * (2.0 * bq + 1.0)),
        Complex64::new(-2.0 * pair_amp(bp) * pair_amp(bq), 0.0),
    )
}

/// Printed closed forms for the mixed family; the interference term `K`
/// enters mode 1 with `+` and mode 2 with `-`.
pub fn twin_plus_squeezed_closed_form(p: &TwinPlusSqueezedParams, t: f64, phi: f64) -> Result<ClosedForm> {
    let t = check_t(t)?;
    let r = 1.0 - t;
    let (bp, bq) = (p.bp, p.bp_sq);
    let pairs = bp * (bp + 1.0);
    let squeezed = bq * (bq + 1.0);
    let sin2 = phi.sin().powi(2);
    let k = 4.0 * (t * r).sqrt() * phi.cos() * (pairs * squeezed).sqrt();
    let common = (1.0 - 4.0 * t * r * sin2) * squeezed + 4.0 * t * r * pairs - (bq - bp).powi(2);
    Ok(ClosedForm {
        incl1: common + k,
        incl2: common - k,
        ient: (t - r).powi(2) * pairs + 4.0 * t * r * sin2 * squeezed,
        incl_global: 2.0 * (bp + bq + 2.0 * bp * bq),
    })
}

/// Named family, used by the dynamics comparison and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Twin,
    Squeezed,
    TwoSqueezed,
    Mixed,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "twin" => Ok(Family::Twin),
            "squeezed" => Ok(Family::Squeezed),
            "two_squeezed" => Ok(Family::TwoSqueezed),
            "mixed" => Ok(Family::Mixed),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Phase of a squeezed vacuum generated from vacuum with real coupling.
pub const GENERATED_SQUEEZE_PHASE: f64 = FRAC_PI_2;
