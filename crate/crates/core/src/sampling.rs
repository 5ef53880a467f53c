//! Seeded random Gaussian states for property checks.
//!
//! A physical covariance is built as `σ = S diag(ν1, ν1, ν2, ν2) Sᵀ` with
//! symplectic eigenvalues `ν_j >= 1/2` and a random symplectic `S` composed of
//! local phase rotations, a two-mode mixer and local squeezers (the
//! Bloch–Messiah form). Classical states use no squeezers.

use nalgebra::{Matrix2, Matrix4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use crate::state::{BeamSplitter, NormalMoments};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ranges of the sampled parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRanges {
    /// squeezing parameters drawn from `[-max_squeeze, max_squeeze]`
    pub max_squeeze: f64,
    /// symplectic eigenvalues drawn from `[1/2, 1/2 + max_thermal]`
    pub max_thermal: f64,
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            max_squeeze: 1.0,
            max_thermal: 1.5,
        }
    }
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn local(a: Matrix2<f64>, b: Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
    m
}

fn random_phases<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    local(
        rotation(rng.random_range(0.0..TAU)),
        rotation(rng.random_range(0.0..TAU)),
    )
}

/// Real two-mode mixer acting identically on `x` and `p`.
fn mixer(angle: f64) -> Matrix4<f64> {
    let (s, c) = angle.sin_cos();
    Matrix4::new(
        c, 0.0, s, 0.0, //
        0.0, c, 0.0, s, //
        -s, 0.0, c, 0.0, //
        0.0, -s, 0.0, c,
    )
}

fn random_passive<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    random_phases(rng) * mixer(rng.random_range(0.0..PI)) * random_phases(rng)
}

fn squeezer(r1: f64, r2: f64) -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(r1.exp(), (-r1).exp(), r2.exp(), (-r2).exp()))
}

fn from_symplectic(s: &Matrix4<f64>, nu1: f64, nu2: f64) -> NormalMoments {
    let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(nu1, nu1, nu2, nu2));
    let sigma = s * d * s.transpose();
    let sigma = (sigma + sigma.transpose()) * 0.5;
    NormalMoments::from_cov_symmetric(&sigma).expect("sampled covariance has valid moments")
}

/// A random physical state with the given symplectic eigenvalues.
pub fn random_with_spectrum<R: Rng>(rng: &mut R, nu1: f64, nu2: f64, ranges: &SampleRanges) -> NormalMoments {
    let r1 = rng.random_range(-ranges.max_squeeze..=ranges.max_squeeze);
    let r2 = rng.random_range(-ranges.max_squeeze..=ranges.max_squeeze);
    let s = random_passive(rng) * squeezer(r1, r2) * random_passive(rng);
    from_symplectic(&s, nu1, nu2)
}

pub fn random_spectrum<R: Rng>(rng: &mut R, ranges: &SampleRanges) -> (f64, f64) {
    (
        0.5 + rng.random_range(0.0..=ranges.max_thermal),
        0.5 + rng.random_range(0.0..=ranges.max_thermal),
    )
}

/// A random physical (generally mixed, generally nonclassical) state.
pub fn random_physical<R: Rng>(rng: &mut R, ranges: &SampleRanges) -> NormalMoments {
    let (nu1, nu2) = random_spectrum(rng, ranges);
    random_with_spectrum(rng, nu1, nu2, ranges)
}

/// A random pure state.
pub fn random_pure<R: Rng>(rng: &mut R, ranges: &SampleRanges) -> NormalMoments {
    random_with_spectrum(rng, 0.5, 0.5, ranges)
}

/// Thermal light of random temperatures mixed by a random passive device.
pub fn random_classical<R: Rng>(rng: &mut R, ranges: &SampleRanges) -> NormalMoments {
    let (nu1, nu2) = random_spectrum(rng, ranges);
    from_symplectic(&random_passive(rng), nu1, nu2)
}

pub fn random_beam_splitter<R: Rng>(rng: &mut R) -> BeamSplitter {
    BeamSplitter::new(rng.random_range(0.0..=1.0), rng.random_range(-PI..PI)).expect("transmissivity drawn from [0, 1]")
}
