//! s-ordered characteristic functions and Gaussian quasidistributions.
//!
//! Measure convention: every phase-space integral is over `d²α/π` per mode,
//! so a normalized two-mode quasidistribution integrates to one against
//! `d²α₁ d²α₂ / π²` and the two-mode vacuum Wigner function equals 4 at the
//! origin. With quadratures `r = √2 (Re α₁, Im α₁, Re α₂, Im α₂)`:
//!
//! ```text
//! W^(s)(α) = det(σ_s)^{-1/2} exp(-rᵀ σ_s^{-1} r / 2)
//! σ_s      = σ_1 + (1 - s)/2 · I
//! ```
//!
//! `s = 1, 0, -1` give the P, Wigner and Husimi functions.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::{to_cov_normal, NormalMoments};

/// Eigenvalue threshold separating regular, degenerate and non-positive
/// covariances.
pub const EPS_PD: f64 = 1e-12;

/// Largest number of points a stored grid may have.
pub const MAX_GRID_POINTS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OrderingParameter(f64);

impl OrderingParameter {
    pub const NORMAL: Self = Self(1.0);
    pub const SYMMETRIC: Self = Self(0.0);
    pub const ANTINORMAL: Self = Self(-1.0);

    pub fn new(s: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&s) {
            Ok(Self(s))
        } else {
            Err(Error::OrderingOutOfRange(s))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// s-ordered characteristic function: the normal one times
/// `exp((s - 1)/2 · (|β₁|² + |β₂|²))`.
pub fn char_fn(m: &NormalMoments, s: OrderingParameter, beta1: Complex64, beta2: Complex64) -> Complex64 {
    let a = to_cov_normal(m);
    let v = Vector4::new(beta1, beta1.conj(), beta2, beta2.conj());
    let exponent = 0.5 * (v.adjoint() * a.matrix() * v)[(0, 0)];
    let shift = 0.5 * (s.0 - 1.0) * (beta1.norm_sqr() + beta2.norm_sqr());
    (exponent + shift).exp()
}

/// Quadrature-basis covariance of the s-ordered Gaussian.
///
/// Obtained from `A_N` by the unitary change of variables
/// `(β, β*) -> (x, p)` and the ordering shift, independently of the
/// direct symmetric-ordering construction.
pub fn s_ordered_covariance(m: &NormalMoments, s: f64) -> Matrix4<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, h);
    let one = Complex64::new(h, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // columns map (x_j, p_j) quadrature directions to (β_j, β_j*)
    let w = Matrix4::new(
        i, -one, zero, zero, //
        -i, -one, zero, zero, //
        zero, zero, i, -one, //
        zero, zero, -i, -one,
    );
    let sigma1 = -(w.adjoint() * to_cov_normal(m).matrix() * w).map(|z| z.re);
    sigma1 + Matrix4::identity() * (0.5 * (1.0 - s))
}

/// Covariance recovered from samples of `char_fn` by polarization of
/// `-2 ln C`, i.e. straight from the characteristic function.
pub fn covariance_from_char_fn(m: &NormalMoments, s: OrderingParameter) -> Matrix4<f64> {
    // ξ = (u, v) per mode maps to β = (-v + i u)/√2
    let quad = |xi: Vector4<f64>| {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b1 = Complex64::new(-xi[1], xi[0]) * h;
        let b2 = Complex64::new(-xi[3], xi[2]) * h;
        -2.0 * char_fn(m, s, b1, b2).ln().re
    };
    let e = |k: usize| {
        let mut v = Vector4::zeros();
        v[k] = 1.0;
        v
    };
    let mut out = Matrix4::zeros();
    for k in 0..4 {
        out[(k, k)] = quad(e(k));
    }
    for k in 0..4 {
        for l in (k + 1)..4 {
            let v = 0.5 * (quad(e(k) + e(l)) - out[(k, k)] - out[(l, l)]);
            out[(k, l)] = v;
            out[(l, k)] = v;
        }
    }
    out
}

/// Checks that smoothing from ordering `s1` to `s2 < s1` adds
/// `(s1 - s2)/2` of isotropic noise; returns the largest deviation.
pub fn noise_convolution(m: &NormalMoments, s1: f64, s2: f64) -> Result<f64> {
    if s2 >= s1 {
        return Err(Error::BadOrderingPair { s1, s2 });
    }
    let o1 = OrderingParameter::new(s1)?;
    let o2 = OrderingParameter::new(s2)?;
    let c1 = covariance_from_char_fn(m, o1);
    let c2 = covariance_from_char_fn(m, o2);
    let expected = c1 + Matrix4::identity() * (0.5 * (s1 - s2));
    Ok((c2 - expected).amax())
}

/// Whether the s-ordered quasidistribution is an ordinary density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    /// positive definite covariance
    Regular,
    /// positive semidefinite and singular: a delta-like distribution
    Degenerate,
    /// a negative covariance eigenvalue: not a probability density
    NonPositive,
}

fn min_eigenvalue4(s: &Matrix4<f64>) -> f64 {
    SymmetricEigen::new(*s)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn min_eigenvalue2(s: &Matrix2<f64>) -> f64 {
    SymmetricEigen::new(*s)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn classify(min_eig: f64) -> Existence {
    if min_eig > EPS_PD {
        Existence::Regular
    } else if min_eig >= -EPS_PD {
        Existence::Degenerate
    } else {
        Existence::NonPositive
    }
}

pub fn qpd_existence(m: &NormalMoments, s: OrderingParameter) -> Existence {
    classify(min_eigenvalue4(&s_ordered_covariance(m, s.0)))
}

/// A point value of the quasidistribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QpdValue {
    Density(f64),
    /// singular covariance: the distribution is (partly) a delta function
    Degenerate,
}

/// Precomputed two-mode Gaussian density.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian4 {
    inv: Matrix4<f64>,
    norm: f64,
}

impl Gaussian4 {
    pub fn eval(&self, alpha1: Complex64, alpha2: Complex64) -> f64 {
        let r = Vector4::new(alpha1.re, alpha1.im, alpha2.re, alpha2.im) * std::f64::consts::SQRT_2;
        self.norm * (-0.5 * r.dot(&(self.inv * r))).exp()
    }
}

/// Precomputed single-mode Gaussian density.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian2 {
    inv: Matrix2<f64>,
    norm: f64,
}

impl Gaussian2 {
    pub fn eval(&self, alpha: Complex64) -> f64 {
        let r = Vector2::new(alpha.re, alpha.im) * std::f64::consts::SQRT_2;
        self.norm * (-0.5 * r.dot(&(self.inv * r))).exp()
    }
}

/// Prepares the two-mode density, `None` for a degenerate covariance.
pub fn gaussian4(m: &NormalMoments, s: OrderingParameter) -> Result<Option<Gaussian4>> {
    let sigma = s_ordered_covariance(m, s.0);
    let min_eig = min_eigenvalue4(&sigma);
    match classify(min_eig) {
        Existence::NonPositive => Err(Error::NonPositiveCovariance(min_eig)),
        Existence::Degenerate => Ok(None),
        Existence::Regular => {
            let inv = sigma.try_inverse().ok_or(Error::NonPositiveCovariance(min_eig))?;
            Ok(Some(Gaussian4 {
                inv,
                norm: sigma.determinant().powf(-0.5),
            }))
        }
    }
}

/// Prepares the single-mode marginal of mode `mode`.
pub fn gaussian2(m: &NormalMoments, s: OrderingParameter, mode: usize) -> Result<Option<Gaussian2>> {
    let offset = match mode {
        1 => 0,
        2 => 2,
        _ => return Err(Error::BadModeIndex(mode)),
    };
    let sigma: Matrix2<f64> = s_ordered_covariance(m, s.0)
        .fixed_view::<2, 2>(offset, offset)
        .into_owned();
    let min_eig = min_eigenvalue2(&sigma);
    match classify(min_eig) {
        Existence::NonPositive => Err(Error::NonPositiveCovariance(min_eig)),
        Existence::Degenerate => Ok(None),
        Existence::Regular => {
            let inv = sigma.try_inverse().ok_or(Error::NonPositiveCovariance(min_eig))?;
            Ok(Some(Gaussian2 {
                inv,
                norm: sigma.determinant().powf(-0.5),
            }))
        }
    }
}

pub fn qpd_value(m: &NormalMoments, s: OrderingParameter, alpha1: Complex64, alpha2: Complex64) -> Result<QpdValue> {
    Ok(match gaussian4(m, s)? {
        Some(g) => QpdValue::Density(g.eval(alpha1, alpha2)),
        None => QpdValue::Degenerate,
    })
}

/// Uniform sampling of one real axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis needs at least 2 samples, got {count}"
            )));
        }
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::InvalidGrid(format!("bad axis range [{min}, {max}]")));
        }
        Ok(Self { min, max, count })
    }

    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.max
        } else {
            self.min + k as f64 * self.step()
        }
    }

    /// Trapezoidal weight of sample `k`.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.count {
            0.5 * self.step()
        } else {
            self.step()
        }
    }
}

/// Which part of phase space is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridLayout {
    /// Full four-dimensional grid over `(Re α₁, Im α₁, Re α₂, Im α₂)`.
    Full { re1: Axis, im1: Axis, re2: Axis, im2: Axis },
    /// Two-dimensional slice over mode `mode` with the other mode fixed at `fixed`.
    Slice {
        mode: usize,
        re: Axis,
        im: Axis,
        fixed: Complex64,
    },
    /// Single-mode marginal of mode `mode` (the other mode integrated out).
    Marginal { mode: usize, re: Axis, im: Axis },
}

impl GridLayout {
    pub fn axes(&self) -> Vec<Axis> {
        match *self {
            GridLayout::Full { re1, im1, re2, im2 } => vec![re1, im1, re2, im2],
            GridLayout::Slice { re, im, .. } | GridLayout::Marginal { re, im, .. } => vec![re, im],
        }
    }

    pub fn len(&self) -> usize {
        self.axes().iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis indices of flat index `k` (first axis slowest).
    pub fn unravel(&self, mut k: usize) -> Vec<usize> {
        let axes = self.axes();
        let mut idx = vec![0; axes.len()];
        for (slot, axis) in idx.iter_mut().zip(axes.iter()).rev() {
            *slot = k % axis.count;
            k /= axis.count;
        }
        idx
    }

    fn check_mode(&self) -> Result<()> {
        match *self {
            GridLayout::Slice { mode, .. } | GridLayout::Marginal { mode, .. } if mode != 1 && mode != 2 => {
                Err(Error::BadModeIndex(mode))
            }
            _ => Ok(()),
        }
    }
}

/// Sampled quasidistribution.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    pub layout: GridLayout,
    /// row-major, first axis slowest
    pub values: Vec<f64>,
    /// trapezoidal estimate of the integral over the sampled region
    pub normalization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridResult {
    Values(GridValues),
    /// the relevant covariance is singular (delta-like distribution)
    Degenerate,
}

enum Density {
    Four(Gaussian4),
    Two(Gaussian2),
}

fn density_for(m: &NormalMoments, s: OrderingParameter, layout: &GridLayout) -> Result<Option<Density>> {
    Ok(match *layout {
        GridLayout::Full { .. } | GridLayout::Slice { .. } => gaussian4(m, s)?.map(Density::Four),
        GridLayout::Marginal { mode, .. } => gaussian2(m, s, mode)?.map(Density::Two),
    })
}

fn point_value(d: &Density, layout: &GridLayout, idx: &[usize]) -> f64 {
    match (d, layout) {
        (Density::Four(g), GridLayout::Full { re1, im1, re2, im2 }) => g.eval(
            Complex64::new(re1.point(idx[0]), im1.point(idx[1])),
            Complex64::new(re2.point(idx[2]), im2.point(idx[3])),
        ),
        (Density::Four(g), GridLayout::Slice { mode, re, im, fixed }) => {
            let a = Complex64::new(re.point(idx[0]), im.point(idx[1]));
            if *mode == 1 {
                g.eval(a, *fixed)
            } else {
                g.eval(*fixed, a)
            }
        }
        (Density::Two(g), GridLayout::Marginal { re, im, .. }) => {
            g.eval(Complex64::new(re.point(idx[0]), im.point(idx[1])))
        }
        _ => unreachable!("density and layout are built together"),
    }
}

fn point_weight(layout: &GridLayout, idx: &[usize]) -> f64 {
    let w: f64 = layout.axes().iter().zip(idx).map(|(a, &k)| a.weight(k)).product();
    // d²α/π per sampled mode
    w / std::f64::consts::PI.powi(idx.len() as i32 / 2)
}

/// Samples the quasidistribution on `layout`. Evaluation is parallel; the
/// output order is fixed.
pub fn qpd_grid(m: &NormalMoments, s: OrderingParameter, layout: &GridLayout) -> Result<GridResult> {
    layout.check_mode()?;
    let n = layout.len();
    if n > MAX_GRID_POINTS {
        return Err(Error::InvalidGrid(format!(
            "{n} points exceed the limit of {MAX_GRID_POINTS}; use qpd_normalization for large grids"
        )));
    }
    let Some(density) = density_for(m, s, layout)? else {
        return Ok(GridResult::Degenerate);
    };
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| point_value(&density, layout, &layout.unravel(k)))
        .collect();
    let normalization = values
        .iter()
        .enumerate()
        .map(|(k, v)| v * point_weight(layout, &layout.unravel(k)))
        .sum();
    Ok(GridResult::Values(GridValues {
        layout: *layout,
        values,
        normalization,
    }))
}

/// Trapezoidal integral of the quasidistribution over `layout` without
/// storing the samples; suitable for large four-dimensional grids.
/// Returns `None` for a degenerate covariance.
pub fn qpd_normalization(m: &NormalMoments, s: OrderingParameter, layout: &GridLayout) -> Result<Option<f64>> {
    layout.check_mode()?;
    let Some(density) = density_for(m, s, layout)? else {
        return Ok(None);
    };
    let axes = layout.axes();
    let outer = axes[0].count;
    // per-outer-index partial sums, combined in a fixed order
    let partial: Vec<f64> = (0..outer)
        .into_par_iter()
        .map(|k0| {
            let inner: usize = axes[1..].iter().map(|a| a.count).product();
            let mut sum = 0.0;
            for rest in 0..inner {
                let idx = layout.unravel(k0 * inner + rest);
                sum += point_value(&density, layout, &idx) * point_weight(layout, &idx);
            }
            sum
        })
        .collect();
    Ok(Some(partial.iter().sum()))
}

/// Exact value of the integral of a slice over the free mode: the marginal of
/// the fixed mode evaluated at the fixed point.
pub fn slice_integral(
    m: &NormalMoments,
    s: OrderingParameter,
    free_mode: usize,
    fixed: Complex64,
) -> Result<Option<f64>> {
    let other = match free_mode {
        1 => 2,
        2 => 1,
        _ => return Err(Error::BadModeIndex(free_mode)),
    };
    Ok(gaussian2(m, s, other)?.map(|g| g.eval(fixed)))
}
