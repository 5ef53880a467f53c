//! Adaptive Dormand–Prince 5(4) integrator for small dense real systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Options {
    /// Absolute and relative tolerance both set to `tol`.
    pub fn with_tol(tol: f64) -> Self {
        Self {
            atol: tol,
            rtol: tol,
            max_steps: 10_000_000,
        }
    }
}

impl Default for Options {
    fn default() -> Self {
        Self::with_tol(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` to `t1` in place, calling `observer`
/// after every accepted step.
pub fn integrate<F, O>(f: F, t0: f64, t1: f64, y: &mut [f64], opts: &Options, mut observer: O) -> Result<Stats>
where
    F: Fn(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
{
    let mut stats = Stats::default();
    if t1 == t0 {
        return Ok(stats);
    }
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::IntegrationFailure {
            t: t0,
            reason: format!("bad interval [{t0}, {t1}]"),
        });
    }
    let n = y.len();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut err = vec![0.0; n];

    let scale = |a: f64, b: f64| opts.atol + opts.rtol * a.abs().max(b.abs());
    let rms = |v: &[f64], w: &[f64], x: &[f64]| {
        (v.iter()
            .zip(w)
            .zip(x)
            .map(|((e, a), b)| (e / scale(*a, *b)).powi(2))
            .sum::<f64>()
            / n.max(1) as f64)
            .sqrt()
    };

    f(t0, y, &mut k[0]);
    let mut h = initial_step(&f, t0, y, &k[0], opts, t1 - t0);
    let mut t = t0;
    let mut last_factor_limited = false;

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("exceeded {} steps", opts.max_steps),
            });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 1e-15 * t.abs().max(1.0) && !last {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        let stage = |coef: &[(usize, f64)], tmp: &mut [f64], k: &[Vec<f64>]| {
            for i in 0..n {
                let mut acc = y[i];
                for &(j, a) in coef {
                    acc += h * a * k[j][i];
                }
                tmp[i] = acc;
            }
        };
        stage(&[(0, A21)], &mut tmp, &k);
        f(t + C2 * h, &tmp, &mut k[1]);
        stage(&[(0, A31), (1, A32)], &mut tmp, &k);
        f(t + C3 * h, &tmp, &mut k[2]);
        stage(&[(0, A41), (1, A42), (2, A43)], &mut tmp, &k);
        f(t + C4 * h, &tmp, &mut k[3]);
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &mut tmp, &k);
        f(t + C5 * h, &tmp, &mut k[4]);
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &mut tmp, &k);
        f(t + h, &tmp, &mut k[5]);
        stage(&[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)], &mut ynew, &k);
        f(t + h, &ynew, &mut k[6]);
        for i in 0..n {
            err[i] = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
        }
        let e = rms(&err, y, &ynew);
        if !e.is_finite() || ynew.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationFailure {
                t,
                reason: "non-finite state".into(),
            });
        }

        if e <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            stats.accepted += 1;
            observer(t, y);
            let factor = if e == 0.0 {
                5.0
            } else {
                (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
            };
            // no growth right after a rejection
            h *= if last_factor_limited { factor.min(1.0) } else { factor };
            last_factor_limited = false;
        } else {
            stats.rejected += 1;
            h *= (0.9 * e.powf(-0.2)).clamp(0.2, 1.0);
            last_factor_limited = true;
        }
    }
    Ok(stats)
}

fn initial_step<F>(f: &F, t0: f64, y0: &[f64], f0: &[f64], opts: &Options, span: f64) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y0.len().max(1) as f64;
    let sc: Vec<f64> = y0.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / n).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + h0 * d).collect();
    let mut f1 = vec![0.0; y0.len()];
    f(t0 + h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut y = [1.0];
        let stats = integrate(
            |_, y, d| d[0] = -y[0],
            0.0,
            3.0,
            &mut y,
            &Options::with_tol(1e-12),
            |_, _| {},
        )
        .unwrap();
        assert!((y[0] - (-3f64).exp()).abs() < 1e-11);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn harmonic_oscillator_and_observer() {
        let mut y = [1.0, 0.0];
        let mut last_t = 0.0;
        let mut calls = 0;
        integrate(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            0.0,
            10.0,
            &mut y,
            &Options::with_tol(1e-11),
            |t, _| {
                assert!(t > last_t);
                last_t = t;
                calls += 1;
            },
        )
        .unwrap();
        assert_eq!(last_t, 10.0);
        assert!(calls > 10);
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn zero_span_and_step_limit() {
        let mut y = [2.0];
        integrate(|_, _, d| d[0] = 1.0, 1.0, 1.0, &mut y, &Options::default(), |_, _| {}).unwrap();
        assert_eq!(y[0], 2.0);
        let opts = Options {
            max_steps: 3,
            ..Options::with_tol(1e-14)
        };
        let r = integrate(|_, y, d| d[0] = y[0].sin() * 50.0, 0.0, 100.0, &mut y, &opts, |_, _| {});
        assert!(matches!(r, Err(Error::IntegrationFailure { .. })));
    }
}
