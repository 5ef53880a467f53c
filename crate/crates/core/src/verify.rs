//! Self-check suites run by `twomode verify`: the passive conservation law,
//! the closed-form family results, ordering consistency, the Fock-space
//! oracle and the undamped Langevin solutions.
//!
//! Every check reduces to one worst-case deviation compared against a
//! threshold derived from [`Tolerances`].

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;

use crate::dynamics::{compare_with_factory, evolve_at_times, HamiltonianParams};
use crate::error::{Error, Result};
use crate::factories::{
    squeezed_vacuum, squeezed_vacuum_closed_form, twin_beam, twin_beam_closed_form, twin_plus_squeezed,
    twin_plus_squeezed_closed_form, two_squeezed, two_squeezed_closed_form, ClosedForm, SqueezedVacuumParams,
    TwinBeamParams, TwinPlusSqueezedParams, TwoSqueezedParams,
};
use crate::fockcheck::{
    auto_cutoff, bs_fock, fock_moments, log_negativity_fock, principal_squeeze_variance_fock, smsv_fock, tmsv_fock,
    FockState,
};
use crate::measures::{
    entanglement_indicator, global_ncl_invariant, local_ncl_invariant, log_negativity, log_negativity_pure,
    principal_squeeze_variance, tau_global,
};
use crate::qpd::{covariance_from_char_fn, qpd_existence, s_ordered_covariance, Existence, OrderingParameter};
use crate::sampling::{self, random_beam_splitter, random_classical, random_physical, random_pure, SampleRanges};
use crate::state::{apply_beam_splitter, apply_phase_shift, to_cov_symmetric, BeamSplitter, NormalMoments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Conservation,
    ClosedForm,
    Ordering,
    Fock,
    Dynamics,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Conservation,
        Suite::ClosedForm,
        Suite::Ordering,
        Suite::Fock,
        Suite::Dynamics,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Conservation => "conservation",
            Suite::ClosedForm => "closed_form",
            Suite::Ordering => "ordering",
            Suite::Fock => "fock",
            Suite::Dynamics => "dynamics",
        }
    }

    /// Process exit status when this is the first failing suite.
    pub fn exit_code(&self) -> i32 {
        match self {
            Suite::Conservation => 11,
            Suite::ClosedForm => 12,
            Suite::Ordering => 13,
            Suite::Fock => 14,
            Suite::Dynamics => 15,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "suite",
                reason: format!(
                    "unknown suite `{s}` (expected one of conservation, closed_form, ordering, fock, dynamics)"
                ),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// algebraic identities, relative to `max(1, |value|)`
    pub num: f64,
    /// Gaussian versus truncated-Fock comparisons
    pub oracle: f64,
    /// integrator tolerance; dynamics checks allow `100 * ode`
    pub ode: f64,
    /// Fock tail population
    pub tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            num: 1e-10,
            oracle: 1e-4,
            ode: 1e-10,
            tail: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub deviation: f64,
    pub threshold: f64,
}

impl Check {
    /// NaN deviations fail.
    pub fn passed(&self) -> bool {
        self.deviation <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_failure(&self) -> Option<Suite> {
        self.checks.iter().find(|c| !c.passed()).map(|c| c.suite)
    }

    pub fn exit_code(&self) -> i32 {
        self.first_failure().map_or(0, |s| s.exit_code())
    }

    /// One `check,deviation,threshold,pass` row per check.
    pub fn write_summary<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "check,deviation,threshold,pass")?;
        for c in &self.checks {
            writeln!(
                w,
                "{}/{},{:?},{:?},{}",
                c.suite,
                c.name,
                c.deviation,
                c.threshold,
                c.passed()
            )?;
        }
        Ok(())
    }
}

/// Running maximum that keeps NaN (a NaN deviation must not vanish).
fn worst(acc: f64, x: f64) -> f64 {
    if acc.is_nan() || x.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

struct Collector {
    suite: Suite,
    checks: Vec<Check>,
}

impl Collector {
    fn push(&mut self, name: &str, deviation: f64, threshold: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            deviation,
            threshold,
        });
    }

    /// Records `f`'s deviation, or NaN if it errored.
    fn run<F: FnOnce() -> Result<f64>>(&mut self, name: &str, threshold: f64, f: F) {
        let d = f().unwrap_or(f64::NAN);
        self.push(name, d, threshold);
    }
}

/// Number of random states per sampled check.
pub const SAMPLES: usize = 1000;

pub fn run(suites: &[Suite], seed: u64, tol: &Tolerances) -> Report {
    let mut report = Report::default();
    let mut ordered = suites.to_vec();
    ordered.sort();
    ordered.dedup();
    for suite in ordered {
        let mut c = Collector {
            suite,
            checks: Vec::new(),
        };
        match suite {
            Suite::Conservation => conservation(&mut c, seed, tol),
            Suite::ClosedForm => closed_form(&mut c, seed, tol),
            Suite::Ordering => ordering(&mut c, seed, tol),
            Suite::Fock => fock(&mut c, tol),
            Suite::Dynamics => dynamics(&mut c, tol),
        }
        report.checks.extend(c.checks);
    }
    report
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn conservation(c: &mut Collector, seed: u64, tol: &Tolerances) {
    let ranges = SampleRanges::default();
    c.run("beam_splitter", tol.num, || {
        let mut rng = sampling::rng(seed);
        let mut dev = 0.0f64;
        for _ in 0..SAMPLES {
            let m = random_physical(&mut rng, &ranges);
            let bs = random_beam_splitter(&mut rng);
            let before = global_ncl_invariant(&m)?;
            let after = global_ncl_invariant(&apply_beam_splitter(&m, &bs)?)?;
            dev = worst(dev, relative(before, after));
        }
        Ok(dev)
    });
    c.run("phase_shift", tol.num, || {
        let mut rng = sampling::rng(seed.wrapping_add(1));
        let mut dev = 0.0f64;
        for k in 0..SAMPLES {
            let m = random_physical(&mut rng, &ranges);
            let theta = 0.1 + 0.37 * k as f64;
            let shifted = apply_phase_shift(&apply_phase_shift(&m, 1, theta)?, 2, -0.6 * theta)?;
            dev = worst(
                dev,
                relative(global_ncl_invariant(&m)?, global_ncl_invariant(&shifted)?),
            );
            for mode in [1, 2] {
                let a = local_ncl_invariant(&m, mode)?;
                let b = local_ncl_invariant(&shifted, mode)?;
                dev = worst(dev, relative(a, b));
            }
            dev = worst(
                dev,
                relative(entanglement_indicator(&m), entanglement_indicator(&shifted)),
            );
        }
        Ok(dev)
    });
    c.run("beam_splitter_inverse", tol.num, || {
        let mut rng = sampling::rng(seed.wrapping_add(2));
        let mut dev = 0.0f64;
        for _ in 0..SAMPLES {
            let m = random_physical(&mut rng, &ranges);
            let bs = random_beam_splitter(&mut rng);
            let back = apply_beam_splitter(&apply_beam_splitter(&m, &bs)?, &bs.inverse())?;
            let scale = m.to_array().iter().map(|z| z.norm()).fold(1.0, f64::max);
            dev = worst(dev, back.max_abs_diff(&m) / scale);
        }
        Ok(dev)
    });
}

fn closed_form_dev(pipeline: &NormalMoments, bs: &BeamSplitter, cf: &ClosedForm, which: &[usize]) -> Result<f64> {
    let out = apply_beam_splitter(pipeline, bs)?;
    let got = [
        local_ncl_invariant(&out, 1)?,
        local_ncl_invariant(&out, 2)?,
        entanglement_indicator(&out),
        global_ncl_invariant(&out)?,
    ];
    let want = cf.as_array();
    Ok(which.iter().fold(0.0, |d, &k| worst(d, relative(got[k], want[k]))))
}

fn grid(n: usize, max: f64) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |k| max * k as f64 / (n - 1) as f64)
}

const ALL_FOUR: [usize; 4] = [0, 1, 2, 3];

fn closed_form(c: &mut Collector, seed: u64, tol: &Tolerances) {
    c.run("twin_noiseless", tol.num, || {
        let mut dev = 0.0;
        for bp in grid(25, 3.0) {
            for t in grid(25, 1.0) {
                let p = TwinBeamParams {
                    bp,
                    ..Default::default()
                };
                let bs = BeamSplitter::new(t, 0.0)?;
                dev = worst(
                    dev,
                    closed_form_dev(&twin_beam(&p)?, &bs, &twin_beam_closed_form(&p, t)?, &ALL_FOUR)?,
                );
            }
        }
        Ok(dev)
    });
    // with noise in both arms the printed I_ent differs; one-sided noise and
    // the other three quantities still agree
    c.run("twin_noisy", tol.num, || {
        let mut dev = 0.0;
        for bp in grid(8, 2.0) {
            for t in grid(8, 1.0) {
                for (bs, bi) in [(0.3, 0.0), (0.0, 0.7), (0.2, 0.4)] {
                    let p = TwinBeamParams { bp, bs, bi };
                    let which: &[usize] = if bs * bi == 0.0 { &ALL_FOUR } else { &[0, 1, 3] };
                    let split = BeamSplitter::new(t, 0.0)?;
                    dev = worst(
                        dev,
                        closed_form_dev(&twin_beam(&p)?, &split, &twin_beam_closed_form(&p, t)?, which)?,
                    );
                }
            }
        }
        Ok(dev)
    });
    c.run("squeezed_vacuum", tol.num, || {
        let mut dev = 0.0;
        for bp_sq in grid(25, 3.0) {
            for t in grid(25, 1.0) {
                for bs in [0.0, 0.2] {
                    let p = SqueezedVacuumParams { bp_sq, bs };
                    let split = BeamSplitter::new(t, 0.0)?;
                    dev = worst(
                        dev,
                        closed_form_dev(
                            &squeezed_vacuum(&p)?,
                            &split,
                            &squeezed_vacuum_closed_form(&p, t)?,
                            &ALL_FOUR,
                        )?,
                    );
                }
            }
        }
        Ok(dev)
    });
    c.run("two_squeezed", tol.num, || {
        let mut dev = 0.0;
        for k in 0..12 {
            let dtheta = std::f64::consts::PI * k as f64 / 6.0;
            for t in grid(9, 1.0) {
                for (bs, bi) in [(0.0, 0.0), (0.1, 0.2)] {
                    let p = TwoSqueezedParams {
                        bps: 1.0,
                        bpi: 0.5,
                        bs,
                        bi,
                        theta1: 0.3,
                        theta2: 0.3 + dtheta,
                    };
                    // the printed I_ent and I_ncl hold only without noise
                    let which: &[usize] = if bs == 0.0 && bi == 0.0 { &ALL_FOUR } else { &[0, 1] };
                    let split = BeamSplitter::new(t, 0.0)?;
                    dev = worst(
                        dev,
                        closed_form_dev(&two_squeezed(&p)?, &split, &two_squeezed_closed_form(&p, t)?, which)?,
                    );
                }
            }
        }
        Ok(dev)
    });
    c.run("twin_plus_squeezed", tol.num, || {
        let mut dev = 0.0;
        for bp in [0.0, 0.5, 1.0, 2.0] {
            for bp_sq in [0.0, 0.3, 1.0] {
                for t in grid(9, 1.0) {
                    for phi in [0.0, 0.4, std::f64::consts::FRAC_PI_2, 2.5] {
                        let p = TwinPlusSqueezedParams { bp, bp_sq };
                        let split = BeamSplitter::new(t, phi)?;
                        let cf = twin_plus_squeezed_closed_form(&p, t, phi)?;
                        dev = worst(dev, closed_form_dev(&twin_plus_squeezed(&p)?, &split, &cf, &ALL_FOUR)?);
                    }
                }
            }
        }
        Ok(dev)
    });
    c.run("pure_state_negativity", tol.num, || {
        let mut rng = sampling::rng(seed.wrapping_add(3));
        let mut dev = 0.0;
        for _ in 0..SAMPLES {
            let m = random_pure(&mut rng, &SampleRanges::default());
            let ient = entanglement_indicator(&m).max(0.0);
            dev = worst(dev, relative(log_negativity(&m)?, log_negativity_pure(ient)?));
        }
        Ok(dev)
    });
}

fn ordering(c: &mut Collector, seed: u64, tol: &Tolerances) {
    let ranges = SampleRanges::default();
    c.run("symmetric_from_shift", tol.num, || {
        let mut rng = sampling::rng(seed.wrapping_add(4));
        let mut dev = 0.0;
        for _ in 0..SAMPLES {
            let m = random_physical(&mut rng, &ranges);
            let d = (s_ordered_covariance(&m, 0.0) - to_cov_symmetric(&m).matrix()).amax();
            dev = worst(dev, d);
        }
        Ok(dev)
    });
    c.run("characteristic_function", tol.num, || {
        let mut rng = sampling::rng(seed.wrapping_add(5));
        let mut dev = 0.0;
        for k in 0..100 {
            let m = random_physical(&mut rng, &ranges);
            let s = OrderingParameter::new([-1.0, 0.0, 1.0][k % 3])?;
            let d = (covariance_from_char_fn(&m, s) - s_ordered_covariance(&m, s.value())).amax();
            let scale = s_ordered_covariance(&m, s.value()).amax().max(1.0);
            dev = worst(dev, d / scale);
        }
        Ok(dev)
    });
    // exact: the count of disagreements must be zero
    c.run("p_function_existence", 0.0, || {
        let mut rng = sampling::rng(seed.wrapping_add(6));
        let mut mismatches = 0usize;
        for k in 0..SAMPLES {
            let m = if k % 2 == 0 {
                random_physical(&mut rng, &ranges)
            } else {
                random_classical(&mut rng, &ranges)
            };
            let exists = qpd_existence(&m, OrderingParameter::NORMAL) != Existence::NonPositive;
            if exists != (tau_global(&m) == 0.0) {
                mismatches += 1;
            }
        }
        Ok(mismatches as f64)
    });
}

fn fock_state(make: impl Fn(usize) -> Result<FockState>, tail: f64) -> Result<FockState> {
    auto_cutoff(make, tail)
}

fn fock(c: &mut Collector, tol: &Tolerances) {
    let tail = tol.tail;
    c.run("tmsv_negativity", tol.oracle, || {
        let mut dev = 0.0;
        for bp in [0.25, 0.5, 1.0] {
            let f = fock_state(|n| tmsv_fock(bp, n, f64::INFINITY), tail)?;
            let g = twin_beam(&TwinBeamParams {
                bp,
                ..Default::default()
            })?;
            dev = worst(dev, (log_negativity_fock(&f, tail)? - log_negativity(&g)?).abs());
        }
        Ok(dev)
    });
    c.run("tmsv_moments", tol.oracle / 10.0, || {
        let mut dev = 0.0;
        for bp in [0.25, 0.5, 1.0] {
            let f = fock_state(|n| tmsv_fock(bp, n, f64::INFINITY), tail)?;
            let g = twin_beam(&TwinBeamParams {
                bp,
                ..Default::default()
            })?;
            dev = worst(dev, fock_moments(&f)?.max_abs_diff(&g));
        }
        Ok(dev)
    });
    c.run("smsv_squeeze_variance", tol.oracle / 10.0, || {
        let mut dev = 0.0;
        for bp_sq in [0.25, 0.5, 1.0] {
            let f = fock_state(|n| smsv_fock(bp_sq, n, f64::INFINITY), tail)?;
            let g = squeezed_vacuum(&SqueezedVacuumParams { bp_sq, bs: 0.0 })?;
            dev = worst(
                dev,
                (principal_squeeze_variance_fock(&f, 1)? - principal_squeeze_variance(&g, 1)?).abs(),
            );
        }
        Ok(dev)
    });
    c.run("smsv_split_negativity", tol.oracle, || {
        let mut dev = 0.0;
        for (bp_sq, t) in [(0.5, 0.5), (1.0, 0.5), (1.0, 0.3)] {
            let f = fock_state(|n| smsv_fock(bp_sq, n, f64::INFINITY), tail)?;
            let out = bs_fock(&f, t, 0.0)?;
            let g = apply_beam_splitter(
                &squeezed_vacuum(&SqueezedVacuumParams { bp_sq, bs: 0.0 })?,
                &BeamSplitter::new(t, 0.0)?,
            )?;
            // the output lives on twice the input cutoff; its tail is the input's
            dev = worst(
                dev,
                (log_negativity_fock(&out, f64::INFINITY)? - log_negativity(&g)?).abs(),
            );
        }
        Ok(dev)
    });
    c.run("beam_splitter_moments", tol.oracle / 10.0, || {
        let mut dev = 0.0;
        for (t, phi) in [(0.5, 0.0), (0.3, 0.7), (0.8, -1.1)] {
            let f = fock_state(|n| tmsv_fock(0.5, n, f64::INFINITY), tail)?;
            let out = fock_moments(&bs_fock(&f, t, phi)?)?;
            let g = apply_beam_splitter(
                &twin_beam(&TwinBeamParams {
                    bp: 0.5,
                    ..Default::default()
                })?,
                &BeamSplitter::new(t, phi)?,
            )?;
            dev = worst(dev, out.max_abs_diff(&g));
        }
        Ok(dev)
    });
    c.run("hong_ou_mandel", tol.num, || {
        let out = bs_fock(&FockState::basis(1, 1, 2)?, 0.5, 0.0)?;
        Ok(out.get(1, 1).norm())
    });
    c.run("unitarity", tol.num, || {
        let f = fock_state(|n| tmsv_fock(1.0, n, f64::INFINITY), tail)?;
        let out = bs_fock(&f, 0.37, 0.9)?;
        Ok((out.norm_sqr() - f.norm_sqr())
            .abs()
            .max((out.total_photons() - f.total_photons()).abs() / f.total_photons().max(1.0)))
    });
}

fn dynamics(c: &mut Collector, tol: &Tolerances) {
    let threshold = 100.0 * tol.ode;
    let real = |x: f64| Complex64::new(x, 0.0);
    c.run("twin_generation", threshold, || {
        let mut dev = 0.0;
        for t in [0.5, 1.0, 2.0] {
            let p = HamiltonianParams {
                g12: real(0.5),
                t,
                ..Default::default()
            };
            dev = worst(dev, compare_with_factory(&p, "twin", tol.ode)?);
        }
        Ok(dev)
    });
    c.run("squeezed_generation", threshold, || {
        let mut dev = 0.0;
        for t in [0.5, 1.0, 2.0] {
            let p = HamiltonianParams {
                g11: real(0.25),
                t,
                ..Default::default()
            };
            dev = worst(dev, compare_with_factory(&p, "squeezed", tol.ode)?);
            let p = HamiltonianParams {
                g11: real(0.25),
                g22: real(0.25),
                g12: real(0.5),
                t,
                ..Default::default()
            };
            dev = worst(dev, compare_with_factory(&p, "mixed", tol.ode)?);
        }
        Ok(dev)
    });
    c.run("damped_steady_state", threshold, || {
        let p = HamiltonianParams {
            gamma1: 1.0,
            gamma2: 1.5,
            nd1: 0.5,
            nd2: 0.2,
            ..Default::default()
        };
        let (states, _) = evolve_at_times(&p, &NormalMoments::vacuum(), &[40.0], tol.ode)?;
        let m = states[0];
        Ok((m.b1() - 0.5).abs().max((m.b2() - 0.2).abs()))
    });
}
