//! Acceptance criteria 1–13. Each test prints one `criterion N ...: PASS|FAIL`
//! line (run with `--nocapture` to see them) and fails if its criterion does.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use twomode::cli::{cmd_sweep, sweep_spec, ConfigFile, RunConfig};
use twomode::dynamics::{evolve_at_times, HamiltonianParams};
use twomode::factories::{
    squeezed_vacuum, twin_beam, twin_plus_squeezed, two_squeezed, SqueezedVacuumParams, TwinBeamParams,
    TwinPlusSqueezedParams, TwoSqueezedParams,
};
use twomode::fockcheck::{
    bs_fock, fock_moments, log_negativity_fock, principal_squeeze_variance_fock, smsv_fock, tmsv_fock, FockState,
};
use twomode::measures::{
    entanglement_indicator, global_ncl_invariant, local_ncl_invariant, log_negativity, log_negativity_pure,
    log_negativity_raw, principal_squeeze_variance, tau_global, tau_local,
};
use twomode::qpd::{qpd_existence, s_ordered_covariance, Existence, OrderingParameter};
use twomode::sampling::{self, random_beam_splitter, random_classical, random_physical, SampleRanges};
use twomode::state::{apply_beam_splitter, to_cov_symmetric, BeamSplitter, NormalMoments};

/// Prints the verdict line and returns whether the check passed.
fn verdict(n: u32, what: &str, deviation: f64, threshold: f64) -> bool {
    let pass = deviation <= threshold;
    println!(
        "criterion {n:>2} {what}: {} (deviation {deviation:.3e}, threshold {threshold:.1e})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn split(m: &NormalMoments, t: f64, phi: f64) -> NormalMoments {
    apply_beam_splitter(m, &BeamSplitter::new(t, phi).unwrap()).unwrap()
}

fn twin(bp: f64, bs: f64, bi: f64) -> NormalMoments {
    twin_beam(&TwinBeamParams { bp, bs, bi }).unwrap()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Root of a sign change of `f` in `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change in [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

// Independent symmetric-ordering covariance, written out from the moments:
// quadratures x = (a + a†)/√2, p = (a - a†)/(i√2), ordering (x1, p1, x2, p2).
fn sigma_oracle(m: &NormalMoments) -> Matrix4<f64> {
    let mut s = Matrix4::zeros();
    let local = |b: f64, c: Complex64| [[b + c.re + 0.5, c.im], [c.im, b - c.re + 0.5]];
    for (off, b, c) in [(0, m.b1(), m.c1()), (2, m.b2(), m.c2())] {
        let l = local(b, c);
        for i in 0..2 {
            for j in 0..2 {
                s[(off + i, off + j)] = l[i][j];
            }
        }
    }
    // cross block from the normally ordered one; D̄ carries the sign it has in A_N
    let (d, db) = (m.d12(), m.dbar12());
    let x1x2 = (d - db).re;
    let x1p2 = (d - db).im;
    let p1x2 = (d + db).im;
    let p1p2 = -(d + db).re;
    let cross = [[x1x2, x1p2], [p1x2, p1p2]];
    for i in 0..2 {
        for j in 0..2 {
            s[(i, 2 + j)] = cross[i][j];
            s[(2 + j, i)] = cross[i][j];
        }
    }
    s
}

fn omega() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Symplectic eigenvalues from `σ^{1/2} Ω σ^{1/2}` (ascending).
fn symplectic_numeric(sigma: &Matrix4<f64>) -> [f64; 2] {
    let e = SymmetricEigen::new(*sigma);
    let root = e.eigenvectors * Matrix4::from_diagonal(&e.eigenvalues.map(f64::sqrt)) * e.eigenvectors.transpose();
    let k = root * omega() * root;
    let mut nu: Vec<f64> = SymmetricEigen::new(k.transpose() * k)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    nu.sort_by(f64::total_cmp);
    [0.5 * (nu[0] + nu[1]), 0.5 * (nu[2] + nu[3])]
}

/// `E_N` from the numerically diagonalized partial transpose.
fn log_negativity_oracle(m: &NormalMoments) -> f64 {
    let mut flip = Matrix4::identity();
    flip[(3, 3)] = -1.0;
    let pt = flip * sigma_oracle(m) * flip;
    (-(2.0 * symplectic_numeric(&pt)[0]).ln()).max(0.0)
}

#[test]
fn criterion_01_conservation_under_beam_splitters() {
    let mut rng = sampling::rng(20240101);
    let ranges = SampleRanges::default();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = random_physical(&mut rng, &ranges);
        let bs = random_beam_splitter(&mut rng);
        let before = global_ncl_invariant(&m).unwrap();
        let after = global_ncl_invariant(&apply_beam_splitter(&m, &bs).unwrap()).unwrap();
        worst = worst.max((after - before).abs() / before.abs().max(1.0));
    }
    assert!(verdict(1, "I_ncl conserved, 1000 random states", worst, 1e-10));
}

#[test]
fn criterion_02_noiseless_twin_beam() {
    let mut dev_forms = 0.0f64;
    let mut dev_global = 0.0f64;
    let mut dev_balanced = 0.0f64;
    for bp in linspace(0.0, 3.0, 50) {
        let pairs = bp * bp + bp;
        for t in linspace(0.0, 1.0, 50) {
            let r = 1.0 - t;
            let out = split(&twin(bp, 0.0, 0.0), t, 0.0);
            let local = 4.0 * t * r * pairs - bp * bp;
            let ient = (t - r).powi(2) * pairs;
            dev_forms = dev_forms
                .max((local_ncl_invariant(&out, 1).unwrap() - local).abs())
                .max((local_ncl_invariant(&out, 2).unwrap() - local).abs())
                .max((entanglement_indicator(&out) - ient).abs());
            dev_global = dev_global.max((global_ncl_invariant(&out).unwrap() - 2.0 * bp).abs());
        }
        dev_balanced = dev_balanced.max(entanglement_indicator(&split(&twin(bp, 0.0, 0.0), 0.5, 0.0)).abs());
    }
    let a = verdict(2, "local and entanglement invariants on 50x50 grid", dev_forms, 1e-10);
    let b = verdict(2, "I_ncl = 2 B_p", dev_global, 1e-12);
    let c = verdict(2, "I_ent = 0 at T = 1/2", dev_balanced, 1e-12);
    assert!(a && b && c);
}

#[test]
fn criterion_03_local_nonclassicality_window() {
    let incl1 = |t: f64| local_ncl_invariant(&split(&twin(3.0, 0.0, 0.0), t, 0.0), 1).unwrap();
    let lo = bisect(incl1, 0.0, 0.5);
    let hi = bisect(incl1, 0.5, 1.0);
    let dev = (lo - 0.25).abs().max((hi - 0.75).abs());
    println!("    crossings at T = {lo:.15}, {hi:.15}");
    assert!(verdict(3, "zero crossings of I_ncl^(1)(T) at B_p = 3", dev, 1e-9));
}

#[test]
fn criterion_04_separability_threshold() {
    let en = |bp: f64| log_negativity_raw(&twin(bp, 0.1, 0.1)).unwrap();
    let root = bisect(en, 0.0, 0.1);
    println!("    E_N changes sign at B_p = {root:.15}");
    // the clipped E_N vanishes below and is positive above
    assert_eq!(log_negativity(&twin(0.9 * root, 0.1, 0.1)).unwrap(), 0.0);
    assert!(log_negativity(&twin(1.1 * root, 0.1, 0.1)).unwrap() > 0.0);
    assert!(verdict(
        4,
        "E_N threshold at B_s = B_i = 0.1",
        (root - 0.0125).abs(),
        1e-9
    ));
}

#[test]
fn criterion_05_squeezed_vacuum() {
    let mut dev = 0.0f64;
    for bs in [0.0, 0.15] {
        for bq in linspace(0.0, 3.0, 50) {
            let total = bq * (1.0 - 2.0 * bs) - bs * bs;
            for t in linspace(0.0, 1.0, 50) {
                let r = 1.0 - t;
                let out = split(
                    &squeezed_vacuum(&SqueezedVacuumParams { bp_sq: bq, bs }).unwrap(),
                    t,
                    0.0,
                );
                dev = dev
                    .max((local_ncl_invariant(&out, 1).unwrap() - t * t * total).abs())
                    .max((local_ncl_invariant(&out, 2).unwrap() - r * r * total).abs())
                    .max((entanglement_indicator(&out) - t * r * total).abs())
                    .max((global_ncl_invariant(&out).unwrap() - total).abs());
            }
        }
    }
    let a = verdict(5, "closed forms on 50x50 grids (B_s = 0, 0.15)", dev, 1e-10);
    let mut dev_bound = 0.0f64;
    for bq in [0.25, 1.0, 2.5] {
        let g =
            |bs: f64| global_ncl_invariant(&squeezed_vacuum(&SqueezedVacuumParams { bp_sq: bq, bs }).unwrap()).unwrap();
        let root = bisect(g, 0.0, 1.0);
        dev_bound = dev_bound.max((root - ((bq * (bq + 1.0)).sqrt() - bq)).abs());
    }
    let b = verdict(5, "sign flip of I_ncl at the noise bound", dev_bound, 1e-9);
    assert!(a && b);
}

/// The printed two-squeezed-vacua expressions, with `B̃_p^2` in the last
/// bracket of `I_ent` read as the idler squeezed-photon number.
fn two_squeezed_printed(s: f64, i: f64, bs: f64, bi: f64, dtheta: f64, t: f64) -> [f64; 4] {
    let r = 1.0 - t;
    let dp = 2.0 * (s * (s + 1.0) * i * (i + 1.0)).sqrt();
    let c = dtheta.cos();
    let local = |s: f64, i: f64, bs: f64, bi: f64| {
        t * t * s * (s + 1.0) + r * r * i * (i + 1.0) + t * r * dp * c - (t * s + r * i + t * bs + r * bi).powi(2)
    };
    let (b1, b2) = (s + bs, i + bi);
    let incl = b1 + b2
        - 2.0 * bs * bi * (2.0 * b1 * (1.0 + i) + 2.0 * i * (1.0 + b1) + bi * (1.0 + 2.0 * b1) + bs * (1.0 + 2.0 * b2))
        - 2.0 * (bs * b1 + bi * b2)
        - (bs + bi).powi(2);
    let ient = t * r * (-dp * c + (s + i + 2.0 * s * i) - (bs + bi).powi(2) - 2.0 * (s - i) * (bs - bi))
        + bs * bi * (2.0 * s * (1.0 + bi) + 2.0 * i * (1.0 + bs) + 4.0 * s * i + (1.0 + bs) * (1.0 + bi));
    [local(s, i, bs, bi), local(i, s, bi, bs), ient, incl]
}

fn two_squeezed_pipeline(s: f64, i: f64, bs: f64, bi: f64, theta1: f64, theta2: f64, t: f64) -> [f64; 4] {
    let p = TwoSqueezedParams {
        bps: s,
        bpi: i,
        bs,
        bi,
        theta1,
        theta2,
    };
    let out = split(&two_squeezed(&p).unwrap(), t, 0.0);
    [
        local_ncl_invariant(&out, 1).unwrap(),
        local_ncl_invariant(&out, 2).unwrap(),
        entanglement_indicator(&out),
        global_ncl_invariant(&out).unwrap(),
    ]
}

#[test]
fn criterion_06_two_squeezed_vacua() {
    // equal phases, equal intensities: no entanglement at any T
    let mut dev_zero_phase = 0.0f64;
    for b in [0.3, 1.0, 2.0] {
        for t in linspace(0.0, 1.0, 101) {
            let v = two_squeezed_pipeline(b, b, 0.0, 0.0, FRAC_PI_2, FRAC_PI_2, t);
            dev_zero_phase = dev_zero_phase.max(v[2].abs());
        }
    }
    let a = verdict(
        6,
        "I_ent = 0 for equal phases and intensities, all T",
        dev_zero_phase,
        1e-12,
    );

    // opposite phases, balanced splitter: the local invariants are claimed to vanish
    let anti = two_squeezed_pipeline(1.0, 1.0, 0.0, 0.0, FRAC_PI_2, 1.5 * PI, 0.5);
    let dev_anti = anti[0].abs().max(anti[1].abs());
    let p = TwoSqueezedParams {
        bps: 1.0,
        bpi: 1.0,
        theta1: FRAC_PI_2,
        theta2: 1.5 * PI,
        ..Default::default()
    };
    let out = split(&two_squeezed(&p).unwrap(), 0.5, 0.0);
    println!(
        "    at dtheta = pi, T = 1/2, B = 1: I_ncl^(1,2) = {:.3e}, {:.3e}; |C_1| = {:.1e}, |C_2| = {:.1e}, clipped tau_1 = {}, tau_2 = {}; printed form gives {:.3e}",
        anti[0],
        anti[1],
        out.c1().norm(),
        out.c2().norm(),
        tau_local(&out, 1).unwrap().1,
        tau_local(&out, 2).unwrap().1,
        two_squeezed_printed(1.0, 1.0, 0.0, 0.0, PI, 0.5)[0],
    );
    let b = verdict(6, "I_ncl^(j) = 0 at dtheta = pi, T = 1/2", dev_anti, 1e-12);

    // printed expressions against the pipeline, reported but not enforced
    let mut printed_dev = [0.0f64; 4];
    let mut internal = 0.0f64;
    for (s, i, bs, bi) in [
        (1.0, 1.0, 0.0, 0.0),
        (1.0, 0.5, 0.0, 0.0),
        (1.0, 0.5, 0.1, 0.2),
        (0.4, 2.0, 0.3, 0.0),
    ] {
        for k in 0..12 {
            let dtheta = PI * k as f64 / 6.0;
            for t in linspace(0.0, 1.0, 11) {
                let pipe = two_squeezed_pipeline(s, i, bs, bi, 0.2, 0.2 - dtheta, t);
                let printed = two_squeezed_printed(s, i, bs, bi, dtheta, t);
                for q in 0..4 {
                    printed_dev[q] = printed_dev[q].max(rel(pipe[q], printed[q]));
                }
                internal = internal.max(rel(pipe[0] + pipe[1] + 2.0 * pipe[2], pipe[3]));
            }
        }
    }
    for (q, name) in ["I_ncl^(1)", "I_ncl^(2)", "I_ent", "I_ncl"].iter().enumerate() {
        let note = if printed_dev[q] > 1e-9 {
            "printed-formula discrepancy"
        } else {
            "agrees"
        };
        println!(
            "    printed {name} vs pipeline: max relative deviation {:.3e} ({note})",
            printed_dev[q]
        );
    }
    let c = verdict(6, "pipeline I_ncl = I_ncl^(1) + I_ncl^(2) + 2 I_ent", internal, 1e-12);
    let d = verdict(
        6,
        "printed local invariants match the pipeline",
        printed_dev[0].max(printed_dev[1]),
        1e-9,
    );
    assert!(a && c && d, "pipeline-internal checks failed");
    assert!(b, "I_ncl^(j) at dtheta = pi, T = 1/2 is {anti:?}, not 0");
}

#[test]
fn criterion_07_twin_plus_squeezed_balance() {
    let m = twin_plus_squeezed(&TwinPlusSqueezedParams { bp: 1.0, bp_sq: 1.0 }).unwrap();
    let out = split(&m, 0.5, FRAC_PI_2);
    let v = [
        local_ncl_invariant(&out, 1).unwrap(),
        local_ncl_invariant(&out, 2).unwrap(),
        entanglement_indicator(&out),
    ];
    let dev = v.iter().map(|x| (x - 2.0).abs()).fold(0.0, f64::max);
    println!("    incl1, incl2, ient = {v:?}");
    assert!(verdict(7, "incl1 = incl2 = ient = 2", dev, 1e-12));
}

#[test]
fn criterion_08_pure_state_negativity() {
    let mut rng = sampling::rng(8);
    let mut dev = 0.0f64;
    let mut oracle_dev = 0.0f64;
    for k in 0..400 {
        let a = 0.05 + 1.5 * (k % 20) as f64 / 19.0;
        let b = 0.05 + 1.2 * (k / 20) as f64 / 19.0;
        let states = [
            twin(a, 0.0, 0.0),
            squeezed_vacuum(&SqueezedVacuumParams { bp_sq: a, bs: 0.0 }).unwrap(),
            two_squeezed(&TwoSqueezedParams {
                bps: a,
                bpi: b,
                theta1: 0.3 * k as f64,
                theta2: 1.1,
                ..Default::default()
            })
            .unwrap(),
            twin_plus_squeezed(&TwinPlusSqueezedParams { bp: a, bp_sq: b }).unwrap(),
        ];
        for m in states {
            let out = apply_beam_splitter(&m, &random_beam_splitter(&mut rng)).unwrap();
            let ient = entanglement_indicator(&out);
            let en = log_negativity(&out).unwrap();
            // a pure state has I_ent >= 0 up to rounding
            let pure = log_negativity_pure(ient.max(0.0)).unwrap();
            dev = dev.max(rel(en, pure));
            oracle_dev = oracle_dev.max((en - log_negativity_oracle(&out)).abs());
        }
    }
    let a = verdict(8, "E_N = pure-state formula of I_ent, four families", dev, 1e-10);
    println!("    E_N vs numerically diagonalized partial transpose: {oracle_dev:.3e}");
    assert!(a && oracle_dev < 1e-8);
}

fn fock_tmsv(bp: f64) -> FockState {
    tmsv_fock(bp, 40, 1e-8).unwrap()
}

#[test]
fn criterion_09_fock_oracle() {
    let mut en_dev = 0.0f64;
    let mut lambda_dev = 0.0f64;
    for bp in [0.25, 0.5, 1.0] {
        let f = fock_tmsv(bp);
        let g = twin(bp, 0.0, 0.0);
        en_dev = en_dev.max((log_negativity_fock(&f, 1e-8).unwrap() - log_negativity(&g).unwrap()).abs());
        for j in [1, 2] {
            lambda_dev = lambda_dev.max(
                (principal_squeeze_variance_fock(&f, j).unwrap() - principal_squeeze_variance(&g, j).unwrap()).abs(),
            );
        }
        // the same state split on a beam splitter, compared on both routes
        for (t, phi) in [(0.5, 0.0), (0.3, 1.0)] {
            let fo = bs_fock(&f, t, phi).unwrap();
            let go = split(&g, t, phi);
            en_dev =
                en_dev.max((log_negativity_fock(&fo, f64::INFINITY).unwrap() - log_negativity(&go).unwrap()).abs());
            for j in [1, 2] {
                lambda_dev = lambda_dev.max(
                    (principal_squeeze_variance_fock(&fo, j).unwrap() - principal_squeeze_variance(&go, j).unwrap())
                        .abs(),
                );
            }
        }
    }
    let a = verdict(
        9,
        "Gaussian vs Fock E_N, two-mode squeezed vacuum, cutoff 40",
        en_dev,
        1e-4,
    );

    // B = 1 single-mode squeezing leaves 8e-8 of norm above n = 40, so the
    // cutoff-40 state needs a looser tail tolerance, and the entanglement made
    // from it by a beam splitter carries the truncation at amplitude level
    let smsv_split_en = |bq: f64, cutoff: usize| {
        let f = smsv_fock(bq, cutoff, 1e-6).unwrap();
        let g = squeezed_vacuum(&SqueezedVacuumParams { bp_sq: bq, bs: 0.0 }).unwrap();
        (log_negativity_fock(&bs_fock(&f, 0.5, 0.0).unwrap(), f64::INFINITY).unwrap()
            - log_negativity(&split(&g, 0.5, 0.0)).unwrap())
        .abs()
    };
    let mut smsv_en_dev = 0.0f64;
    for bq in [0.25, 0.5, 1.0] {
        let f = smsv_fock(bq, 40, 1e-6).unwrap();
        let g = squeezed_vacuum(&SqueezedVacuumParams { bp_sq: bq, bs: 0.0 }).unwrap();
        lambda_dev = lambda_dev
            .max((principal_squeeze_variance_fock(&f, 1).unwrap() - principal_squeeze_variance(&g, 1).unwrap()).abs());
        let fo = bs_fock(&f, 0.5, 0.0).unwrap();
        let go = split(&g, 0.5, 0.0);
        let dev = smsv_split_en(bq, 40);
        println!(
            "    squeezed vacuum B = {bq} split at T = 1/2: E_N deviation {dev:.3e} at cutoff 40, {:.3e} at cutoff 60",
            smsv_split_en(bq, 60)
        );
        smsv_en_dev = smsv_en_dev.max(dev);
        for j in [1, 2] {
            lambda_dev = lambda_dev.max(
                (principal_squeeze_variance_fock(&fo, j).unwrap() - principal_squeeze_variance(&go, j).unwrap()).abs(),
            );
        }
    }
    let d = verdict(
        9,
        "Gaussian vs Fock E_N, split squeezed vacuum, cutoff 40",
        smsv_en_dev,
        1e-4,
    );
    let b = verdict(9, "Gaussian vs Fock lambda_j at cutoff 40", lambda_dev, 1e-5);
    let hom = bs_fock(&FockState::basis(1, 1, 1).unwrap(), 0.5, 0.0).unwrap();
    let c = verdict(9, "Hong-Ou-Mandel |1,1> amplitude", hom.get(1, 1).norm(), 1e-12);
    let two = |n1, n2| hom.get(n1, n2).norm_sqr();
    assert!((two(2, 0) - 0.5).abs() < 1e-12 && (two(0, 2) - 0.5).abs() < 1e-12);
    // moments of the split TMSV also agree
    let m = fock_moments(&bs_fock(&fock_tmsv(1.0), 0.5, 0.0).unwrap()).unwrap();
    assert!((m.c1().norm() - SQRT_2).abs() < 1e-5);
    assert!(a && b && c, "two-mode squeezed vacuum or Hong-Ou-Mandel checks failed");
    assert!(
        d,
        "split squeezed vacuum E_N at cutoff 40 is truncation-limited: {smsv_en_dev:e}"
    );
}

#[test]
fn criterion_10_dynamics() {
    let times = linspace(0.0, 2.0, 41);
    let real = |x: f64| Complex64::new(x, 0.0);
    let tol = 1e-13;
    let run = |p: HamiltonianParams| evolve_at_times(&p, &NormalMoments::vacuum(), &times, tol).unwrap().0;

    let g12 = 1.0;
    let pairs = run(HamiltonianParams {
        g12: real(g12),
        ..Default::default()
    });
    let g = 0.5;
    let squeezed = run(HamiltonianParams {
        g11: real(g),
        ..Default::default()
    });
    let mut dev = 0.0f64;
    for ((t, p), s) in times.iter().zip(&pairs).zip(&squeezed) {
        let bp = (g12 * t).sinh().powi(2);
        let bq = (2.0 * g * t).sinh().powi(2);
        dev = dev
            .max((p.b1() - bp).abs())
            .max((p.b2() - bp).abs())
            .max((p.d12().norm() - (bp * (bp + 1.0)).sqrt()).abs())
            .max((s.b1() - bq).abs())
            .max((s.c1().norm() - (bq * (bq + 1.0)).sqrt()).abs());
    }
    let a = verdict(
        10,
        "undamped B_p = sinh^2(g12 t), squeezed sinh^2(2 g t), t <= 2",
        dev,
        1e-8,
    );

    let damped = HamiltonianParams {
        gamma1: 1.0,
        gamma2: 0.6,
        nd1: 0.5,
        nd2: 1.3,
        ..Default::default()
    };
    let (late, _) = evolve_at_times(&damped, &NormalMoments::vacuum(), &[60.0], 1e-12).unwrap();
    let steady = (late[0].b1() - 0.5).abs().max((late[0].b2() - 1.3).abs());
    let b = verdict(10, "damped steady state B_j = n_d", steady, 1e-8);
    assert!(a && b);
}

#[test]
fn criterion_11_ordering_consistency() {
    let mut rng = sampling::rng(11);
    let ranges = SampleRanges::default();
    let mut dev = 0.0f64;
    let mut mismatches = 0;
    let mut nonclassical = 0;
    for k in 0..1000 {
        let m = if k % 4 == 3 {
            random_classical(&mut rng, &ranges)
        } else {
            random_physical(&mut rng, &ranges)
        };
        let shifted = s_ordered_covariance(&m, 0.0);
        dev = dev
            .max((shifted - sigma_oracle(&m)).amax())
            .max((shifted - to_cov_symmetric(&m).matrix()).amax());
        let p_exists = qpd_existence(&m, OrderingParameter::NORMAL) != Existence::NonPositive;
        let classical = tau_global(&m) == 0.0;
        if !classical {
            nonclassical += 1;
        }
        if p_exists != classical {
            mismatches += 1;
        }
    }
    println!("    {nonclassical} of 1000 states nonclassical");
    let a = verdict(11, "s = 0 covariance from the ordering shift", dev, 1e-12);
    let b = verdict(
        11,
        "regular P function iff tau = 0 (mismatch count)",
        mismatches as f64,
        0.0,
    );
    assert!(a && b);
}

#[test]
fn criterion_12_negativity_monotone_in_ient() {
    let mut rng = sampling::rng(12);
    let ranges = SampleRanges::default();
    let mut violation = 0.0f64;
    let mut oracle_dev = 0.0f64;
    let mut entangled_pairs = 0;
    for _ in 0..10_000 {
        let (nu1, nu2) = sampling::random_spectrum(&mut rng, &ranges);
        let a = sampling::random_with_spectrum(&mut rng, nu1, nu2, &ranges);
        let b = sampling::random_with_spectrum(&mut rng, nu1, nu2, &ranges);
        let (ia, ib) = (entanglement_indicator(&a), entanglement_indicator(&b));
        let (ea, eb) = (log_negativity(&a).unwrap(), log_negativity(&b).unwrap());
        let (lo_e, hi_e) = if ia <= ib { (ea, eb) } else { (eb, ea) };
        violation = violation.max(lo_e - hi_e);
        if ea > 0.0 && eb > 0.0 {
            entangled_pairs += 1;
        }
        oracle_dev = oracle_dev.max((ea - log_negativity_oracle(&a)).abs());
    }
    println!("    {entangled_pairs} pairs with both members entangled; E_N vs numeric oracle {oracle_dev:.3e}");
    let a = verdict(
        12,
        "E_N nondecreasing in I_ent at fixed I_S, 1e4 pairs",
        violation.max(0.0),
        1e-10,
    );
    assert!(a && oracle_dev < 1e-8);
}

#[test]
fn criterion_13_sweep_reproducible() {
    let words: Vec<String> = ["twin"].iter().map(|s| s.to_string()).collect();
    let axes: Vec<String> = ["bn=0:0.5:12", "bp=0:2:15", "T=0:1:11"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let spec = sweep_spec(
        &ConfigFile::default(),
        &words,
        &axes,
        Some("incl1,incl2,ient,incl_global,log_negativity,region"),
    )
    .unwrap();
    let run = |workers| {
        cmd_sweep(
            &spec,
            &RunConfig {
                workers,
                seed: 5,
                ..Default::default()
            },
        )
        .unwrap()
    };
    let one = run(1);
    let again = run(1);
    let eight = run(8);
    let differing = [&again, &eight].iter().filter(|o| ***o != one).count();
    println!("    {} bytes per run", one.len());
    assert!(verdict(
        13,
        "sweep bytes identical across reruns and workers {1, 8}",
        differing as f64,
        0.0
    ));
}
