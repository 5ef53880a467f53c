//! Command-line front end. Every subcommand writes CSV: `#`-prefixed
//! metadata lines, one header row, then data rows. Floats are printed in
//! shortest round-trip form, so reruns are byte-identical.
//!
//! State parameters are `key=value` words; angles accept a `pi` suffix
//! (`0.5pi`). A config file holds `key = value` lines (`#` starts a comment);
//! command-line values override it.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{evolve_at_times, HamiltonianParams, DEFAULT_TOL};
use crate::error::Error;
use crate::factories::{
    squeezed_vacuum, twin_beam, twin_plus_squeezed, two_squeezed, SqueezedVacuumParams, TwinBeamParams,
    TwinPlusSqueezedParams, TwoSqueezedParams, GENERATED_SQUEEZE_PHASE,
};
use crate::fockcheck::DEFAULT_TAIL_TOL;
use crate::measures::{measure_set, MeasureSet, EPS_REGION};
use crate::qpd::{qpd_grid, Axis, GridLayout, GridResult, OrderingParameter};
use crate::state::{apply_beam_splitter, invariants, is_physical, make_moments, BeamSplitter, NormalMoments};
use crate::verify::{self, Suite, Tolerances};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(
    name = "twomode",
    version,
    about = "Two-mode Gaussian state quantifiers, sweeps, dynamics and quasidistributions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// key = value file; command-line values win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// write CSV here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol_num: Option<f64>,
    #[arg(long, global = true)]
    pub tol_region: Option<f64>,
    #[arg(long, global = true)]
    pub tol_ode: Option<f64>,
    #[arg(long, global = true)]
    pub tol_tail: Option<f64>,
    #[arg(long, global = true)]
    pub tol_oracle: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All quantifiers of one state
    Measures {
        /// family (vacuum, twin, squeezed, two_squeezed, mixed, custom) followed by key=value parameters
        words: Vec<String>,
    },
    /// Measures over a grid of up to three parameters
    Sweep {
        words: Vec<String>,
        /// name=min:max:count, repeatable; the first axis varies slowest
        #[arg(long = "axis")]
        axes: Vec<String>,
        /// comma-separated measure names
        #[arg(long)]
        outputs: Option<String>,
    },
    /// Moment evolution from vacuum under the Langevin equations
    Dynamics {
        /// g12, g11, g22 (with optional _im parts), gamma1, gamma2, gamma, nd1, nd2, nd, t_max, points
        words: Vec<String>,
    },
    /// s-ordered quasidistribution on a grid
    Qpd {
        /// state words plus s, layout (full, slice, marginal), mode, range, points, fixed_re, fixed_im
        words: Vec<String>,
    },
    /// Self-check suites
    Verify {
        /// run only this suite (repeatable)
        #[arg(long)]
        suite: Vec<String>,
    },
}

/// Tolerances, output, parallelism and seed of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tol_num: f64,
    pub tol_region: f64,
    pub tol_ode: f64,
    pub tol_tail: f64,
    pub tol_oracle: f64,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            tol_num: t.num,
            tol_region: EPS_REGION,
            tol_ode: DEFAULT_TOL,
            tol_tail: DEFAULT_TAIL_TOL,
            tol_oracle: t.oracle,
            out: None,
            workers: 1,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            num: self.tol_num,
            oracle: self.tol_oracle,
            ode: self.tol_ode,
            tail: self.tol_tail,
        }
    }
}

/// Parsed `key = value` pairs. `axis` may repeat; other keys keep the last value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
    pub axes: Vec<String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("config line {}: expected `key = value`, got `{raw}`", n + 1));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return usage(format!("config line {}: empty key", n + 1));
            }
            if k == "axis" {
                cfg.axes.push(v.to_string());
            } else {
                cfg.values.insert(k.to_string(), v.to_string());
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

const RUN_KEYS: [&str; 8] = [
    "tol_num",
    "tol_region",
    "tol_ode",
    "tol_tail",
    "tol_oracle",
    "out",
    "workers",
    "seed",
];

/// Real number with an optional `pi` suffix.
pub fn parse_real(s: &str) -> CliResult<f64> {
    let t = s.trim();
    let v = if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*');
        let k = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number `{s}`")))?,
        };
        k * std::f64::consts::PI
    } else {
        t.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad number `{s}`")))?
    };
    if !v.is_finite() {
        return usage(format!("non-finite number `{s}`"));
    }
    Ok(v)
}

fn parse_positive(key: &str, s: &str) -> CliResult<f64> {
    let v = parse_real(s)?;
    if v < 0.0 {
        return usage(format!("{key} must be nonnegative, got {s}"));
    }
    Ok(v)
}

/// Builds the run configuration: defaults, then the config file, then flags.
pub fn run_config(file: &ConfigFile, g: &GlobalOpts) -> CliResult<RunConfig> {
    let mut rc = RunConfig::default();
    for (k, v) in &file.values {
        match k.as_str() {
            "tol_num" => rc.tol_num = parse_positive(k, v)?,
            "tol_region" => rc.tol_region = parse_positive(k, v)?,
            "tol_ode" => rc.tol_ode = parse_positive(k, v)?,
            "tol_tail" => rc.tol_tail = parse_positive(k, v)?,
            "tol_oracle" => rc.tol_oracle = parse_positive(k, v)?,
            "out" => rc.out = Some(PathBuf::from(v)),
            "workers" => rc.workers = v.parse().map_err(|_| CliError::Usage(format!("bad workers `{v}`")))?,
            "seed" => rc.seed = v.parse().map_err(|_| CliError::Usage(format!("bad seed `{v}`")))?,
            _ => {}
        }
    }
    let flags = [
        (g.tol_num, &mut rc.tol_num, "tol-num"),
        (g.tol_region, &mut rc.tol_region, "tol-region"),
        (g.tol_ode, &mut rc.tol_ode, "tol-ode"),
        (g.tol_tail, &mut rc.tol_tail, "tol-tail"),
        (g.tol_oracle, &mut rc.tol_oracle, "tol-oracle"),
    ];
    for (flag, slot, name) in flags {
        if let Some(v) = flag {
            if !(v >= 0.0 && v.is_finite()) {
                return usage(format!("--{name} must be a nonnegative number"));
            }
            *slot = v;
        }
    }
    if let Some(o) = &g.out {
        rc.out = Some(o.clone());
    }
    if let Some(w) = g.workers {
        rc.workers = w;
    }
    if let Some(s) = g.seed {
        rc.seed = s;
    }
    if rc.workers == 0 {
        return usage("workers must be at least 1");
    }
    Ok(rc)
}

/// State family selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    Vacuum,
    Twin,
    Squeezed,
    TwoSqueezed,
    Mixed,
    Custom,
}

impl StateFamily {
    pub fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "vacuum" => Self::Vacuum,
            "twin" => Self::Twin,
            "squeezed" => Self::Squeezed,
            "two_squeezed" => Self::TwoSqueezed,
            "mixed" => Self::Mixed,
            "custom" => Self::Custom,
            other => return Err(Error::UnknownFamily(other.to_string()).into()),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Twin => "twin",
            Self::Squeezed => "squeezed",
            Self::TwoSqueezed => "two_squeezed",
            Self::Mixed => "mixed",
            Self::Custom => "custom",
        }
    }

    /// Parameters understood by the family, besides `T` and `phi`.
    pub fn keys(&self) -> &'static [&'static str] {
        match self {
            Self::Vacuum => &[],
            Self::Twin => &["bp", "bs", "bi", "bn"],
            Self::Squeezed => &["bsq", "bs"],
            Self::TwoSqueezed => &["bp", "bps", "bpi", "bn", "bs", "bi", "theta1", "theta2", "dtheta"],
            Self::Mixed => &["bp", "bsq"],
            Self::Custom => &[
                "b1",
                "b2",
                "c1_re",
                "c1_im",
                "c2_re",
                "c2_im",
                "d12_re",
                "d12_im",
                "dbar12_re",
                "dbar12_im",
            ],
        }
    }

    fn accepts(&self, key: &str) -> bool {
        key == "T" || key == "phi" || self.keys().contains(&key)
    }
}

/// A family with its parameters; the state is the family member sent
/// through a beam splitter `(T, phi)` (identity by default).
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub family: StateFamily,
    pub params: BTreeMap<String, f64>,
}

impl StateSpec {
    pub fn new(family: StateFamily) -> Self {
        Self {
            family,
            params: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: f64) -> CliResult<()> {
        if !self.family.accepts(key) {
            return usage(format!(
                "`{key}` is not a parameter of family {} (expected T, phi{})",
                self.family.name(),
                self.family.keys().iter().map(|k| format!(", {k}")).collect::<String>()
            ));
        }
        self.params.insert(key.to_string(), value);
        Ok(())
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn moments(&self) -> crate::error::Result<NormalMoments> {
        let g = |k: &str| self.get(k, 0.0);
        let m = match self.family {
            StateFamily::Vacuum => NormalMoments::vacuum(),
            StateFamily::Twin => {
                let bn = g("bn");
                twin_beam(&TwinBeamParams {
                    bp: g("bp"),
                    bs: self.get("bs", bn),
                    bi: self.get("bi", bn),
                })?
            }
            StateFamily::Squeezed => squeezed_vacuum(&SqueezedVacuumParams {
                bp_sq: g("bsq"),
                bs: g("bs"),
            })?,
            StateFamily::TwoSqueezed => {
                let theta1 = self.get("theta1", GENERATED_SQUEEZE_PHASE);
                let theta2 = match self.params.get("dtheta") {
                    Some(d) => theta1 + d,
                    None => self.get("theta2", GENERATED_SQUEEZE_PHASE),
                };
                // bp and bn set both modes at once
                let (bp, bn) = (g("bp"), g("bn"));
                two_squeezed(&TwoSqueezedParams {
                    bps: self.get("bps", bp),
                    bpi: self.get("bpi", bp),
                    bs: self.get("bs", bn),
                    bi: self.get("bi", bn),
                    theta1,
                    theta2,
                })?
            }
            StateFamily::Mixed => twin_plus_squeezed(&TwinPlusSqueezedParams {
                bp: g("bp"),
                bp_sq: g("bsq"),
            })?,
            StateFamily::Custom => make_moments(
                g("b1"),
                g("b2"),
                Complex64::new(g("c1_re"), g("c1_im")),
                Complex64::new(g("c2_re"), g("c2_im")),
                Complex64::new(g("d12_re"), g("d12_im")),
                Complex64::new(g("dbar12_re"), g("dbar12_im")),
            )?,
        };
        let bs = BeamSplitter::new(self.get("T", 1.0), self.get("phi", 0.0))?;
        apply_beam_splitter(&m, &bs)
    }

    /// `key=value` list in a fixed order, for metadata lines.
    pub fn describe(&self) -> String {
        let mut s = self.family.name().to_string();
        for (k, v) in &self.params {
            s.push_str(&format!(" {k}={v:?}"));
        }
        s
    }
}

/// Splits `key=value` words into a map. Later words win.
pub fn parse_words(words: &[String]) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for w in words {
        let Some((k, v)) = w.split_once('=') else {
            return usage(format!("expected key=value, got `{w}`"));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Family and parameters from the config file overlaid with the command words.
/// `extra` lists keys consumed by the subcommand itself.
fn state_from(file: &ConfigFile, words: &[String], extra: &[&str]) -> CliResult<(StateSpec, BTreeMap<String, String>)> {
    let (family_word, rest) = match words.first() {
        Some(w) if !w.contains('=') => (Some(w.as_str()), &words[1..]),
        _ => (None, words),
    };
    let family_name = family_word
        .map(str::to_string)
        .or_else(|| file.values.get("family").cloned())
        .ok_or_else(|| CliError::Usage("no state family given".into()))?;
    let family = StateFamily::parse(&family_name)?;
    let mut merged: BTreeMap<String, String> = file
        .values
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "family" | "outputs") && !RUN_KEYS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    merged.extend(parse_words(rest)?);
    let mut spec = StateSpec::new(family);
    let mut other = BTreeMap::new();
    for (k, v) in merged {
        if extra.contains(&k.as_str()) {
            other.insert(k, v);
        } else {
            spec.set(&k, parse_real(&v)?)?;
        }
    }
    Ok((spec, other))
}

fn fmt_f(x: f64) -> String {
    format!("{x:?}")
}

fn header<W: Write>(w: &mut W, command: &str, lines: &[String]) -> io::Result<()> {
    writeln!(w, "# twomode {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# command: {command}")?;
    for l in lines {
        writeln!(w, "# {l}")?;
    }
    Ok(())
}

/// Names accepted in sweep outputs.
pub const MEASURE_NAMES: [&str; 18] = [
    "tau_global",
    "tau1_raw",
    "tau2_raw",
    "tau1",
    "tau2",
    "incl1",
    "incl2",
    "ient",
    "incl_global",
    "d_minus_pt",
    "log_negativity",
    "lambda1",
    "lambda2",
    "region",
    "b1",
    "b2",
    "is_global",
    "delta_s",
];

const DEFAULT_OUTPUTS: [&str; 6] = ["incl1", "incl2", "ient", "incl_global", "log_negativity", "region"];

fn measure_value(name: &str, ms: &MeasureSet, m: &NormalMoments) -> f64 {
    match name {
        "tau_global" => ms.tau_global,
        "tau1_raw" => ms.tau1_raw,
        "tau2_raw" => ms.tau2_raw,
        "tau1" => ms.tau1,
        "tau2" => ms.tau2,
        "incl1" => ms.incl1,
        "incl2" => ms.incl2,
        "ient" => ms.ient,
        "incl_global" => ms.incl_global,
        "d_minus_pt" => ms.d_minus_pt,
        "log_negativity" => ms.log_negativity,
        "lambda1" => ms.lambda1,
        "lambda2" => ms.lambda2,
        "region" => f64::from(ms.region().code()),
        "b1" => m.b1(),
        "b2" => m.b2(),
        "is_global" => invariants(m).is_global,
        "delta_s" => invariants(m).delta_s,
        _ => unreachable!("outputs are validated"),
    }
}

fn open_out(rc: &RunConfig, stdout: &mut dyn Write, body: &[u8]) -> CliResult<()> {
    match &rc.out {
        Some(path) => fs::write(path, body)?,
        None => stdout.write_all(body)?,
    }
    Ok(())
}

pub fn cmd_measures(file: &ConfigFile, words: &[String], rc: &RunConfig) -> CliResult<Vec<u8>> {
    let (spec, _) = state_from(file, words, &[])?;
    let m = spec.moments()?;
    let ms = measure_set(&m, rc.tol_region)?;
    let inv = invariants(&m);
    let phys = is_physical(&m, 1e-9);
    let mut w = Vec::new();
    header(&mut w, "measures", &[format!("state: {}", spec.describe())])?;
    writeln!(w, "quantity,value")?;
    let mut row = |k: &str, v: String| writeln!(w, "{k},{v}");
    for (k, z) in [("c1", m.c1()), ("c2", m.c2()), ("d12", m.d12()), ("dbar12", m.dbar12())] {
        row(&format!("{k}_re"), fmt_f(z.re))?;
        row(&format!("{k}_im"), fmt_f(z.im))?;
    }
    row("b1", fmt_f(m.b1()))?;
    row("b2", fmt_f(m.b2()))?;
    for name in MEASURE_NAMES
        .iter()
        .filter(|n| !matches!(**n, "region" | "b1" | "b2" | "is_global" | "delta_s"))
    {
        row(name, fmt_f(measure_value(name, &ms, &m)))?;
    }
    for (k, v) in [
        ("i1", inv.i1),
        ("i2", inv.i2),
        ("i3", inv.i3),
        ("i_global", inv.i_global),
        ("delta", inv.delta),
        ("is1", inv.is1),
        ("is2", inv.is2),
        ("is3", inv.is3),
        ("is_global", inv.is_global),
        ("delta_s", inv.delta_s),
    ] {
        row(k, fmt_f(v))?;
    }
    row("region", ms.region().label().to_string())?;
    row(
        "nonclassical_mode",
        ms.classification
            .nonclassical_mode
            .map_or("none".into(), |j| j.to_string()),
    )?;
    row("physical", phys.physical.to_string())?;
    row("d_minus", fmt_f(phys.d_minus))?;
    Ok(w)
}

/// One sweep axis: parameter name and an inclusive linear range.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn parse(s: &str) -> CliResult<Self> {
        let Some((name, range)) = s.split_once('=') else {
            return usage(format!("axis `{s}`: expected name=min:max:count"));
        };
        let parts: Vec<&str> = range.split(':').collect();
        let [min, max, count] = parts.as_slice() else {
            return usage(format!("axis `{s}`: expected name=min:max:count"));
        };
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("axis `{s}`: bad count")))?;
        if count < 2 {
            return usage(format!("axis `{s}`: count must be at least 2"));
        }
        Ok(Self {
            name: name.trim().to_string(),
            min: parse_real(min)?,
            max: parse_real(max)?,
            count,
        })
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub state: StateSpec,
    pub axes: Vec<SweepAxis>,
    pub outputs: Vec<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return usage(format!("a sweep needs 1 to 3 axes, got {}", self.axes.len()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if !self.state.family.accepts(&a.name) {
                return usage(format!(
                    "axis `{}` is not a parameter of family {}",
                    a.name,
                    self.state.family.name()
                ));
            }
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return usage(format!("axis `{}` given twice", a.name));
            }
        }
        if self.outputs.is_empty() {
            return usage("no outputs requested");
        }
        for o in &self.outputs {
            if !MEASURE_NAMES.contains(&o.as_str()) {
                return usage(format!(
                    "unknown output `{o}` (expected one of {})",
                    MEASURE_NAMES.join(", ")
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis indices of row `k`, first axis slowest.
    pub fn unravel(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (i, a) in self.axes.iter().enumerate().rev() {
            idx[i] = k % a.count;
            k /= a.count;
        }
        idx
    }

    fn row(&self, k: usize, eps_region: f64) -> Vec<f64> {
        let idx = self.unravel(k);
        let mut state = self.state.clone();
        let mut row = Vec::with_capacity(self.axes.len() + self.outputs.len());
        for (a, &i) in self.axes.iter().zip(&idx) {
            let v = a.value(i);
            state.params.insert(a.name.clone(), v);
            row.push(v);
        }
        let values = state
            .moments()
            .and_then(|m| measure_set(&m, eps_region).map(|ms| (m, ms)));
        match values {
            Ok((m, ms)) => row.extend(self.outputs.iter().map(|o| measure_value(o, &ms, &m))),
            Err(_) => row.extend(std::iter::repeat_n(f64::NAN, self.outputs.len())),
        }
        row
    }
}

pub fn sweep_spec(file: &ConfigFile, words: &[String], axes: &[String], outputs: Option<&str>) -> CliResult<SweepSpec> {
    let (state, extra) = state_from(file, words, &["outputs"])?;
    let axis_words: Vec<String> = if axes.is_empty() {
        file.axes.clone()
    } else {
        axes.to_vec()
    };
    let outputs = outputs
        .map(str::to_string)
        .or_else(|| extra.get("outputs").cloned())
        .or_else(|| file.values.get("outputs").cloned())
        .map(|s| {
            s.split(',')
                .map(|o| o.trim().to_string())
                .filter(|o| !o.is_empty())
                .collect()
        })
        .unwrap_or_else(|| DEFAULT_OUTPUTS.iter().map(|s| s.to_string()).collect());
    let spec = SweepSpec {
        state,
        axes: axis_words
            .iter()
            .map(|a| SweepAxis::parse(a))
            .collect::<CliResult<_>>()?,
        outputs,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn cmd_sweep(spec: &SweepSpec, rc: &RunConfig) -> CliResult<Vec<u8>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(rc.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let rows: Vec<Vec<f64>> = pool.install(|| {
        (0..spec.len())
            .into_par_iter()
            .map(|k| spec.row(k, rc.tol_region))
            .collect()
    });
    let mut w = Vec::new();
    let axes = spec
        .axes
        .iter()
        .map(|a| format!("{}={:?}:{:?}:{}", a.name, a.min, a.max, a.count))
        .collect::<Vec<_>>()
        .join(" ");
    header(
        &mut w,
        "sweep",
        &[
            format!("state: {}", spec.state.describe()),
            format!("axes: {axes}"),
            format!("tol_region: {:?}", rc.tol_region),
        ],
    )?;
    let names: Vec<&str> = spec
        .axes
        .iter()
        .map(|a| a.name.as_str())
        .chain(spec.outputs.iter().map(String::as_str))
        .collect();
    writeln!(w, "{}", names.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(w)
}

fn coupling(map: &BTreeMap<String, String>, key: &str) -> CliResult<Complex64> {
    let re = map.get(key).map(|v| parse_real(v)).transpose()?.unwrap_or(0.0);
    let im = map
        .get(&format!("{key}_im"))
        .map(|v| parse_real(v))
        .transpose()?
        .unwrap_or(0.0);
    Ok(Complex64::new(re, im))
}

const DYNAMICS_KEYS: [&str; 13] = [
    "g12", "g12_im", "g11", "g11_im", "g22", "g22_im", "gamma", "gamma1", "gamma2", "nd", "nd1", "nd2", "t_max",
];

pub fn cmd_dynamics(file: &ConfigFile, words: &[String], rc: &RunConfig) -> CliResult<Vec<u8>> {
    let mut map: BTreeMap<String, String> = file
        .values
        .iter()
        .filter(|(k, _)| !RUN_KEYS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    map.extend(parse_words(words)?);
    for k in map.keys() {
        if !DYNAMICS_KEYS.contains(&k.as_str()) && k != "points" {
            return usage(format!("unknown dynamics parameter `{k}`"));
        }
    }
    let real = |k: &str| -> CliResult<Option<f64>> { map.get(k).map(|v| parse_real(v)).transpose() };
    let gamma = real("gamma")?.unwrap_or(0.0);
    let nd = real("nd")?.unwrap_or(0.0);
    let p = HamiltonianParams {
        g12: coupling(&map, "g12")?,
        g11: coupling(&map, "g11")?,
        g22: coupling(&map, "g22")?,
        gamma1: real("gamma1")?.unwrap_or(gamma),
        gamma2: real("gamma2")?.unwrap_or(gamma),
        nd1: real("nd1")?.unwrap_or(nd),
        nd2: real("nd2")?.unwrap_or(nd),
        t: 0.0,
    };
    let t_max = real("t_max")?.unwrap_or(1.0);
    let points: usize = match map.get("points") {
        Some(v) => v.parse().map_err(|_| CliError::Usage(format!("bad points `{v}`")))?,
        None => 101,
    };
    if points < 2 || t_max.is_nan() || t_max < 0.0 {
        return usage("dynamics needs points >= 2 and t_max >= 0");
    }
    let axis = SweepAxis {
        name: "t".into(),
        min: 0.0,
        max: t_max,
        count: points,
    };
    let times: Vec<f64> = (0..points).map(|k| axis.value(k)).collect();
    let (states, report) = evolve_at_times(&p, &NormalMoments::vacuum(), &times, rc.tol_ode)?;
    let mut w = Vec::new();
    header(
        &mut w,
        "dynamics",
        &[
            format!(
                "g12={:?} g11={:?} g22={:?} gamma1={:?} gamma2={:?} nd1={:?} nd2={:?}",
                p.g12, p.g11, p.g22, p.gamma1, p.gamma2, p.nd1, p.nd2
            ),
            format!("tol_ode: {:?}", rc.tol_ode),
            format!(
                "steps: {} accepted, {} rejected; max structure violation {:?}",
                report.accepted_steps, report.rejected_steps, report.max_structure_violation
            ),
        ],
    )?;
    writeln!(
        w,
        "t,b1,b2,c1_re,c1_im,c2_re,c2_im,d12_re,d12_im,dbar12_re,dbar12_im,incl1,incl2,ient,incl_global,log_negativity"
    )?;
    for (t, m) in times.iter().zip(&states) {
        let mut cells = vec![fmt_f(*t), fmt_f(m.b1()), fmt_f(m.b2())];
        for z in [m.c1(), m.c2(), m.d12(), m.dbar12()] {
            cells.push(fmt_f(z.re));
            cells.push(fmt_f(z.im));
        }
        match measure_set(m, rc.tol_region) {
            Ok(ms) => {
                for v in [ms.incl1, ms.incl2, ms.ient, ms.incl_global, ms.log_negativity] {
                    cells.push(fmt_f(v));
                }
            }
            Err(_) => cells.extend(std::iter::repeat_n(fmt_f(f64::NAN), 5)),
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(w)
}

const QPD_KEYS: [&str; 7] = ["s", "layout", "mode", "range", "points", "fixed_re", "fixed_im"];

pub fn cmd_qpd(file: &ConfigFile, words: &[String], _rc: &RunConfig) -> CliResult<Vec<u8>> {
    let (spec, extra) = state_from(file, words, &QPD_KEYS)?;
    let real =
        |k: &str, d: f64| -> CliResult<f64> { extra.get(k).map(|v| parse_real(v)).transpose().map(|v| v.unwrap_or(d)) };
    let s = OrderingParameter::new(real("s", 0.0)?)?;
    let half = real("range", 4.0)?;
    let points: usize = match extra.get("points") {
        Some(v) => v.parse().map_err(|_| CliError::Usage(format!("bad points `{v}`")))?,
        None => 41,
    };
    let axis = Axis::symmetric(half, points)?;
    let mode: usize = match extra.get("mode") {
        Some(v) => v.parse().map_err(|_| CliError::Usage(format!("bad mode `{v}`")))?,
        None => 1,
    };
    let layout = match extra.get("layout").map(String::as_str).unwrap_or("marginal") {
        "full" => GridLayout::Full {
            re1: axis,
            im1: axis,
            re2: axis,
            im2: axis,
        },
        "slice" => GridLayout::Slice {
            mode,
            re: axis,
            im: axis,
            fixed: Complex64::new(real("fixed_re", 0.0)?, real("fixed_im", 0.0)?),
        },
        "marginal" => GridLayout::Marginal {
            mode,
            re: axis,
            im: axis,
        },
        other => return usage(format!("unknown layout `{other}` (full, slice, marginal)")),
    };
    let m = spec.moments()?;
    let grid = qpd_grid(&m, s, &layout)?;
    let mut w = Vec::new();
    let mut meta = vec![
        format!("state: {}", spec.describe()),
        format!("s: {:?}", s.value()),
        format!("layout: {layout:?}"),
    ];
    let GridResult::Values(g) = grid else {
        meta.push("degenerate: covariance is singular, no density values".into());
        header(&mut w, "qpd", &meta)?;
        return Ok(w);
    };
    meta.push(format!("normalization: {:?}", g.normalization));
    header(&mut w, "qpd", &meta)?;
    let cols = match layout {
        GridLayout::Full { .. } => "re1,im1,re2,im2,value",
        _ => "re,im,value",
    };
    writeln!(w, "{cols}")?;
    let axes = layout.axes();
    for (k, v) in g.values.iter().enumerate() {
        let idx = layout.unravel(k);
        let mut cells: Vec<String> = axes.iter().zip(&idx).map(|(a, &i)| fmt_f(a.point(i))).collect();
        cells.push(fmt_f(*v));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(w)
}

/// Runs the suites; returns the summary bytes and the exit status.
pub fn cmd_verify(suites: &[String], rc: &RunConfig) -> CliResult<(Vec<u8>, i32)> {
    let selected: Vec<Suite> = if suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        suites.iter().map(|s| s.parse::<Suite>()).collect::<Result<_, _>>()?
    };
    let report = verify::run(&selected, rc.seed, &rc.tolerances());
    let mut w = Vec::new();
    header(
        &mut w,
        "verify",
        &[
            format!("seed: {}", rc.seed),
            format!(
                "tol_num: {:?} tol_oracle: {:?} tol_ode: {:?} tol_tail: {:?}",
                rc.tol_num, rc.tol_oracle, rc.tol_ode, rc.tol_tail
            ),
            match report.first_failure() {
                None => "result: pass".into(),
                Some(s) => format!("result: FAIL (first failing suite: {s}, exit {})", s.exit_code()),
            },
        ],
    )?;
    report.write_summary(&mut w)?;
    Ok((w, report.exit_code()))
}

/// Executes a parsed command line; returns the process exit status.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<i32> {
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let rc = run_config(&file, &cli.global)?;
    let (body, code) = match &cli.command {
        Command::Measures { words } => (cmd_measures(&file, words, &rc)?, 0),
        Command::Sweep { words, axes, outputs } => {
            let spec = sweep_spec(&file, words, axes, outputs.as_deref())?;
            (cmd_sweep(&spec, &rc)?, 0)
        }
        Command::Dynamics { words } => (cmd_dynamics(&file, words, &rc)?, 0),
        Command::Qpd { words } => (cmd_qpd(&file, words, &rc)?, 0),
        Command::Verify { suite } => cmd_verify(suite, &rc)?,
    };
    open_out(&rc, stdout, &body)?;
    Ok(code)
}

/// Parses `args` (including the program name) and runs. Usage errors exit 2,
/// model and i/o errors exit 1.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "twomode: {e}");
            match e {
                CliError::Usage(_) => 2,
                _ => 1,
            }
        }
    }
}
