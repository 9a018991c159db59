//! Flat `key = value` configuration merged with command-line flags.

use latsamp::harness::Theorem;
use latsamp::{corpus_entry, Family, NormSpec, PointwiseFunction};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
#[error("{key}: {reason}")]
pub struct UsageError {
    pub key: String,
    pub reason: String,
}

pub fn usage(key: &str, reason: impl Into<String>) -> UsageError {
    UsageError {
        key: key.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Probe,
    Equiv,
    Rates,
    Counterexample,
    Onesided,
    Report,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Probe => "probe",
            Command::Equiv => "equiv",
            Command::Rates => "rates",
            Command::Counterexample => "counterexample",
            Command::Onesided => "onesided",
            Command::Report => "report",
        })
    }
}

/// Every accepted key; flags use the same names with `-` for `_`.
pub const KEYS: &[&str] = &[
    "op",
    "spec",
    "n",
    "r",
    "s",
    "seed",
    "trials",
    "gamma",
    "out",
    "f",
    "theorem",
    "grid",
    "eps",
    "jitter",
    "max_spread",
    "min_ratio",
    "max_k1",
    "target_slope",
    "slope_tol",
    "max_slope_gap",
    "discrete_tol",
    "min_final_ratio",
    "max_ratio",
    "mz_sup_bound",
    "mz_inf_floor",
    "bernstein_bound",
];

/// Assertion thresholds; an assertion runs only when its threshold is set.
#[derive(Clone, Debug, Default)]
pub struct Thresholds {
    pub max_spread: Option<f64>,
    pub min_ratio: Option<f64>,
    pub max_k1: Option<f64>,
    pub target_slope: Option<f64>,
    pub slope_tol: Option<f64>,
    pub max_slope_gap: Option<f64>,
    pub discrete_tol: Option<f64>,
    pub min_final_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub mz_sup_bound: Option<f64>,
    pub mz_inf_floor: Option<f64>,
    pub bernstein_bound: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub family: Option<Family>,
    pub spec: NormSpec,
    pub ns: Vec<usize>,
    pub r: Option<usize>,
    pub s: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub gamma: Option<f64>,
    pub out: PathBuf,
    pub functions: Vec<PointwiseFunction>,
    pub theorem: Option<Theorem>,
    pub grid: Option<usize>,
    pub eps: f64,
    pub jitter: f64,
    pub thresholds: Thresholds,
    /// The merged raw key/value pairs, echoed into the summary.
    pub raw: BTreeMap<String, String>,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_file(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage("config", format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage("config", format!("line {}: expected `key = value`", i + 1)))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(usage(&k, format!("unknown key (line {} of {})", i + 1, path.display())));
        }
        if map.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(usage(&k, "given twice in the config file"));
        }
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(raw: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, UsageError> {
    raw.get(key)
        .map(|v| v.parse::<T>().map_err(|_| usage(key, format!("`{v}` is not a valid number"))))
        .transpose()
}

fn positive(raw: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, UsageError> {
    match num::<f64>(raw, key)? {
        Some(v) if !(v.is_finite() && v > 0.0) => Err(usage(key, format!("must be positive and finite, got {v}"))),
        v => Ok(v),
    }
}

fn finite(raw: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, UsageError> {
    match num::<f64>(raw, key)? {
        Some(v) if !v.is_finite() => Err(usage(key, "must be finite")),
        v => Ok(v),
    }
}

fn required<'a>(raw: &'a BTreeMap<String, String>, key: &str, command: Command) -> Result<&'a str, UsageError> {
    raw.get(key)
        .map(String::as_str)
        .ok_or_else(|| usage(key, format!("required by `{command}`")))
}

fn default_functions(command: Command) -> &'static str {
    match command {
        Command::Equiv => "square,cusp0.5,cusp1.5,sawtooth",
        Command::Onesided => "square,sin",
        _ => "square",
    }
}

/// Validates merged key/value pairs into a [`RunConfig`].
pub fn build(command: Command, raw: BTreeMap<String, String>) -> Result<RunConfig, UsageError> {
    for k in raw.keys() {
        if !KEYS.contains(&k.as_str()) {
            return Err(usage(k, "unknown key"));
        }
    }
    let seed = num::<u64>(&raw, "seed")?.ok_or_else(|| usage("seed", "mandatory; runs are never seeded from the clock"))?;

    let ns: Vec<usize> = required(&raw, "n", command)?
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage("n", format!("`{t}` is not a positive integer"))))
        .collect::<Result<_, _>>()?;
    if ns.is_empty() || ns[0] == 0 {
        return Err(usage("n", "values must be positive"));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage("n", "must be strictly increasing"));
    }

    let r = num::<usize>(&raw, "r")?;
    let s = num::<usize>(&raw, "s")?;
    if r == Some(0) {
        return Err(usage("r", "must be at least 1"));
    }
    if let (Some(r), Some(s)) = (r, s) {
        if 2 * r < s {
            return Err(usage("s", format!("2r ≥ s violated (r = {r}, s = {s})")));
        }
    }
    let needs_rs = matches!(command, Command::Equiv | Command::Rates);
    if needs_rs && r.is_none() {
        return Err(usage("r", format!("required by `{command}`")));
    }
    if (needs_rs || command == Command::Probe) && s.is_none() {
        return Err(usage("s", format!("required by `{command}`")));
    }

    let default_spec = if command == Command::Onesided { "l1" } else { "l2" };
    let spec_text = raw.get("spec").map(String::as_str).unwrap_or(default_spec);
    let spec = NormSpec::parse(spec_text).map_err(|e| usage("spec", e.to_string()))?;

    let family = match raw.get("op") {
        Some(op) => Some(Family::parse(op).map_err(|e| usage("op", e.to_string()))?),
        None if command == Command::Report => None,
        None if command == Command::Counterexample => Some(Family::QuasiInterp(latsamp::Window::Fejer)),
        None => return Err(usage("op", format!("required by `{command}`"))),
    };
    if let Some(f) = &family {
        if !f.is_periodic() {
            return Err(usage("op", format!("`{f}` acts on the line; `{command}` needs a periodic operator")));
        }
    }
    match (command, &family) {
        (Command::Counterexample, Some(Family::QuasiInterp(_))) => {}
        (Command::Counterexample, _) => return Err(usage("op", "counterexample needs a quasi-interpolant window")),
        _ => {}
    }
    if command == Command::Counterexample && !matches!(spec, NormSpec::Lebesgue { .. }) {
        return Err(usage("spec", "counterexample runs in Lebesgue spaces only"));
    }
    if command == Command::Onesided && spec != (NormSpec::Lebesgue { p: 1.0 }) {
        return Err(usage("spec", "onesided runs in l1 only"));
    }

    let trials = num::<usize>(&raw, "trials")?.unwrap_or(20);
    if trials == 0 {
        return Err(usage("trials", "must be at least 1"));
    }
    let functions = raw
        .get("f")
        .map(String::as_str)
        .unwrap_or(default_functions(command))
        .split(',')
        .map(|l| corpus_entry(l.trim()).ok_or_else(|| usage("f", format!("no corpus entry `{}`", l.trim()))))
        .collect::<Result<Vec<_>, _>>()?;
    let theorem = raw
        .get("theorem")
        .map(|t| Theorem::parse(t).map_err(|e| usage("theorem", e.to_string())))
        .transpose()?;
    let grid = num::<usize>(&raw, "grid")?;
    let eps = positive(&raw, "eps")?.unwrap_or(1e-6);
    let jitter = num::<f64>(&raw, "jitter")?.unwrap_or(0.3);
    if !(0.0..0.5).contains(&jitter) {
        return Err(usage("jitter", "must lie in [0, 0.5)"));
    }

    let thresholds = Thresholds {
        max_spread: positive(&raw, "max_spread")?,
        min_ratio: finite(&raw, "min_ratio")?,
        max_k1: positive(&raw, "max_k1")?,
        target_slope: finite(&raw, "target_slope")?,
        slope_tol: positive(&raw, "slope_tol")?,
        max_slope_gap: positive(&raw, "max_slope_gap")?,
        discrete_tol: positive(&raw, "discrete_tol")?,
        min_final_ratio: finite(&raw, "min_final_ratio")?,
        max_ratio: positive(&raw, "max_ratio")?,
        mz_sup_bound: positive(&raw, "mz_sup_bound")?,
        mz_inf_floor: finite(&raw, "mz_inf_floor")?,
        bernstein_bound: positive(&raw, "bernstein_bound")?,
    };
    if thresholds.target_slope.is_some() != thresholds.slope_tol.is_some() {
        return Err(usage("slope_tol", "target_slope and slope_tol go together"));
    }

    Ok(RunConfig {
        command,
        family,
        spec,
        ns,
        r,
        s,
        seed,
        trials,
        gamma: positive(&raw, "gamma")?,
        out: PathBuf::from(raw.get("out").map(String::as_str).unwrap_or(".")),
        functions,
        theorem,
        grid,
        eps,
        jitter,
        thresholds,
        raw,
    })
}
