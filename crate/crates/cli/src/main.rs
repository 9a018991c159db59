//! `latsamp`: run sampling-operator experiments and write CSV/JSON reports.
//!
//! Exit codes: 0 when every configured assertion passes, 1 on usage or
//! computation errors, 2 when an assertion fails.

mod config;
mod output;
mod run;

use clap::{Args, Parser, Subcommand};
use config::{usage, Command, UsageError};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

const COMMON_HELP: &str = "\
Configuration: `--config FILE` reads `key = value` lines (`#` comments); every key
has a flag of the same name with `-` for `_`, and flags win over the file. Unknown
keys are errors. Thresholds are optional; each one set adds an assertion.

Output: <out>/<command>_<seed>.csv (UTF-8, header row, \\n line endings) and
<out>/summary.json (config echo, library version, results, assertions).
Floating-point values carry 17 significant digits.

Environment: LATSAMP_THREADS caps the worker pool.";

const PROBE_HELP: &str = "\
CSV columns: n, stability_sup, stability_inf, jackson_sup, jackson_inf, samples
  stability = ‖G_n f‖/‖f‖_{X_n} over random node data (A1/A2)
  jackson   = n^s‖T - G_n T‖/‖T^(s)‖ over random T (A3/A4)
Thresholds: max_k1, max_spread (per-n sup and inf spreads of the Jackson ratios)";

const EQUIV_HELP: &str = "\
CSV columns: f_label, n, lhs_continuous, lhs_discrete, rhs_continuous, rhs_discrete, ratio
  ratio is empty for rows where both sides vanish (excluded from the summary)
Keys: theorem (thC, br-rho, br-phi, thR, thK; default from the operator), f, gamma
Thresholds: max_spread, min_ratio";

const RATES_HELP: &str = "\
CSV columns: f_label, n, error, modulus
  error = ‖f - G_n f‖ + ‖f - G_n f‖_{X_n}, modulus = semi-discrete modulus total
Needs at least five values of n. Thresholds: target_slope with slope_tol, max_slope_gap";

const COUNTER_HELP: &str = "\
CSV columns: n, continuous_error, discrete_error, ratio
  bump-train functions annihilated by the operator; spec must be l1, l2 or lp:<p>
Thresholds: discrete_tol (|discrete error - 1|), min_final_ratio";

const ONESIDED_HELP: &str = "\
CSV columns: f_label, n, error, one_sided, besov, ratio_one_sided, ratio_besov, converged
  L1 only; grid = LP constraint points (default 1024, at least 16n), eps = Besov tail cut
Thresholds: max_ratio (error / one-sided value)";

const REPORT_HELP: &str = "\
CSV columns: quantity, n, sup, inf, samples
  quantity ∈ {mz_uniform, mz_jittered, bernstein}; jitter defaults to 0.3
Thresholds: mz_sup_bound, mz_inf_floor, bernstein_bound";

#[derive(Parser)]
#[command(name = "latsamp", version, about = "Sampling-operator experiments", after_help = COMMON_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Probe the stability and Jackson-type assumptions of an operator.
    #[command(after_help = PROBE_HELP)]
    Probe(Flags),
    /// Tabulate both sides of a two-sided error/smoothness equivalence.
    #[command(after_help = EQUIV_HELP)]
    Equiv(Flags),
    /// Fit error and modulus decay rates.
    #[command(after_help = RATES_HELP)]
    Rates(Flags),
    /// Run the divergence counterexample for a window with a vanishing coefficient.
    #[command(after_help = COUNTER_HELP)]
    Counterexample(Flags),
    /// Compare errors with one-sided best approximation and the Besov sum.
    #[command(after_help = ONESIDED_HELP)]
    Onesided(Flags),
    /// Marcinkiewicz–Zygmund and Bernstein constants for a norm.
    #[command(after_help = REPORT_HELP)]
    Report(Flags),
}

macro_rules! flags {
    ($($field:ident : $help:literal),* $(,)?) => {
        #[derive(Args, Default)]
        struct Flags {
            /// Config file of `key = value` lines.
            #[arg(long)]
            config: Option<PathBuf>,
            $(
                #[doc = $help]
                #[arg(long, allow_hyphen_values = true)]
                $field: Option<String>,
            )*
        }

        impl Flags {
            fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
                vec![$((stringify!($field), &self.$field)),*]
            }
        }
    };
}

flags! {
    op: "Operator: lagrange, dirichlet, fejer, br:<alpha>.",
    spec: "Norm: l1, l2, lp:<p>, wlp:<p>:<beta>, orlicz:llogl, orlicz:pow:<p>.",
    n: "Comma-separated, strictly increasing degrees.",
    r: "Steklov power r (2r ≥ s).",
    s: "Smoothness order s.",
    seed: "RNG seed (mandatory).",
    trials: "Random trials per n (default 20).",
    gamma: "Steklov step override h = gamma/n.",
    out: "Output directory (default .).",
    f: "Comma-separated corpus labels.",
    theorem: "Equivalence to tabulate.",
    grid: "LP constraint grid size.",
    eps: "Besov-sum tail cutoff.",
    jitter: "Node jitter in [0, 0.5).",
    max_spread: "Assert spread ≤ value.",
    min_ratio: "Assert min ratio > value.",
    max_k1: "Assert K1 ≤ value.",
    target_slope: "Expected error slope.",
    slope_tol: "Allowed |slope - target_slope|.",
    max_slope_gap: "Assert |error slope - modulus slope| ≤ value.",
    discrete_tol: "Assert |discrete error - 1| ≤ value.",
    min_final_ratio: "Assert final ratio > value.",
    max_ratio: "Assert ratio ≤ value.",
    mz_sup_bound: "Assert MZ sup < value.",
    mz_inf_floor: "Assert MZ inf > value.",
    bernstein_bound: "Assert Bernstein sup ≤ value.",
}

fn merge(flags: &Flags) -> Result<BTreeMap<String, String>, UsageError> {
    let mut raw = match &flags.config {
        Some(p) => config::read_file(p)?,
        None => BTreeMap::new(),
    };
    for (k, v) in flags.pairs() {
        if let Some(v) = v {
            raw.insert(k.to_string(), v.clone());
        }
    }
    Ok(raw)
}

fn threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("LATSAMP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage("LATSAMP_THREADS", format!("`{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage("LATSAMP_THREADS", e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (command, flags) = match &cli.command {
        Cmd::Probe(f) => (Command::Probe, f),
        Cmd::Equiv(f) => (Command::Equiv, f),
        Cmd::Rates(f) => (Command::Rates, f),
        Cmd::Counterexample(f) => (Command::Counterexample, f),
        Cmd::Onesided(f) => (Command::Onesided, f),
        Cmd::Report(f) => (Command::Report, f),
    };
    let cfg = match threads().and_then(|_| merge(flags)).and_then(|raw| config::build(command, raw)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run::run(&cfg) {
        Ok(o) if o.pass => {
            println!("{}: all assertions passed ({})", command, o.csv.display());
            ExitCode::SUCCESS
        }
        Ok(_) => {
            eprintln!("{}: assertion failed; see {}", command, cfg.out.join("summary.json").display());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
