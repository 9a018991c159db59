//! Experiment orchestration: one function per command, each producing a table,
//! a results object and the configured assertions.

use crate::config::{Command, RunConfig};
use crate::output::{fmt, fmt_opt, num, num_opt, summary, Assertion, Outputs, Table};
use latsamp::harness::{
    bernstein_probe, counterexample_run, equivalence_study, inf_spread, mz_probe, probe_assumptions, rate_study,
    sup_spread, thg1_study, NodeScheme, Theorem,
};
use latsamp::{Family, NormSpec, Window};
use serde_json::{Map, Value};

pub struct Outcome {
    pub pass: bool,
    pub csv: std::path::PathBuf,
}

struct Produced {
    table: Table,
    results: Map<String, Value>,
    assertions: Vec<Assertion>,
}

/// Runs the experiment and writes `<out>/<command>_<seed>.csv` and `<out>/summary.json`.
/// Any error removes the files written so far.
pub fn run(cfg: &RunConfig) -> Result<Outcome, Box<dyn std::error::Error>> {
    let produced = match cfg.command {
        Command::Probe => probe(cfg)?,
        Command::Equiv => equiv(cfg)?,
        Command::Rates => rates(cfg)?,
        Command::Counterexample => counterexample(cfg)?,
        Command::Onesided => onesided(cfg)?,
        Command::Report => report(cfg)?,
    };
    std::fs::create_dir_all(&cfg.out)?;
    let csv = cfg.out.join(format!("{}_{}.csv", cfg.command, cfg.seed));
    let mut outputs = Outputs::new();
    outputs.csv(&csv, &produced.table)?;
    let s = summary(&cfg.command.to_string(), &cfg.raw, produced.results, &produced.assertions);
    outputs.json(&cfg.out.join("summary.json"), &s)?;
    outputs.keep();
    Ok(Outcome {
        pass: produced.assertions.iter().all(|a| a.pass),
        csv,
    })
}

fn family(cfg: &RunConfig) -> &Family {
    cfg.family.as_ref().expect("validated by config")
}

fn probe(cfg: &RunConfig) -> latsamp::Result<Produced> {
    let s = cfg.s.expect("validated by config");
    let rep = probe_assumptions(family(cfg), &cfg.spec, s, &cfg.ns, cfg.trials, cfg.seed)?;
    let mut table = Table::new(&["n", "stability_sup", "stability_inf", "jackson_sup", "jackson_inf", "samples"]);
    for (st, j) in rep.stability.iter().zip(&rep.jackson) {
        table.push(vec![
            st.n.to_string(),
            fmt(st.sup),
            fmt(st.inf),
            fmt(j.sup),
            fmt(j.inf),
            j.samples.to_string(),
        ]);
    }
    let (sup_sp, inf_sp) = (sup_spread(&rep.jackson), inf_spread(&rep.jackson));
    let mut results = Map::new();
    for (k, v) in [("k1", rep.k1), ("k2", rep.k2), ("k3", rep.k3), ("k4", rep.k4)] {
        results.insert(k.into(), num(v));
    }
    results.insert("jackson_sup_spread".into(), num(sup_sp));
    results.insert("jackson_inf_spread".into(), num(inf_sp));
    let t = &cfg.thresholds;
    let mut assertions = Vec::new();
    if let Some(m) = t.max_k1 {
        assertions.push(Assertion::at_most("k1", rep.k1, m));
    }
    if let Some(m) = t.max_spread {
        assertions.push(Assertion::at_most("jackson_sup_spread", sup_sp, m));
        assertions.push(Assertion::at_most("jackson_inf_spread", inf_sp, m));
    }
    Ok(Produced {
        table,
        results,
        assertions,
    })
}

/// The theorem matching the operator when none is configured.
fn default_theorem(f: &Family) -> Theorem {
    match f {
        Family::QuasiInterp(Window::BochnerRiesz(_)) => Theorem::BrRho,
        Family::QuasiInterp(Window::Fejer) => Theorem::BrPhi,
        _ => Theorem::ThC,
    }
}

fn equiv(cfg: &RunConfig) -> latsamp::Result<Produced> {
    let fam = family(cfg);
    let thm = cfg.theorem.unwrap_or_else(|| default_theorem(fam));
    let (r, s) = (cfg.r.expect("validated"), cfg.s.expect("validated"));
    let t = equivalence_study(thm, &cfg.functions, fam, &cfg.spec, r, s, &cfg.ns, cfg.gamma)?;
    let mut table = Table::new(&[
        "f_label",
        "n",
        "lhs_continuous",
        "lhs_discrete",
        "rhs_continuous",
        "rhs_discrete",
        "ratio",
    ]);
    let mut notes = Vec::new();
    for row in &t.rows {
        table.push(vec![
            row.label.clone(),
            row.n.to_string(),
            fmt(row.lhs_continuous),
            fmt(row.lhs_discrete),
            fmt(row.rhs_continuous),
            fmt(row.rhs_discrete),
            fmt_opt(row.ratio),
        ]);
        if let Some(note) = &row.note {
            notes.push(Value::String(format!("{} n={}: {note}", row.label, row.n)));
        }
    }
    let mut results = Map::new();
    results.insert("theorem".into(), Value::String(thm.to_string()));
    results.insert("min_ratio".into(), num(t.min_ratio));
    results.insert("max_ratio".into(), num(t.max_ratio));
    results.insert("spread".into(), num(t.spread));
    results.insert("notes".into(), Value::Array(notes));
    let th = &cfg.thresholds;
    let mut assertions = Vec::new();
    if let Some(m) = th.max_spread {
        assertions.push(Assertion::at_most("spread", t.spread, m));
    }
    if let Some(m) = th.min_ratio {
        assertions.push(Assertion::above("min_ratio", t.min_ratio, m));
    }
    Ok(Produced {
        table,
        results,
        assertions,
    })
}

fn rates(cfg: &RunConfig) -> latsamp::Result<Produced> {
    let (r, s) = (cfg.r.expect("validated"), cfg.s.expect("validated"));
    let mut table = Table::new(&["f_label", "n", "error", "modulus"]);
    let mut results = Map::new();
    let mut assertions = Vec::new();
    let th = &cfg.thresholds;
    for f in &cfg.functions {
        let st = rate_study(f, family(cfg), &cfg.spec, r, s, &cfg.ns)?;
        for ((n, e), m) in cfg.ns.iter().zip(&st.errors).zip(&st.moduli) {
            table.push(vec![st.label.clone(), n.to_string(), fmt(*e), fmt(*m)]);
        }
        let mut fit = Map::new();
        fit.insert("error_slope".into(), num(st.error_fit.slope));
        fit.insert("error_residual".into(), num(st.error_fit.residual));
        fit.insert("modulus_slope".into(), num(st.modulus_fit.slope));
        fit.insert("modulus_residual".into(), num(st.modulus_fit.residual));
        fit.insert("floored".into(), Value::Bool(st.error_fit.floored || st.modulus_fit.floored));
        fit.insert("endpoint_inconclusive".into(), Value::Bool(st.endpoint_inconclusive));
        results.insert(st.label.clone(), Value::Object(fit));
        if let (Some(target), Some(tol)) = (th.target_slope, th.slope_tol) {
            let dev = (st.error_fit.slope - target).abs();
            assertions.push(Assertion::at_most(format!("{}: |error slope - target|", st.label), dev, tol));
        }
        if let Some(gap) = th.max_slope_gap {
            let d = (st.error_fit.slope - st.modulus_fit.slope).abs();
            assertions.push(Assertion::at_most(format!("{}: slope gap", st.label), d, gap));
        }
    }
    Ok(Produced {
        table,
        results,
        assertions,
    })
}

fn counterexample(cfg: &RunConfig) -> latsamp::Result<Produced> {
    let (Family::QuasiInterp(w), NormSpec::Lebesgue { p }) = (family(cfg), &cfg.spec) else {
        unreachable!("validated by config")
    };
    let rows = counterexample_run(w, *p, &cfg.ns)?;
    let mut table = Table::new(&["n", "continuous_error", "discrete_error", "ratio"]);
    let mut extra = Vec::new();
    for r in &rows {
        table.push(vec![r.n.to_string(), fmt(r.continuous_error), fmt(r.discrete_error), fmt(r.ratio)]);
        let mut m = Map::new();
        m.insert("n".into(), Value::from(r.n));
        m.insert("max_coeff".into(), num(r.max_coeff));
        m.insert("norm_bound".into(), num(r.norm_bound));
        extra.push(Value::Object(m));
    }
    let disc_dev = rows.iter().map(|r| (r.discrete_error - 1.0).abs()).fold(0.0, f64::max);
    let monotone = rows.windows(2).all(|w| w[1].continuous_error < w[0].continuous_error);
    let last = rows.last().map(|r| r.ratio).unwrap_or(f64::NAN);
    let mut results = Map::new();
    results.insert("rows".into(), Value::Array(extra));
    results.insert("max_discrete_deviation".into(), num(disc_dev));
    results.insert("continuous_monotone".into(), Value::Bool(monotone));
    results.insert("final_ratio".into(), num(last));
    let th = &cfg.thresholds;
    let mut assertions = Vec::new();
    if let Some(tol) = th.discrete_tol {
        assertions.push(Assertion::at_most("|discrete error - 1|", disc_dev, tol));
    }
    if let Some(m) = th.min_final_ratio {
        assertions.push(Assertion::above("final ratio", last, m));
    }
    Ok(Produced {
        table,
        results,
        assertions,
    })
}

fn onesided(cfg: &RunConfig) -> latsamp::Result<Produced> {
    let m = cfg.grid.unwrap_or(1024);
    let rows = thg1_study(&cfg.functions, family(cfg), &cfg.ns, m, cfg.eps)?;
    let mut table = Table::new(&[
        "f_label",
        "n",
        "error",
        "one_sided",
        "besov",
        "ratio_one_sided",
        "ratio_besov",
        "converged",
    ]);
    let mut worst: f64 = 0.0;
    let mut all_converged = true;
    for r in &rows {
        table.push(vec![
            r.label.clone(),
            r.n.to_string(),
            fmt(r.error),
            fmt(r.one_sided),
            fmt(r.besov.value),
            fmt_opt(r.ratio_one_sided),
            fmt_opt(r.ratio_besov),
            r.converged.to_string(),
        ]);
        worst = worst.max(r.ratio_one_sided.unwrap_or(0.0));
        all_converged &= r.converged;
    }
    let mut results = Map::new();
    results.insert("max_ratio_one_sided".into(), num(worst));
    results.insert("all_converged".into(), Value::Bool(all_converged));
    let mut assertions = Vec::new();
    if let Some(b) = cfg.thresholds.max_ratio {
        assertions.push(Assertion::at_most("max ratio to one-sided", worst, b));
    }
    Ok(Produced {
        table,
        results,
        assertions,
    })
}

fn report(cfg: &RunConfig) -> latsamp::Result<Produced> {
    let mut table = Table::new(&["quantity", "n", "sup", "inf", "samples"]);
    let uniform = mz_probe(&cfg.spec, NodeScheme::Uniform, &cfg.ns, cfg.trials, cfg.seed)?;
    let jittered = mz_probe(&cfg.spec, NodeScheme::Jittered(cfg.jitter), &cfg.ns, cfg.trials, cfg.seed)?;
    let bern = bernstein_probe(&cfg.spec, &cfg.ns, cfg.trials, cfg.seed)?;
    for (name, stats) in [("mz_uniform", &uniform.per_n), ("mz_jittered", &jittered.per_n), ("bernstein", &bern)] {
        for st in stats {
            table.push(vec![name.into(), st.n.to_string(), fmt(st.sup), fmt(st.inf), st.samples.to_string()]);
        }
    }
    let bern_sup = bern.iter().map(|s| s.sup).fold(0.0, f64::max);
    let mz_sup = uniform.sup.max(jittered.sup);
    let mut results = Map::new();
    results.insert("mz_uniform_sup".into(), num(uniform.sup));
    results.insert("mz_uniform_inf".into(), num(uniform.inf));
    results.insert("mz_jittered_sup".into(), num(jittered.sup));
    results.insert("mz_jittered_inf".into(), num(jittered.inf));
    results.insert("bernstein_sup".into(), num(bern_sup));
    let dil = latsamp::norms::dilation_norm(&cfg.spec, 0.5).ok();
    results.insert("dilation_half".into(), num_opt(dil.map(|d| d.value)));
    let th = &cfg.thresholds;
    let mut assertions = Vec::new();
    if let Some(b) = th.mz_sup_bound {
        assertions.push(Assertion::below("MZ sup", mz_sup, b));
    }
    if let Some(f) = th.mz_inf_floor {
        assertions.push(Assertion::above("MZ inf (uniform)", uniform.inf, f));
    }
    if let Some(b) = th.bernstein_bound {
        assertions.push(Assertion::at_most("Bernstein sup", bern_sup, b));
    }
    Ok(Produced {
        table,
        results,
        assertions,
    })
}
