//! Numerical experiments: assumption probes for sampling operators, MZ and
//! Bernstein ratios, equivalence tables, rate fits, the bump-train
//! counterexample and the one-sided error study.
//!
//! Every random draw comes from a ChaCha8 stream keyed by `(seed, n, trial)`,
//! and parallel maps collect in index order, so results do not depend on the
//! number of worker threads.

use crate::error::{invalid, Error, Result};
use crate::function::{build_cache, default_resolution, make_jittered_nodes, make_uniform_nodes, NodeSet, PointwiseFunction};
use crate::norms::{discrete_seminorm_poly, norm, NormSpec, StepFunction};
use crate::sampling::{error_pair, Family, SamplingOperatorSpec};
use crate::smoothness::{measure_resolution, semidiscrete_modulus};
use crate::solvers::{besov_sum, one_sided_best, BesovSum};
use crate::steklov::{default_step, SteklovOps};
use crate::trig::{vp_mean, TrigPoly, Window};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::fmt;

/// Deterministic stream for one `(n, trial)` task.
pub fn task_rng(seed: u64, n: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) ^ trial as u64);
    rng
}

/// Index `k` of a uniform node `x ≡ 2πk/(2n+1)`.
fn node_index(x: f64, n: usize) -> usize {
    let m = 2 * n + 1;
    ((x.rem_euclid(TAU) / TAU * m as f64).round() as usize) % m
}

/// Sup and inf of one ratio ensemble at a fixed `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioStats {
    pub n: usize,
    pub sup: f64,
    pub inf: f64,
    pub samples: usize,
}

impl RatioStats {
    fn from_ratios(n: usize, ratios: impl IntoIterator<Item = f64>) -> Self {
        let mut s = RatioStats {
            n,
            sup: 0.0,
            inf: f64::INFINITY,
            samples: 0,
        };
        for r in ratios {
            s.sup = s.sup.max(r);
            s.inf = s.inf.min(r);
            s.samples += 1;
        }
        if s.samples == 0 {
            s.inf = 0.0;
        }
        s
    }
}

/// `max/min` of the per-`n` sups.
pub fn sup_spread(stats: &[RatioStats]) -> f64 {
    spread(stats.iter().map(|s| s.sup))
}

/// `max/min` of the per-`n` infs.
pub fn inf_spread(stats: &[RatioStats]) -> f64 {
    spread(stats.iter().map(|s| s.inf))
}

fn spread(v: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = v.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Empirical constants of the stability and Jackson-type assumptions.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub probe: String,
    pub family: String,
    pub spec: String,
    pub s: usize,
    pub seed: u64,
    pub trials: usize,
    /// `‖G_n f‖_X / ‖f‖_{X_n}` over random node data.
    pub stability: Vec<RatioStats>,
    /// `n^s ‖T - G_n T‖_X / ‖T^{(s)}‖_X` over random `T ∈ 𝒯_n`.
    pub jackson: Vec<RatioStats>,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

fn check_range(ns: &[usize]) -> Result<()> {
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n", "need a non-empty, strictly increasing list of positive n"));
    }
    Ok(())
}

fn periodic_op(family: &Family, n: usize) -> Result<SamplingOperatorSpec> {
    if !family.is_periodic() {
        return Err(Error::Unsupported(format!("{family} does not map into trigonometric polynomials")));
    }
    SamplingOperatorSpec::periodic(family.clone(), n)
}

/// `(n, stability ratio, Jackson ratio)` for one trial.
type ProbeRow = (usize, Option<f64>, Option<f64>);

/// Probes (A₁)–(A₄) for `family` over `ns`.
pub fn probe_assumptions(
    family: &Family,
    spec: &NormSpec,
    s: usize,
    ns: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    check_range(ns)?;
    let tasks: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect();
    let results: Vec<Result<ProbeRow>> = tasks
        .par_iter()
        .map(|&(n, trial)| {
            let op = periodic_op(family, n)?;
            let nodes = make_uniform_nodes(n)?;
            let mut rng = task_rng(seed, n, trial);
            // node data in node-set order, fed to the operator in t_k order
            let data: Vec<f64> = (0..nodes.len()).map(|_| rng.sample(StandardNormal)).collect();
            let mut samples = vec![Complex64::new(0.0, 0.0); nodes.len()];
            for (x, v) in nodes.nodes().iter().zip(&data) {
                samples[node_index(*x, n)] = Complex64::new(*v, 0.0);
            }
            let disc = StepFunction::from_values(&nodes, data.iter().map(|v| v.abs()).collect())?.norm(spec)?;
            let stab = if disc > 0.0 {
                Some(norm(&op.apply_samples(&samples)?, spec)? / disc)
            } else {
                None
            };
            let t = TrigPoly::random(n, &mut rng);
            let ds = norm(&t.derivative(s as u32), spec)?;
            let jack = if ds > 0.0 {
                let diff = t.sub(&op.apply_poly(&t)?);
                Some((n as f64).powi(s as i32) * norm(&diff, spec)? / ds)
            } else {
                None
            };
            Ok((n, stab, jack))
        })
        .collect();
    let results: Vec<ProbeRow> = results.into_iter().collect::<Result<_>>()?;
    let per = |pick: fn(&ProbeRow) -> Option<f64>| -> Vec<RatioStats> {
        ns.iter()
            .map(|&n| RatioStats::from_ratios(n, results.iter().filter(|r| r.0 == n).filter_map(pick)))
            .collect()
    };
    let stability = per(|r| r.1);
    let jackson = per(|r| r.2);
    let sup = |v: &[RatioStats]| v.iter().map(|s| s.sup).fold(0.0, f64::max);
    let inf = |v: &[RatioStats]| v.iter().map(|s| s.inf).fold(f64::INFINITY, f64::min);
    Ok(ProbeReport {
        probe: "assumptions".into(),
        family: family.to_string(),
        spec: spec.to_string(),
        s,
        seed,
        trials,
        k1: sup(&stability),
        k2: inf(&stability),
        k3: sup(&jackson),
        k4: inf(&jackson),
        stability,
        jackson,
    })
}

/// Node placement for MZ probes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeScheme {
    Uniform,
    /// Uniform nodes moved by up to `jitter` mesh widths, fresh per trial.
    Jittered(f64),
}

impl fmt::Display for NodeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeScheme::Uniform => write!(f, "uniform"),
            NodeScheme::Jittered(j) => write!(f, "jittered:{j}"),
        }
    }
}

impl NodeScheme {
    pub fn nodes(&self, n: usize, seed: u64, trial: usize) -> Result<NodeSet> {
        match *self {
            NodeScheme::Uniform => make_uniform_nodes(n),
            NodeScheme::Jittered(j) => {
                let key = seed ^ ((n as u64) << 40) ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                make_jittered_nodes(n, key, j)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MzReport {
    pub spec: String,
    pub scheme: String,
    pub seed: u64,
    pub trials: usize,
    /// `‖T‖_{X_n} / ‖T‖_X` per `n`.
    pub per_n: Vec<RatioStats>,
    pub sup: f64,
    pub inf: f64,
}

/// Marcinkiewicz–Zygmund ratios `‖T‖_{X_n}/‖T‖_X` over random `T ∈ 𝒯_n`.
pub fn mz_probe(spec: &NormSpec, scheme: NodeScheme, ns: &[usize], trials: usize, seed: u64) -> Result<MzReport> {
    check_range(ns)?;
    let tasks: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect();
    let ratios: Vec<Result<(usize, f64)>> = tasks
        .par_iter()
        .map(|&(n, trial)| {
            let mut rng = task_rng(seed, n, trial);
            let t = TrigPoly::random(n, &mut rng);
            let nodes = scheme.nodes(n, seed, trial)?;
            Ok((n, discrete_seminorm_poly(&t, &nodes, spec)? / norm(&t, spec)?))
        })
        .collect();
    let ratios: Vec<(usize, f64)> = ratios.into_iter().collect::<Result<_>>()?;
    let per_n: Vec<RatioStats> = ns
        .iter()
        .map(|&n| RatioStats::from_ratios(n, ratios.iter().filter(|r| r.0 == n).map(|r| r.1)))
        .collect();
    Ok(MzReport {
        spec: spec.to_string(),
        scheme: scheme.to_string(),
        seed,
        trials,
        sup: per_n.iter().map(|s| s.sup).fold(0.0, f64::max),
        inf: per_n.iter().map(|s| s.inf).fold(f64::INFINITY, f64::min),
        per_n,
    })
}

/// Bernstein ratios `‖T'‖_X / (n‖T‖_X)` over random `T ∈ 𝒯_n`.
pub fn bernstein_probe(spec: &NormSpec, ns: &[usize], trials: usize, seed: u64) -> Result<Vec<RatioStats>> {
    check_range(ns)?;
    ns.iter()
        .map(|&n| {
            let r: Vec<Result<f64>> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let t = TrigPoly::random(n, &mut task_rng(seed, n, trial));
                    Ok(norm(&t.derivative(1), spec)? / (n as f64 * norm(&t, spec)?))
                })
                .collect();
            Ok(RatioStats::from_ratios(n, r.into_iter().collect::<Result<Vec<_>>>()?))
        })
        .collect()
}

/// Ratios `‖(I - Ȧ_h)^{2r} f‖_X / ‖(I - A_h)^r f‖_X` at `h = π/(2n+1)`; returns `(c, C)`.
pub fn steklov_bound_probe(fs: &[PointwiseFunction], ns: &[usize], r: usize, spec: &NormSpec) -> Result<(f64, f64)> {
    check_range(ns)?;
    let tasks: Vec<(usize, usize)> = (0..fs.len()).flat_map(|i| ns.iter().map(move |&n| (i, n))).collect();
    let ratios: Vec<Result<Option<f64>>> = tasks
        .par_iter()
        .map(|&(i, n)| {
            let f = &fs[i];
            let h = default_step(n);
            let res = measure_resolution(f, n, h);
            let a = norm(&build_cache(&f.i_minus_a_pow(h, 2 * r, false)?, res)?, spec)?;
            let b = norm(&build_cache(&f.i_minus_a_pow(h, r, true)?, res)?, spec)?;
            Ok(if a < 1e-12 && b < 1e-12 { None } else { Some(a / b) })
        })
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for r in ratios {
        if let Some(v) = r? {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok((lo, hi))
}

/// Which two-sided estimate an equivalence table checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Strong converse for a general operator.
    ThC,
    /// Bochner–Riesz quasi-interpolants.
    BrRho,
    /// Fejér quasi-interpolants.
    BrPhi,
    /// Realization `R_s` of the K-functional.
    ThR,
    /// The semi-discrete K-functional itself, realized by `V_n f`.
    ThK,
}

impl Theorem {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "thC" => Theorem::ThC,
            "br-rho" => Theorem::BrRho,
            "br-phi" => Theorem::BrPhi,
            "thR" => Theorem::ThR,
            "thK" => Theorem::ThK,
            _ => return Err(invalid("theorem", format!("unknown id `{s}`"))),
        })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::ThC => "thC",
            Theorem::BrRho => "br-rho",
            Theorem::BrPhi => "br-phi",
            Theorem::ThR => "thR",
            Theorem::ThK => "thK",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivRow {
    pub label: String,
    pub n: usize,
    pub lhs_continuous: f64,
    pub lhs_discrete: f64,
    pub rhs_continuous: f64,
    pub rhs_discrete: f64,
    /// `None` for rows excluded from the summary.
    pub ratio: Option<f64>,
    pub note: Option<String>,
}

impl EquivRow {
    pub fn lhs(&self) -> f64 {
        self.lhs_continuous + self.lhs_discrete
    }

    pub fn rhs(&self) -> f64 {
        self.rhs_continuous + self.rhs_discrete
    }
}

#[derive(Clone, Debug)]
pub struct EquivTable {
    pub theorem: Theorem,
    pub family: String,
    pub spec: String,
    pub r: usize,
    pub s: usize,
    pub rows: Vec<EquivRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub spread: f64,
}

/// Tolerance of the zero-row rule.
pub const ZERO_ROW: f64 = 1e-9;

fn lhs_parts(thm: Theorem, f: &PointwiseFunction, family: &Family, n: usize, s: usize, spec: &NormSpec, nodes: &NodeSet) -> Result<(f64, f64)> {
    let (t, smooth) = match thm {
        Theorem::ThK => {
            let res = default_resolution(2 * n).max(f.resolution_hint()).max(16 * n).next_power_of_two();
            (vp_mean(&build_cache(f, res)?, n)?, true)
        }
        Theorem::ThR => (periodic_op(family, n)?.apply(f)?, true),
        _ => (periodic_op(family, n)?.apply(f)?, false),
    };
    let (cont, disc) = error_pair(f, &t, spec, nodes)?;
    let extra = if smooth {
        (n as f64).powi(-(s as i32)) * norm(&t.derivative(s as u32), spec)?
    } else {
        0.0
    };
    Ok((cont + extra, disc))
}

/// Both sides of a two-sided estimate for every `(f, n)`; rows sorted by label then `n`.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_study(
    thm: Theorem,
    fs: &[PointwiseFunction],
    family: &Family,
    spec: &NormSpec,
    r: usize,
    s: usize,
    ns: &[usize],
    gamma: Option<f64>,
) -> Result<EquivTable> {
    check_range(ns)?;
    if 2 * r < s {
        return Err(invalid("s", format!("2r ≥ s violated: r = {r}, s = {s}")));
    }
    // the Fejér converse rests on Hilbert-transform boundedness, classical only in L_p, 1 < p < ∞
    let verified = thm != Theorem::BrPhi || matches!(*spec, NormSpec::Lebesgue { p } if p > 1.0 && p.is_finite());
    let tasks: Vec<(usize, usize)> = (0..fs.len()).flat_map(|i| ns.iter().map(move |&n| (i, n))).collect();
    let rows: Vec<Result<EquivRow>> = tasks
        .par_iter()
        .map(|&(i, n)| {
            let f = &fs[i];
            let nodes = make_uniform_nodes(n)?;
            let (lc, ld) = lhs_parts(thm, f, family, n, s, spec, &nodes)?;
            let m = semidiscrete_modulus(f, n, r, s, spec, &nodes, gamma)?;
            let mut row = EquivRow {
                label: f.label().to_string(),
                n,
                lhs_continuous: lc,
                lhs_discrete: ld,
                rhs_continuous: m.continuous_part,
                rhs_discrete: m.discrete_part,
                ratio: None,
                note: None,
            };
            let (l, rh) = (row.lhs(), row.rhs());
            if !verified {
                row.note = Some("precondition unverified".into());
            } else if l < 1e-12 && rh < 1e-12 {
                row.note = Some("both sides vanish".into());
            } else if rh == 0.0 {
                row.note = Some(if l <= ZERO_ROW {
                    "rhs = 0, lhs within tolerance".into()
                } else {
                    "rhs = 0 with lhs > 0".into()
                });
            } else if l <= ZERO_ROW {
                row.note = Some("lhs vanishes: operator reproduces f".into());
            } else {
                row.ratio = Some(l / rh);
            }
            Ok(row)
        })
        .collect();
    let mut rows: Vec<EquivRow> = rows.into_iter().collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.label.cmp(&b.label).then(a.n.cmp(&b.n)));
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(EquivTable {
        theorem: thm,
        family: family.to_string(),
        spec: spec.to_string(),
        r,
        s,
        spread: if min_ratio > 0.0 && min_ratio.is_finite() { max_ratio / min_ratio } else { f64::INFINITY },
        min_ratio: if ratios.is_empty() { 0.0 } else { min_ratio },
        max_ratio,
        rows,
    })
}

/// Least-squares fit of `log value = slope · log n + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log fit.
    pub residual: f64,
    pub ns: Vec<usize>,
    /// True when zero values were replaced by the machine floor.
    pub floored: bool,
}

/// Fits a power law through at least five points.
pub fn fit_rate(ns: &[usize], values: &[f64]) -> Result<RateFit> {
    if ns.len() < 5 || ns.len() != values.len() {
        return Err(invalid("n", "a rate fit needs at least five (n, value) pairs"));
    }
    let floor = f64::EPSILON;
    let floored = values.iter().any(|&v| v < floor);
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|&v| v.max(floor).ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / m).sqrt();
    Ok(RateFit {
        slope,
        intercept,
        residual,
        ns: ns.to_vec(),
        floored,
    })
}

#[derive(Clone, Debug)]
pub struct RateStudy {
    pub label: String,
    /// `‖f - G_n f‖_X + ‖f - G_n f‖_{X_n}`.
    pub errors: Vec<f64>,
    /// Semi-discrete modulus totals.
    pub moduli: Vec<f64>,
    pub error_fit: RateFit,
    pub modulus_fit: RateFit,
    /// The modulus decays at the saturation order `s`, where the fit says nothing.
    pub endpoint_inconclusive: bool,
}

/// Error and modulus decay of `G_n f` over `ns`.
pub fn rate_study(f: &PointwiseFunction, family: &Family, spec: &NormSpec, r: usize, s: usize, ns: &[usize]) -> Result<RateStudy> {
    check_range(ns)?;
    let pairs: Vec<Result<(f64, f64)>> = ns
        .par_iter()
        .map(|&n| {
            let nodes = make_uniform_nodes(n)?;
            let t = periodic_op(family, n)?.apply(f)?;
            let (c, d) = error_pair(f, &t, spec, &nodes)?;
            let m = semidiscrete_modulus(f, n, r, s, spec, &nodes, None)?;
            Ok((c + d, m.total))
        })
        .collect();
    let pairs: Vec<(f64, f64)> = pairs.into_iter().collect::<Result<_>>()?;
    let errors: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let moduli: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let error_fit = fit_rate(ns, &errors)?;
    let modulus_fit = fit_rate(ns, &moduli)?;
    Ok(RateStudy {
        label: f.label().to_string(),
        endpoint_inconclusive: (modulus_fit.slope + s as f64).abs() < 0.1,
        errors,
        moduli,
        error_fit,
        modulus_fit,
    })
}

/// `ψ(x) = exp(1 - 1/(1 - 4x²))` on `(-1/2, 1/2)`, with `ψ(0) = 1`.
pub fn bump(x: f64) -> f64 {
    let q = 1.0 - 4.0 * x * x;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// `∫_{-1/2}^{1/2} ψ(u)^p du` by composite Gauss–Legendre.
pub fn bump_moment(p: f64) -> f64 {
    let (t, w) = crate::quadrature::gl_default();
    let panels = 2000;
    let d = 1.0 / panels as f64;
    (0..panels)
        .map(|i| {
            let a = -0.5 + i as f64 * d;
            t.iter().zip(w.iter()).map(|(t, w)| w * d * bump(a + t * d).powf(p)).sum::<f64>()
        })
        .sum()
}

/// Bump width `w_n = min(2π(2n+1)^{-2p}, π/(2n+1))`, so `‖χ_{[0,w_n)}‖_p ≤ (2n+1)^{-2}`.
pub fn bump_width(n: usize, p: f64) -> f64 {
    let m = (2 * n + 1) as f64;
    (TAU * m.powf(-2.0 * p)).min(PI / m)
}

/// `f_n(x) = Σ_j e^{i k₀ t_j} ψ((x - t_j)/w_n)` on the nodes `t_j = 2πj/(2n+1)`.
pub fn bump_train(n: usize, k0: i64, p: f64) -> PointwiseFunction {
    let m = 2 * n + 1;
    let w = bump_width(n, p);
    let mut bps = Vec::with_capacity(2 * m);
    for j in 0..m {
        let t = TAU * j as f64 / m as f64;
        bps.push(t - 0.5 * w);
        bps.push(t + 0.5 * w);
    }
    PointwiseFunction::circle(format!("bumps{n}"), move |x| {
        let j = node_index(x, n);
        let t = TAU * j as f64 / m as f64;
        let u = (x - t + PI).rem_euclid(TAU) - PI;
        let b = bump(u / w);
        if b == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(b, k0 as f64 * t)
        }
    })
    // the edges are flat but not analytic; grading toward them keeps Gauss rules exact
    .with_breakpoints(bps.clone())
    .with_singular_points(bps)
    .with_resolution(default_resolution(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterRow {
    pub n: usize,
    pub continuous_error: f64,
    pub discrete_error: f64,
    /// `discrete_error / continuous_error`.
    pub ratio: f64,
    /// Largest coefficient of `G_n f_n`.
    pub max_coeff: f64,
    /// `(2n+1)‖ψ‖_∞ ‖χ_{[0,w_n)}‖_X`.
    pub norm_bound: f64,
}

/// Bump trains annihilated by a quasi-interpolant whose window vanishes at `k₀/n`.
pub fn counterexample_run(window: &Window, p: f64, ns: &[usize]) -> Result<Vec<CounterRow>> {
    check_range(ns)?;
    let spec = NormSpec::lebesgue(p)?;
    let rows: Vec<Result<CounterRow>> = ns
        .par_iter()
        .map(|&n| {
            let k0 = (1..=n as i64)
                .find(|&k| window.eval(k as f64 / n as f64) == 0.0)
                .ok_or_else(|| Error::Unsupported(format!("window {} has no zero at k/n ≤ 1", window.name())))?;
            let f = bump_train(n, k0, p);
            let g = SamplingOperatorSpec::periodic(Family::QuasiInterp(window.clone()), n)?.apply(&f)?;
            let nodes = make_uniform_nodes(n)?;
            let (c, d) = error_pair(&f, &g, &spec, &nodes)?;
            let m = (2 * n + 1) as f64;
            Ok(CounterRow {
                n,
                continuous_error: c,
                discrete_error: d,
                ratio: d / c,
                max_coeff: g.max_abs_coeff(),
                norm_bound: m * (bump_width(n, p) / TAU).powf(1.0 / p),
            })
        })
        .collect();
    rows.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct OneSidedRow {
    pub label: String,
    pub n: usize,
    /// `‖f - G_n f‖₁`.
    pub error: f64,
    pub one_sided: f64,
    pub besov: BesovSum,
    pub ratio_one_sided: Option<f64>,
    pub ratio_besov: Option<f64>,
    pub converged: bool,
}

/// Errors against `Ẽ_n(f)₁` and the dilation sum, on an `m`-point constraint grid.
pub fn thg1_study(fs: &[PointwiseFunction], family: &Family, ns: &[usize], m: usize, eps: f64) -> Result<Vec<OneSidedRow>> {
    check_range(ns)?;
    let l1 = NormSpec::lebesgue(1.0)?;
    let tasks: Vec<(usize, usize)> = (0..fs.len()).flat_map(|i| ns.iter().map(move |&n| (i, n))).collect();
    let rows: Vec<Result<OneSidedRow>> = tasks
        .par_iter()
        .map(|&(i, n)| {
            let f = &fs[i];
            let g = periodic_op(family, n)?.apply(f)?;
            let res = default_resolution(n).max(f.resolution_hint());
            let error = norm(&build_cache(&f.sub(&g.to_function("G f")), res)?, &l1)?;
            let os = one_sided_best(f, n, &l1, m.max(16 * n))?;
            let besov = besov_sum(f, n, &l1, eps)?;
            let ratio = |den: f64| if error <= ZERO_ROW && den <= ZERO_ROW { None } else { Some(error / den) };
            Ok(OneSidedRow {
                label: f.label().to_string(),
                n,
                error,
                ratio_one_sided: ratio(os.value),
                ratio_besov: ratio(besov.value),
                one_sided: os.value,
                besov,
                converged: os.converged,
            })
        })
        .collect();
    rows.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub errors: Vec<f64>,
    pub moduli: Vec<f64>,
    pub error_converges: bool,
    pub modulus_converges: bool,
}

impl Verdict {
    pub fn agree(&self) -> bool {
        self.error_converges == self.modulus_converges
    }
}

/// Factor-4 decrease heuristic: a sequence "converges" when its last value is
/// below a quarter of its first.
pub fn trend_converges(v: &[f64]) -> bool {
    match (v.first(), v.last()) {
        (Some(&a), Some(&b)) => b < a / 4.0 || a <= ZERO_ROW && b <= ZERO_ROW,
        _ => false,
    }
}

/// Convergence verdicts for `‖f - G_n f‖_X` and `‖(I - A_{γ/n})^r f‖_{X_n}`.
pub fn convergence_criterion(f: &PointwiseFunction, family: &Family, spec: &NormSpec, r: usize, ns: &[usize]) -> Result<Verdict> {
    check_range(ns)?;
    let pairs: Vec<Result<(f64, f64)>> = ns
        .par_iter()
        .map(|&n| {
            let nodes = make_uniform_nodes(n)?;
            let t = periodic_op(family, n)?.apply(f)?;
            let (c, _) = error_pair(f, &t, spec, &nodes)?;
            let m = semidiscrete_modulus(f, n, r, 0, spec, &nodes, None)?;
            Ok((c, m.discrete_part))
        })
        .collect();
    let pairs: Vec<(f64, f64)> = pairs.into_iter().collect::<Result<_>>()?;
    let errors: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let moduli: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(Verdict {
        error_converges: trend_converges(&errors),
        modulus_converges: trend_converges(&moduli),
        errors,
        moduli,
    })
}

/// `‖ψ‖_∞ = ψ(0) = 1`; kept next to [`bump`] for the norm bound.
pub const BUMP_SUP: f64 = 1.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{cusp, exp_cos, smooth_trig, square_wave};

    fn l2() -> NormSpec {
        NormSpec::lebesgue(2.0).unwrap()
    }

    #[test]
    fn rng_streams_are_keyed() {
        let a: u64 = task_rng(7, 8, 0).random();
        let b: u64 = task_rng(7, 8, 0).random();
        let c: u64 = task_rng(7, 8, 1).random();
        let d: u64 = task_rng(7, 16, 0).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn lagrange_probe() {
        let r = probe_assumptions(&Family::Lagrange, &l2(), 1, &[4, 8], 10, 3).unwrap();
        // interpolation reproduces 𝒯_n and is an L2 isometry from node data
        assert!(r.k3 < 1e-12);
        assert!((r.k1 - 1.0).abs() < 1e-12 && (r.k2 - 1.0).abs() < 1e-12, "{} {}", r.k1, r.k2);
        let again = probe_assumptions(&Family::Lagrange, &l2(), 1, &[4, 8], 10, 3).unwrap();
        assert_eq!(r.stability, again.stability);
    }

    #[test]
    fn fejer_jackson_constant_in_l2() {
        // n(T - Q T) has multiplier |k|, so the L2 ratio is 1 for every T
        let r = probe_assumptions(&Family::QuasiInterp(Window::Fejer), &l2(), 1, &[8, 16], 5, 1).unwrap();
        assert!((r.k3 - 1.0).abs() < 1e-10 && (r.k4 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mz_uniform_l2_is_parseval() {
        let r = mz_probe(&l2(), NodeScheme::Uniform, &[4, 16], 10, 9).unwrap();
        assert!((r.sup - 1.0).abs() < 1e-10 && (r.inf - 1.0).abs() < 1e-10);
        let j = mz_probe(&NormSpec::lebesgue(4.0).unwrap(), NodeScheme::Jittered(0.3), &[8], 5, 9).unwrap();
        assert!(j.sup < 10.0 && j.inf > 0.0);
    }

    #[test]
    fn bernstein_bound() {
        for p in [1.0, 2.0, 4.0] {
            let b = bernstein_probe(&NormSpec::lebesgue(p).unwrap(), &[8], 10, 5).unwrap();
            assert!(b[0].sup <= 1.0001, "{p}: {}", b[0].sup);
        }
    }

    #[test]
    fn fit_recovers_power() {
        let ns = [8, 16, 32, 64, 128];
        let v: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-1.5)).collect();
        let f = fit_rate(&ns, &v).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12 && f.residual < 1e-12);
        assert!(fit_rate(&ns[..4], &v[..4]).is_err());
    }

    #[test]
    fn counterexample_small() {
        let rows = counterexample_run(&Window::Fejer, 2.0, &[4, 8]).unwrap();
        let mom = bump_moment(2.0);
        for row in &rows {
            assert!((row.discrete_error - 1.0).abs() < 1e-6, "{row:?}");
            assert!(row.max_coeff <= 1e-9);
            // disjoint bumps: ‖f_n‖₂² = (2n+1) w_n ∫ψ² / 2π
            let m = (2 * row.n + 1) as f64;
            let exact = (m * bump_width(row.n, 2.0) * mom / TAU).sqrt();
            assert!((row.continuous_error - exact).abs() < 1e-6 * exact, "{} {exact}", row.continuous_error);
            assert!(row.continuous_error <= row.norm_bound * BUMP_SUP);
        }
        assert!(rows[1].continuous_error < rows[0].continuous_error);
        assert!(counterexample_run(&Window::Dirichlet, 2.0, &[4]).is_err());
    }

    #[test]
    fn equivalence_excludes_reproduced_rows() {
        let t = smooth_trig();
        let table = equivalence_study(Theorem::ThC, &[t], &Family::Lagrange, &l2(), 1, 2, &[4, 8], None).unwrap();
        assert!(table.rows.iter().all(|r| r.ratio.is_none() && r.note.is_some()));
        let table = equivalence_study(
            Theorem::BrRho,
            &[square_wave()],
            &Family::QuasiInterp(Window::BochnerRiesz(1.0)),
            &l2(),
            1,
            2,
            &[8, 16],
            None,
        )
        .unwrap();
        assert!(table.min_ratio > 0.0 && table.spread < 400.0, "{table:?}");
        assert!(equivalence_study(Theorem::ThC, &[square_wave()], &Family::Lagrange, &l2(), 1, 3, &[8], None).is_err());
        let fejer = Family::QuasiInterp(Window::Fejer);
        let l1 = NormSpec::lebesgue(1.0).unwrap();
        let table = equivalence_study(Theorem::BrPhi, &[square_wave()], &fejer, &l1, 1, 1, &[8], None).unwrap();
        assert_eq!(table.rows[0].note.as_deref(), Some("precondition unverified"));
        assert!(table.rows[0].ratio.is_none());
    }

    #[test]
    fn verdicts_agree_on_smooth_input() {
        let v = convergence_criterion(&exp_cos(), &Family::Lagrange, &l2(), 1, &[4, 8, 16]).unwrap();
        assert!(v.error_converges && v.modulus_converges);
        let s = steklov_bound_probe(&[cusp(1.5)], &[8, 16], 1, &l2()).unwrap();
        assert!(s.0 > 0.0 && s.1 / s.0 < 100.0);
    }
}
