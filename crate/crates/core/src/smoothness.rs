//! Moduli of smoothness: the classical modulus `ω_r(f, δ)`, the semi-discrete
//! measure `‖(I - Ȧ_{γ/n})^s f‖_X + ‖(I - A_{γ/n})^r f‖_{X_n}`, the `Ω₂*`
//! variant on uniform nodes, and two realizations of the K-functional.

use crate::error::{invalid, Error, Result};
use crate::function::{build_cache, default_resolution, make_uniform_nodes, NodeSet, PointwiseFunction};
use crate::norms::{norm, NormSpec, StepFunction};
use crate::sampling::{error_pair, SamplingOperatorSpec};
use crate::steklov::{default_gamma, difference_value, required_resolution, SteklovOps};
use crate::trig::vp_mean;
use num_complex::Complex64;

/// Number of step sizes sampled by [`classical_modulus`].
pub const MODULUS_GRID: usize = 32;

/// The composite smoothness measure at scale `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusReport {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub gamma: f64,
    pub spec: String,
    /// `‖(I - Ȧ_{γ/n})^s f‖_X`.
    pub continuous_part: f64,
    /// `‖(I - A_{γ/n})^r f‖_{X_n}`.
    pub discrete_part: f64,
    pub total: f64,
}

fn binomial(r: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (r - i) as f64 / (i + 1) as f64)
}

/// Quadrature resolution for scale-`n` measures of `f` with window `h`.
pub fn measure_resolution(f: &PointwiseFunction, n: usize, h: f64) -> usize {
    default_resolution(n)
        .max(f.resolution_hint())
        .max(required_resolution(h))
        .next_power_of_two()
}

/// `Δ_h^r f(x) = Σ_j (-1)^{r-j} C(r,j) f(x + jh)` as a pointwise function.
pub fn forward_difference(f: &PointwiseFunction, h: f64, r: usize) -> PointwiseFunction {
    let g = f.clone();
    let mut bps = Vec::new();
    let mut sing = Vec::new();
    for j in 0..=r {
        let s = j as f64 * h;
        bps.extend(f.breakpoints().iter().map(|b| b - s));
        sing.extend(f.singular_points().iter().map(|b| b - s));
    }
    PointwiseFunction::circle(format!("D_{h}^{r}[{}]", f.label()), move |x| {
        (0..=r)
            .map(|j| {
                let sign = if (r - j).is_multiple_of(2) { 1.0 } else { -1.0 };
                g.value(x + j as f64 * h) * (sign * binomial(r, j))
            })
            .sum::<Complex64>()
    })
    .with_breakpoints(bps)
    .with_singular_points(sing)
    .with_resolution(f.resolution_hint())
}

/// Step sizes used for `ω_r(f, δ)`: the largest [`MODULUS_GRID`] - 1 points of the
/// fixed lattice `2^{j/4}` inside `(0, δ)`, plus `δ` itself.
pub fn modulus_steps(delta: f64) -> Vec<f64> {
    let top = (4.0 * delta.log2()).ceil() as i64;
    let mut hs: Vec<f64> = (0..)
        .map(|i| 2f64.powf((top - i) as f64 / 4.0))
        .filter(|&h| h < delta)
        .take(MODULUS_GRID - 1)
        .collect();
    hs.push(delta);
    hs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    hs
}

/// `ω_r(f, δ)_X = sup_{0<h≤δ} ‖Δ_h^r f‖_X` over [`modulus_steps`] (a lower bound).
pub fn classical_modulus(f: &PointwiseFunction, r: usize, delta: f64, spec: &NormSpec) -> Result<f64> {
    if spec.is_weighted() {
        return Err(Error::Unsupported(
            "the classical modulus needs a translation-invariant norm".into(),
        ));
    }
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be positive"));
    }
    if r == 0 {
        return Err(invalid("r", "must be positive"));
    }
    let res = f.resolution_hint().max(crate::function::DEFAULT_RESOLUTION);
    let mut best: f64 = 0.0;
    for h in modulus_steps(delta) {
        let d = forward_difference(f, h, r);
        best = best.max(norm(&build_cache(&d, res)?, spec)?);
    }
    Ok(best)
}

/// `‖(I - Ȧ_{γ/n})^s f‖_X + ‖(I - A_{γ/n})^r f‖_{X_n}`; `γ` defaults to `nπ/(2n+1)`.
pub fn semidiscrete_modulus(
    f: &PointwiseFunction,
    n: usize,
    r: usize,
    s: usize,
    spec: &NormSpec,
    nodes: &NodeSet,
    gamma: Option<f64>,
) -> Result<ModulusReport> {
    if 2 * r < s {
        return Err(invalid("s", format!("2r ≥ s violated: r = {r}, s = {s}")));
    }
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    let gamma = gamma.unwrap_or_else(|| default_gamma(n));
    let h = gamma / n as f64;
    let continuous_part = if s == 0 {
        0.0
    } else {
        let g = f.i_minus_a_pow(h, s, false)?;
        norm(&build_cache(&g, measure_resolution(f, n, h))?, spec)?
    };
    let values: Vec<f64> = nodes
        .nodes()
        .iter()
        .map(|&x| difference_value(f, h, r, true, x).norm())
        .collect();
    let discrete_part = StepFunction::from_values(nodes, values)?.norm(spec)?;
    Ok(ModulusReport {
        n,
        r,
        s,
        gamma,
        spec: spec.to_string(),
        continuous_part,
        discrete_part,
        total: continuous_part + discrete_part,
    })
}

/// `Ω₂*(f, 1/n)_X = ‖Σ_k |f(t_k) - A_h f(t_k)| χ_k‖_X + ‖f - A_h f‖_X`, `h = π/(2n+1)`.
pub fn omega2_star(f: &PointwiseFunction, n: usize, spec: &NormSpec) -> Result<f64> {
    let nodes = make_uniform_nodes(n)?;
    let rep = semidiscrete_modulus_centered(f, n, spec, &nodes)?;
    Ok(rep.0 + rep.1)
}

fn semidiscrete_modulus_centered(f: &PointwiseFunction, n: usize, spec: &NormSpec, nodes: &NodeSet) -> Result<(f64, f64)> {
    let h = crate::steklov::default_step(n);
    let values: Vec<f64> = nodes
        .nodes()
        .iter()
        .map(|&x| difference_value(f, h, 1, true, x).norm())
        .collect();
    let disc = StepFunction::from_values(nodes, values)?.norm(spec)?;
    let g = f.i_minus_a_pow(h, 1, true)?;
    let cont = norm(&build_cache(&g, measure_resolution(f, n, h))?, spec)?;
    Ok((disc, cont))
}

/// `‖f - V_m f‖_X + δ^s ‖(V_m f)^{(s)}‖_X` with `m = ⌈1/δ⌉`, an upper realization of `K_s(f, δ)`.
pub fn kfunc_vp(f: &PointwiseFunction, delta: f64, s: usize, spec: &NormSpec) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be positive"));
    }
    let m = (1.0 / delta).ceil() as usize;
    let res = default_resolution(2 * m).max(f.resolution_hint()).max(16 * m).next_power_of_two();
    let cache = build_cache(f, res)?;
    let t = vp_mean(&cache, m)?;
    let diff = f.sub(&t.to_function("V f"));
    let approx = norm(&build_cache(&diff, res)?, spec)?;
    let deriv = norm(&t.derivative(s as u32), spec)?;
    Ok(approx + delta.powi(s as i32) * deriv)
}

/// `‖f - V_n f‖_X + ‖f - V_n f‖_{X_n} + n^{-s}‖(V_n f)^{(s)}‖_X`, an upper
/// realization of the semi-discrete K-functional `K_s(f, 1/n)_{X_n}`.
pub fn kfunc_semidiscrete(f: &PointwiseFunction, n: usize, s: usize, spec: &NormSpec, nodes: &NodeSet) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    let res = default_resolution(2 * n).max(f.resolution_hint()).max(16 * n).next_power_of_two();
    let t = vp_mean(&build_cache(f, res)?, n)?;
    let (cont, disc) = error_pair(f, &t, spec, nodes)?;
    let deriv = norm(&t.derivative(s as u32), spec)?;
    Ok(cont + disc + (n as f64).powi(-(s as i32)) * deriv)
}

/// `R_s(f, 1/n) =‖f - G_n f‖_X + ‖f - G_n f‖_{X_n} + n^{-s}‖(G_n f)^{(s)}‖_X`.
pub fn realization(
    f: &PointwiseFunction,
    n: usize,
    s: usize,
    op: &SamplingOperatorSpec,
    spec: &NormSpec,
    nodes: &NodeSet,
) -> Result<f64> {
    if !op.family.is_periodic() {
        return Err(Error::Unsupported("realization needs a polynomial-valued operator".into()));
    }
    let g = op.apply(f)?;
    let (cont, disc) = error_pair(f, &g, spec, nodes)?;
    let deriv = norm(&g.derivative(s as u32), spec)?;
    Ok(cont + disc + (n as f64).powi(-(s as i32)) * deriv)
}
