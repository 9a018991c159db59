//! Best approximation `E_n(f)_X`, one-sided best approximation `Ẽ_n(f)_1`
//! and the dilation-weighted sum `Σ_ν ‖δ_{2^{-ν}}‖ E_{2^{ν-1}n}(f)`.
//!
//! One-sided and grid `L₁` problems are linear programs in the real basis
//! `1, cos x, sin x, …, cos nx, sin nx`. Both are solved through their duals,
//! which have only `2n + 1` equality rows; the primal coefficients are the
//! row multipliers of the dual.

use crate::error::{invalid, Error, Result};
use crate::function::{build_cache, default_resolution, wrap_angle, DenseGridCache, PointwiseFunction};
use crate::lp::{self, LpProblem, LpStatus};
use crate::norms::{dilation_norm, norm, NormSpec};
use crate::trig::{partial_sum, vp_mean, TrigPoly};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Largest degree handled by the simplex solvers.
pub const LP_MAX_DEGREE: usize = 32;
/// Largest constraint grid handled by the simplex solvers.
pub const LP_MAX_GRID: usize = 2048;
/// Degree cap for [`besov_sum`].
pub const BESOV_DEGREE_CAP: usize = 4096;
/// Coordinate descent is on by default up to this degree.
pub const REFINE_MAX_DEGREE: usize = 8;
const MAX_SWEEPS: usize = 200;
const LP_MAX_PIVOTS: usize = 500_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quality {
    /// Orthogonal projection in `L₂`.
    Exact,
    /// Best of `S_n f` and a de la Vallée Poussin mean.
    NearBest,
    /// Improved by a grid LP or coordinate descent.
    Refined,
}

#[derive(Clone, Debug)]
pub struct BestApproxResult {
    pub t: TrigPoly,
    /// `‖f - t‖_X`.
    pub value: f64,
    pub quality: Quality,
}

#[derive(Clone, Debug)]
pub struct OneSidedResult {
    pub lower: TrigPoly,
    pub upper: TrigPoly,
    /// Grid-discretized `‖Q - q‖₁`.
    pub value: f64,
    /// Largest violation of `q ≤ f ≤ Q` over the grid.
    pub feasibility_gap: f64,
    /// Sum of the primal-dual gaps of the two LPs.
    pub duality_gap: f64,
    pub converged: bool,
}

/// Constraint grid for the `L₁` programs: `M` uniform points plus the
/// breakpoints of `f`, where both one-sided limits become separate rows.
#[derive(Clone, Debug)]
pub struct ConstraintGrid {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    /// Quadrature weights of the normalized measure; they sum to 1.
    pub weights: Vec<f64>,
}

impl ConstraintGrid {
    pub fn new(f: &PointwiseFunction, m: usize) -> Result<Self> {
        if m < 4 {
            return Err(invalid("m", "grid too small"));
        }
        // (position, is_breakpoint)
        let mut pos: Vec<(f64, bool)> = (0..m).map(|j| (-PI + TAU * j as f64 / m as f64, false)).collect();
        for &b in f.breakpoints() {
            let b = wrap_angle(b);
            let j = (((b + PI) / TAU) * m as f64).round() as usize % m;
            if (pos[j].0 - b).abs() < 1e-12 || (j == 0 && (b - PI).abs() < 1e-12) {
                pos[j] = (pos[j].0, true);
            } else {
                pos.push((b, true));
            }
        }
        pos.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pos.dedup_by(|a, b| {
            let same = (a.0 - b.0).abs() < 1e-12;
            if same {
                b.1 |= a.1;
            }
            same
        });
        let k = pos.len();
        let real = |x: f64| -> Result<f64> {
            let v = f.value(x);
            if !v.re.is_finite() || v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
                return Err(Error::Unsupported(format!("{} is not real and finite at {x}", f.label())));
            }
            Ok(v.re)
        };
        let mut grid = ConstraintGrid {
            points: Vec::new(),
            values: Vec::new(),
            weights: Vec::new(),
        };
        for i in 0..k {
            let prev = if i == 0 { pos[k - 1].0 - TAU } else { pos[i - 1].0 };
            let next = if i + 1 == k { pos[0].0 + TAU } else { pos[i + 1].0 };
            let w = 0.5 * (next - prev) / TAU;
            let (y, brk) = pos[i];
            if brk {
                let eta = 1e-12 * y.abs().max(1.0);
                for v in [real(y - eta)?, real(y + eta)?] {
                    grid.points.push(y);
                    grid.values.push(v);
                    grid.weights.push(0.5 * w);
                }
            } else {
                grid.points.push(y);
                grid.values.push(real(y)?);
                grid.weights.push(w);
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ_j w_j |v_j|`.
    pub fn l1(&self, v: &[f64]) -> f64 {
        self.weights.iter().zip(v).map(|(w, v)| w * v.abs()).sum()
    }
}

/// Default constraint grid size for degree `n`.
pub fn default_grid(n: usize) -> usize {
    (16 * n).clamp(1024, LP_MAX_GRID)
}

/// `[1, cos x, sin x, …, cos nx, sin nx]`.
pub fn real_basis(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * n + 1);
    out.push(1.0);
    for k in 1..=n {
        let (s, c) = (k as f64 * x).sin_cos();
        out.push(c);
        out.push(s);
    }
    out
}

/// Real-basis coefficients to exponential coefficients.
pub fn real_to_poly(a: &[f64]) -> Result<TrigPoly> {
    let n = a.len() / 2;
    let mut t = TrigPoly::zero(n);
    *t.coeff_mut(0) = Complex64::new(a[0], 0.0);
    for k in 1..=n {
        let (c, s) = (a[2 * k - 1], a[2 * k]);
        *t.coeff_mut(k as i64) = Complex64::new(0.5 * c, -0.5 * s);
        *t.coeff_mut(-(k as i64)) = Complex64::new(0.5 * c, 0.5 * s);
    }
    Ok(t)
}

fn basis_rows(grid: &ConstraintGrid, n: usize) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = grid.points.iter().map(|&y| real_basis(n, y)).collect();
    (0..2 * n + 1).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

fn eval_real(a: &[f64], phi: &[Vec<f64>], j: usize) -> f64 {
    a.iter().zip(phi).map(|(a, row)| a * row[j]).sum()
}

fn check_lp_size(n: usize, grid: &ConstraintGrid) -> Result<()> {
    if n > LP_MAX_DEGREE {
        return Err(invalid("n", format!("{n} exceeds the simplex cap {LP_MAX_DEGREE}")));
    }
    if grid.len() < 16 * n.max(1) {
        return Err(invalid("m", format!("grid of {} points is below 16n", grid.len())));
    }
    if grid.len() > LP_MAX_GRID + 64 {
        return Err(invalid("m", format!("grid of {} points exceeds the simplex cap", grid.len())));
    }
    Ok(())
}

/// `min Σ w_j Q(y_j)` subject to `Q(y_j) ≥ v_j`; returns real coefficients.
fn upper_envelope(phi: &[Vec<f64>], grid: &ConstraintGrid, values: &[f64]) -> (Vec<f64>, lp::LpSolution) {
    let c: Vec<f64> = phi.iter().map(|row| row.iter().zip(&grid.weights).map(|(p, w)| p * w).sum()).collect();
    let m = grid.len();
    let problem = LpProblem {
        a: phi.to_vec(),
        b: c,
        c: values.to_vec(),
        lower: vec![0.0; m],
        upper: vec![f64::INFINITY; m],
    };
    let sol = lp::solve(&problem, LP_MAX_PIVOTS);
    (sol.dual.clone(), sol)
}

/// `Ẽ_n(f)₁` on a fixed constraint grid.
pub fn one_sided_on(grid: &ConstraintGrid, n: usize) -> Result<OneSidedResult> {
    check_lp_size(n, grid)?;
    let phi = basis_rows(grid, n);
    let (aq_up, s_up) = upper_envelope(&phi, grid, &grid.values);
    let neg: Vec<f64> = grid.values.iter().map(|v| -v).collect();
    let (aq_lo, s_lo) = upper_envelope(&phi, grid, &neg);
    let aq_lo: Vec<f64> = aq_lo.iter().map(|a| -a).collect();
    let mut gap: f64 = 0.0;
    let mut value = 0.0;
    for j in 0..grid.len() {
        let up = eval_real(&aq_up, &phi, j);
        let lo = eval_real(&aq_lo, &phi, j);
        gap = gap.max(grid.values[j] - up).max(lo - grid.values[j]);
        value += grid.weights[j] * (up - lo);
    }
    let converged = s_up.status == LpStatus::Optimal && s_lo.status == LpStatus::Optimal;
    Ok(OneSidedResult {
        lower: real_to_poly(&aq_lo)?,
        upper: real_to_poly(&aq_up)?,
        value,
        feasibility_gap: gap.max(0.0),
        duality_gap: s_up.duality_gap + s_lo.duality_gap,
        converged,
    })
}

/// `Ẽ_n(f)₁ = inf{‖Q - q‖₁ : q ≤ f ≤ Q}` on an `m`-point grid plus breakpoints.
pub fn one_sided_best(f: &PointwiseFunction, n: usize, spec: &NormSpec, m: usize) -> Result<OneSidedResult> {
    if *spec != (NormSpec::Lebesgue { p: 1.0 }) {
        return Err(Error::Unsupported("one-sided approximation is implemented in L1 only".into()));
    }
    if m < 16 * n.max(1) {
        return Err(invalid("m", format!("{m} < 16n")));
    }
    one_sided_on(&ConstraintGrid::new(f, m)?, n)
}

/// Grid `L₁` best approximation: `min_a Σ w_j |v_j - Σ a_i φ_i(y_j)|`.
/// Returns the polynomial and the grid value.
pub fn l1_best_on(grid: &ConstraintGrid, n: usize) -> Result<(TrigPoly, f64)> {
    check_lp_size(n, grid)?;
    let phi = basis_rows(grid, n);
    let problem = LpProblem {
        a: phi.clone(),
        b: vec![0.0; 2 * n + 1],
        c: grid.values.clone(),
        lower: grid.weights.iter().map(|w| -w).collect(),
        upper: grid.weights.clone(),
    };
    let sol = lp::solve(&problem, LP_MAX_PIVOTS);
    if sol.status != LpStatus::Optimal {
        return Err(Error::Unconverged(sol.iterations));
    }
    let a = sol.dual;
    let resid: Vec<f64> = (0..grid.len()).map(|j| grid.values[j] - eval_real(&a, &phi, j)).collect();
    Ok((real_to_poly(&a)?, grid.l1(&resid)))
}

fn approx_resolution(f: &PointwiseFunction, n: usize) -> usize {
    default_resolution(n).max(f.resolution_hint()).max(16 * n.max(1)).next_power_of_two()
}

fn residual_norm(f: &PointwiseFunction, t: &TrigPoly, spec: &NormSpec, res: usize) -> Result<f64> {
    norm(&build_cache(&f.sub(&t.to_function("T")), res)?, spec)
}

/// `E_n(f)_X` with coordinate descent enabled for `n ≤` [`REFINE_MAX_DEGREE`].
pub fn best_approx(f: &PointwiseFunction, n: usize, spec: &NormSpec) -> Result<BestApproxResult> {
    best_approx_with(f, n, spec, n <= REFINE_MAX_DEGREE)
}

/// `E_n(f)_X`: exact projection in `L₂`; otherwise the best of `S_n f`,
/// `V_{⌊n/2⌋} f` and (real `f` in `L₁`, `n ≤` [`LP_MAX_DEGREE`]) the grid `L₁`
/// minimizer, optionally followed by coordinate descent.
pub fn best_approx_with(f: &PointwiseFunction, n: usize, spec: &NormSpec, refine: bool) -> Result<BestApproxResult> {
    let res = approx_resolution(f, n);
    let cache = build_cache(f, res)?;
    let s = partial_sum(&cache, n)?;
    if *spec == (NormSpec::Lebesgue { p: 2.0 }) {
        let value = residual_norm(f, &s, spec, res)?;
        return Ok(BestApproxResult {
            t: s,
            value,
            quality: Quality::Exact,
        });
    }
    let mut best = BestApproxResult {
        value: residual_norm(f, &s, spec, res)?,
        t: s,
        quality: Quality::NearBest,
    };
    let v = vp_mean(&cache, n / 2)?.with_degree(n);
    let vv = residual_norm(f, &v, spec, res)?;
    if vv < best.value {
        best = BestApproxResult {
            t: v,
            value: vv,
            quality: Quality::NearBest,
        };
    }
    if *spec == (NormSpec::Lebesgue { p: 1.0 }) && f.is_real() && n <= LP_MAX_DEGREE {
        let grid = ConstraintGrid::new(f, default_grid(n))?;
        if let Ok((t, _)) = l1_best_on(&grid, n) {
            let tv = residual_norm(f, &t, spec, res)?;
            if tv < best.value {
                best = BestApproxResult {
                    t,
                    value: tv,
                    quality: Quality::Refined,
                };
            }
        }
    }
    if refine {
        let (t, value) = coordinate_descent(&cache, &best.t, spec, f.is_real())?;
        if value < best.value {
            best = BestApproxResult {
                t,
                value,
                quality: Quality::Refined,
            };
        }
    }
    Ok(best)
}

/// Minimizes `‖f - T‖_X` one real coordinate at a time by golden-section search.
fn coordinate_descent(cache: &DenseGridCache, start: &TrigPoly, spec: &NormSpec, real: bool) -> Result<(TrigPoly, f64)> {
    let rule = cache.rule();
    let weights: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * spec.weight(x) / TAU)
        .collect();
    let tv = {
        let t = start.clone();
        let g = start.clone();
        rule.sample(move |x| t.eval(x), Some(move |s: f64, m: usize| g.eval_grid(s, m)))
    };
    let mut resid: Vec<Complex64> = cache.samples().iter().zip(&tv).map(|(f, t)| f - t).collect();
    let eval = |r: &[Complex64]| -> Result<f64> {
        let a: Vec<f64> = r.iter().map(|z| z.norm()).collect();
        spec.from_weighted_values(&a, &weights)
    };
    let n = start.degree() as i64;
    // (frequency, multiplier): real f uses cos/sin pairs, complex f uses 1 and i per exponential
    let coords: Vec<(i64, Complex64)> = if real {
        let mut v = vec![(0, Complex64::new(1.0, 0.0))];
        for k in 1..=n {
            v.push((k, Complex64::new(1.0, 0.0)));
            v.push((k, Complex64::new(0.0, 1.0)));
        }
        v
    } else {
        (-n..=n)
            .flat_map(|k| [(k, Complex64::new(1.0, 0.0)), (k, Complex64::new(0.0, 1.0))])
            .collect()
    };
    let phis: Vec<Vec<Complex64>> = coords
        .iter()
        .map(|&(k, mult)| {
            rule.nodes
                .iter()
                .map(|&x| {
                    let e = Complex64::from_polar(1.0, k as f64 * x);
                    match (real && k > 0, mult.im == 0.0) {
                        // mult = 1 → cos kx, mult = i → sin kx
                        (true, true) => Complex64::new(e.re, 0.0),
                        (true, false) => Complex64::new(e.im, 0.0),
                        _ => mult * e,
                    }
                })
                .collect()
        })
        .collect();
    let mut t = start.clone();
    let mut current = eval(&resid)?;
    let mut scratch = vec![0.0; resid.len()];
    for _ in 0..MAX_SWEEPS {
        let before = current;
        for (&(k, mult), phi) in coords.iter().zip(&phis) {
            let pn = eval(phi)?;
            if pn == 0.0 || current == 0.0 {
                continue;
            }
            let mut g = |s: f64| -> Result<f64> {
                for ((o, r), p) in scratch.iter_mut().zip(&resid).zip(phi) {
                    *o = (r - s * p).norm();
                }
                spec.from_weighted_values(&scratch, &weights)
            };
            // the minimizer lies in |s| ≤ 2‖R‖/‖φ‖ by the triangle inequality
            let (mut a, mut b) = (-2.0 * current / pn, 2.0 * current / pn);
            let phi_g = 0.5 * (5f64.sqrt() - 1.0);
            let mut c = b - phi_g * (b - a);
            let mut d = a + phi_g * (b - a);
            let (mut gc, mut gd) = (g(c)?, g(d)?);
            for _ in 0..48 {
                if gc < gd {
                    b = d;
                    d = c;
                    gd = gc;
                    c = b - phi_g * (b - a);
                    gc = g(c)?;
                } else {
                    a = c;
                    c = d;
                    gc = gd;
                    d = a + phi_g * (b - a);
                    gd = g(d)?;
                }
            }
            let (s, gs) = if gc < gd { (c, gc) } else { (d, gd) };
            if gs < current {
                current = gs;
                for (r, p) in resid.iter_mut().zip(phi) {
                    *r -= s * p;
                }
                if real && k > 0 {
                    // s·cos kx = s/2 (e^{ikx} + e^{-ikx}); s·sin kx = s/2i (e^{ikx} - e^{-ikx})
                    let (cp, cm) = if mult.im == 0.0 {
                        (Complex64::new(0.5 * s, 0.0), Complex64::new(0.5 * s, 0.0))
                    } else {
                        (Complex64::new(0.0, -0.5 * s), Complex64::new(0.0, 0.5 * s))
                    };
                    *t.coeff_mut(k) += cp;
                    *t.coeff_mut(-k) += cm;
                } else {
                    *t.coeff_mut(k) += s * mult;
                }
            }
        }
        if before - current <= 1e-6 * before {
            break;
        }
    }
    Ok((t, current))
}

#[derive(Clone, Debug)]
pub struct BesovSum {
    pub value: f64,
    /// `‖δ_{2^{-ν}}‖ E_{2^{ν-1}n}(f)` for `ν = 1, 2, …`.
    pub terms: Vec<f64>,
    /// True when the degree cap stopped the sum before a term fell below `ε`.
    pub cap_hit: bool,
}

/// Partial sum of `Σ_{ν≥1} ‖δ_{2^{-ν}}‖_{X→X} E_{2^{ν-1}n}(f)_X`.
pub fn besov_sum(f: &PointwiseFunction, n: usize, spec: &NormSpec, eps: f64) -> Result<BesovSum> {
    if spec.is_weighted() {
        return Err(Error::Unsupported("the dilation sum needs a rearrangement-invariant norm".into()));
    }
    if n == 0 || !(eps > 0.0) {
        return Err(invalid("n/eps", "need n ≥ 1 and ε > 0"));
    }
    let mut terms = Vec::new();
    let mut nu = 1;
    loop {
        let deg = n << (nu - 1);
        if deg > BESOV_DEGREE_CAP {
            return Ok(BesovSum {
                value: terms.iter().sum(),
                terms,
                cap_hit: true,
            });
        }
        let e = best_approx_with(f, deg, spec, false)?.value;
        let term = dilation_norm(spec, 0.5f64.powi(nu))?.value * e;
        terms.push(term);
        if term < eps {
            return Ok(BesovSum {
                value: terms.iter().sum(),
                terms,
                cap_hit: false,
            });
        }
        nu += 1;
    }
}

/// `Ẽ_n(f)₁ / ((n+1)^{-r} E_n(f^{(r)})₁)`, all on one constraint grid.
#[derive(Clone, Debug)]
pub struct LemderRatio {
    pub one_sided: f64,
    pub derivative_error: f64,
    /// `None` when both sides vanish (`f ∈ 𝒯_n`).
    pub ratio: Option<f64>,
}

/// Tolerance below which a grid error counts as zero.
pub const LP_ZERO: f64 = 1e-9;

pub fn lemder_check(f: &PointwiseFunction, n: usize, r: usize, m: usize) -> Result<LemderRatio> {
    let mut d = f.clone();
    for _ in 0..r {
        d = d
            .derivative()
            .cloned()
            .ok_or_else(|| Error::Unsupported(format!("{} has no derivative evaluator", f.label())))?;
    }
    let one = one_sided_best(f, n, &NormSpec::Lebesgue { p: 1.0 }, m)?;
    let (_, e) = l1_best_on(&ConstraintGrid::new(&d, m)?, n)?;
    let denom = (n as f64 + 1.0).powi(-(r as i32)) * e;
    let ratio = if one.value <= LP_ZERO && e <= LP_ZERO {
        None
    } else {
        Some(one.value / denom)
    };
    Ok(LemderRatio {
        one_sided: one.value,
        derivative_error: e,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{cusp, exp_cos, exponential, sine, square_wave};

    fn l1() -> NormSpec {
        NormSpec::lebesgue(1.0).unwrap()
    }

    #[test]
    fn real_basis_round_trip() {
        let a = [0.3, -1.0, 2.0, 0.5, 0.25];
        let t = real_to_poly(&a).unwrap();
        for x in [-2.0, 0.1, 1.7] {
            let direct: f64 = a.iter().zip(real_basis(2, x)).map(|(a, b)| a * b).sum();
            assert!((t.eval(x).re - direct).abs() < 1e-14 && t.eval(x).im.abs() < 1e-14);
        }
    }

    #[test]
    fn grid_weights_and_breakpoints() {
        let g = ConstraintGrid::new(&square_wave(), 64).unwrap();
        assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // both jumps land on grid points and are doubled
        assert_eq!(g.len(), 66);
        let at0: Vec<f64> = (0..g.len()).filter(|&j| g.points[j].abs() < 1e-15).map(|j| g.values[j]).collect();
        assert_eq!(at0, vec![-1.0, 1.0]);
        assert!(ConstraintGrid::new(&exponential(1), 64).is_err());
    }

    #[test]
    fn best_approx_l2_examples() {
        let l2 = NormSpec::lebesgue(2.0).unwrap();
        let n = 6;
        let r = best_approx(&exponential(n as i64 + 1), n, &l2).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12 && r.t.max_abs_coeff() < 1e-12);
        let r = best_approx(&exponential(3), n, &l2).unwrap();
        assert!(r.value < 1e-12);
        // square wave: |ĉ_k| = 2/(π|k|) for odd k
        let n = 10;
        let r = best_approx(&square_wave(), n, &l2).unwrap();
        let tail: f64 = (n + 1..2_000_000).filter(|k| k % 2 == 1).map(|k| 2.0 * (2.0 / (PI * k as f64)).powi(2)).sum();
        let tail = tail + 2.0 * 4.0 / (PI * PI) / (2.0 * 2_000_000.0);
        assert!((r.value - tail.sqrt()).abs() < 1e-8, "{} {}", r.value, tail.sqrt());
        assert_eq!(r.quality, Quality::Exact);
    }

    #[test]
    fn best_approx_l1_and_refinement() {
        let f = cusp(0.5);
        let n = 4;
        let near = best_approx_with(&f, n, &l1(), false).unwrap();
        let refined = best_approx_with(&f, n, &l1(), true).unwrap();
        assert!(refined.value <= near.value + 1e-15);
        // L1 error dominated by the L2 error of S_n, bounded below by... ‖f - T‖₁ ≥ 0
        let l2 = best_approx(&f, n, &NormSpec::lebesgue(2.0).unwrap()).unwrap().value;
        assert!(refined.value <= l2 + 1e-12);
        let t = TrigPoly::monomial(2, n).unwrap();
        let r = best_approx(&t.to_function("t"), n, &l1()).unwrap();
        assert!(r.value < 1e-12);
        // monotone in n
        let a = best_approx(&square_wave(), 4, &l1()).unwrap().value;
        let b = best_approx(&square_wave(), 8, &l1()).unwrap().value;
        assert!(b <= a + 1e-8);
    }

    #[test]
    fn one_sided_examples() {
        let n = 4;
        let m = 256;
        let grid = ConstraintGrid::new(&square_wave(), m).unwrap();
        let r = one_sided_on(&grid, n).unwrap();
        assert!(r.converged);
        assert!(r.feasibility_gap < 1e-8, "{}", r.feasibility_gap);
        assert!(r.duality_gap < 1e-8, "{}", r.duality_gap);
        let (_, e) = l1_best_on(&grid, n).unwrap();
        assert!(r.value >= e - 1e-9, "{} {e}", r.value);
        // nested feasible sets
        let r8 = one_sided_on(&grid, 8).unwrap();
        assert!(r8.value <= r.value + 1e-9);
        // polynomial input
        let t = real_to_poly(&[0.5, 1.0, -0.25]).unwrap().to_function("t");
        let r = one_sided_best(&t, 3, &l1(), 64).unwrap();
        assert!(r.value < 1e-9, "{}", r.value);
        assert!(one_sided_best(&t, 3, &NormSpec::lebesgue(2.0).unwrap(), 64).is_err());
        assert!(one_sided_best(&t, 8, &l1(), 64).is_err());
    }

    #[test]
    fn l1_grid_oracle() {
        // degree 0: the best constant in weighted L1 is a weighted median
        let f = exp_cos();
        let grid = ConstraintGrid::new(&f, 128).unwrap();
        let (t, v) = l1_best_on(&grid, 0).unwrap();
        let mut idx: Vec<usize> = (0..grid.len()).collect();
        idx.sort_by(|&a, &b| grid.values[a].partial_cmp(&grid.values[b]).unwrap());
        let mut acc = 0.0;
        let med = idx
            .iter()
            .find(|&&j| {
                acc += grid.weights[j];
                acc >= 0.5 - 1e-12
            })
            .map(|&j| grid.values[j])
            .unwrap();
        let vm = grid.l1(&grid.values.iter().map(|v| v - med).collect::<Vec<_>>());
        assert!((v - vm).abs() < 1e-12, "{v} {vm} {}", t.coeff(0));
    }

    #[test]
    fn lemder_examples() {
        let r = lemder_check(&sine(), 4, 1, 128).unwrap();
        assert!(r.ratio.is_none());
        let f = cusp(1.5);
        let r = lemder_check(&f, 4, 1, 128).unwrap();
        assert!(r.ratio.unwrap().is_finite() && r.ratio.unwrap() > 0.0);
        assert!(lemder_check(&square_wave(), 4, 1, 128).is_err());
    }

    #[test]
    fn besov_examples() {
        let l2 = NormSpec::lebesgue(2.0).unwrap();
        let t = TrigPoly::monomial(3, 3).unwrap().to_function("t");
        let b = besov_sum(&t, 4, &l2, 1e-10).unwrap();
        assert!(b.value < 1e-10 && !b.cap_hit);
        let b = besov_sum(&exp_cos(), 2, &l2, 1e-12).unwrap();
        assert!(!b.cap_hit);
        let b2 = besov_sum(&exp_cos(), 2, &l2, 1e-14).unwrap();
        assert!((b.value - b2.value).abs() < 1e-11);
        assert!(besov_sum(&t, 4, &NormSpec::weighted(2.0, 0.5).unwrap(), 1e-3).is_err());
    }
}
