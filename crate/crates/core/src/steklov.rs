//! Steklov averages `A_h f(x) = h⁻¹∫_{x-h/2}^{x+h/2} f`, the shifted variant
//! `Ȧ_h f(x) = A_h f(x + h/2)`, their iterates and the combinations
//! `(I - A_h)^r f` and `f_h = f - (I - A_h)^r f`.
//!
//! On polynomials the operators act as Fourier multipliers. On pointwise
//! functions `A_h^k f` is the integral of `f` against the `k`-fold convolution of
//! the box `h⁻¹χ_{[-h/2, h/2]}`, i.e. the cardinal B-spline of order `k` scaled
//! to width `kh`; the kernel is a polynomial on each of its `k` knot intervals,
//! which are integrated separately with the feature-aware rule.

use crate::error::{invalid, Error, Result};
use crate::function::{build_cache, DenseGridCache, PointwiseFunction};
use crate::quadrature::{integrate_piece, GL_ORDER};
use crate::trig::TrigPoly;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

/// Largest supported iterate order.
pub const MAX_POWER: usize = 8;

/// Quadrature nodes required per Steklov window.
pub const NODES_PER_WINDOW: usize = 64;

/// `h = γ/n` for the default `γ = nπ/(2n+1)`, i.e. `h = π/(2n+1)`.
pub fn default_step(n: usize) -> f64 {
    PI / (2 * n + 1) as f64
}

/// The `γ` implied by [`default_step`].
pub fn default_gamma(n: usize) -> f64 {
    n as f64 * default_step(n)
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h <= TAU) {
        return Err(invalid("h", format!("{h} must lie in (0, 2π]")));
    }
    Ok(())
}

fn check_r(r: usize) -> Result<()> {
    if r == 0 || r > MAX_POWER {
        return Err(invalid("r", format!("{r} must lie in 1..={MAX_POWER}")));
    }
    Ok(())
}

/// Multiplier of `A_h` (or `Ȧ_h` when `centered` is false) on `e^{ikx}`.
pub fn steklov_multiplier(k: i64, h: f64, centered: bool) -> Complex64 {
    let t = 0.5 * k as f64 * h;
    let m = if k == 0 { 1.0 } else { t.sin() / t };
    if centered {
        Complex64::new(m, 0.0)
    } else {
        Complex64::from_polar(m, t)
    }
}

/// Multiplier of `(I - A_h)^r`.
pub fn difference_multiplier(k: i64, h: f64, r: usize, centered: bool) -> Complex64 {
    (Complex64::new(1.0, 0.0) - steklov_multiplier(k, h, centered)).powu(r as u32)
}

fn binomial(r: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (r - i) as f64 / (i + 1) as f64)
}

/// Cardinal B-spline of order `k` (degree `k - 1`) supported on `[0, k]`.
pub fn bspline(k: usize, u: f64) -> f64 {
    if u < 0.0 || u > k as f64 {
        return 0.0;
    }
    // de Boor–Cox on integer knots, bottom-up over the unit intervals
    let mut vals: Vec<f64> = (0..k).map(|j| if u >= j as f64 && u < (j + 1) as f64 { 1.0 } else { 0.0 }).collect();
    for order in 2..=k {
        for j in 0..=(k - order) {
            let a = (u - j as f64) * vals[j];
            let b = ((j + order) as f64 - u) * vals[j + 1];
            vals[j] = (a + b) / (order - 1) as f64;
        }
    }
    vals[0]
}

/// Sub-panel length for window integrals of `f`.
fn window_panel(f: &PointwiseFunction, h: f64) -> f64 {
    // 32 uniform cells per sub-panel keep e^{ikx}, |k| ≤ N/64, within GL accuracy
    h.min(32.0 * TAU / f.resolution_hint() as f64)
}

/// `A_h^k f(x)` (or `Ȧ_h^k f(x)`) by quadrature against the B-spline kernel.
pub fn steklov_power_value(f: &PointwiseFunction, h: f64, k: usize, centered: bool, x: f64) -> Complex64 {
    let max_len = window_panel(f, h);
    let start = if centered { x - 0.5 * k as f64 * h } else { x };
    let feat = f.features();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..k {
        let a = start + j as f64 * h;
        let b = a + h;
        // clamp to the knot interval so rounding at the ends never picks a neighbour piece
        let (lo, hi) = (j as f64, (j + 1) as f64);
        acc += integrate_piece(
            |t| f.value(t) * bspline(k, ((t - start) / h).clamp(lo, hi)),
            a,
            b,
            feat,
            max_len,
        );
    }
    acc / h
}

/// `(I - A_h)^r f(x)` from the binomial expansion of the iterates.
pub fn difference_value(f: &PointwiseFunction, h: f64, r: usize, centered: bool, x: f64) -> Complex64 {
    f.value(x) - smoothed_value(f, h, r, centered, x)
}

/// `f_h(x) = Σ_{k=1}^r (-1)^{k+1} C(r,k) A_h^k f(x)`.
pub fn smoothed_value(f: &PointwiseFunction, h: f64, r: usize, centered: bool, x: f64) -> Complex64 {
    (1..=r)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            steklov_power_value(f, h, k, centered, x) * (sign * binomial(r, k))
        })
        .sum()
}

/// Translates of `points` by the knots of every window kernel of order `k ≤ r`.
fn shifted(points: &[f64], h: f64, r: usize, centered: bool) -> Vec<f64> {
    let mut out = Vec::new();
    for &p in points {
        for k in 1..=r {
            for j in 0..=k {
                let s = if centered {
                    (0.5 * k as f64 - j as f64) * h
                } else {
                    -(j as f64) * h
                };
                out.push(p + s);
            }
        }
    }
    out
}

/// Derived function built from `f` with features shifted by the window knots.
/// Averaging a jump leaves a kink, so shifted breakpoints stay breakpoints;
/// shifted singular points keep a weaker singularity and stay graded.
fn derived<F>(f: &PointwiseFunction, label: String, h: f64, r: usize, centered: bool, eval: F) -> PointwiseFunction
where
    F: Fn(f64) -> Complex64 + Send + Sync + 'static,
{
    let mut bps = f.breakpoints().to_vec();
    bps.extend(shifted(f.breakpoints(), h, r, centered));
    let mut sing = f.singular_points().to_vec();
    sing.extend(shifted(f.singular_points(), h, r, centered));
    f.map(eval).with_breakpoints(bps).with_singular_points(sing).relabel(label)
}

fn op_name(centered: bool) -> &'static str {
    if centered {
        "A"
    } else {
        "Ȧ"
    }
}

/// Operations shared by every representation that Steklov operators act on.
pub trait SteklovOps: Sized {
    /// `A_h f`, or `Ȧ_h f` when `centered` is false.
    fn steklov(&self, h: f64, centered: bool) -> Result<Self>;
    /// `(I - A_h)^r f`.
    fn i_minus_a_pow(&self, h: f64, r: usize, centered: bool) -> Result<Self>;
    /// `f_h = f - (I - A_h)^r f`.
    fn smoothed(&self, h: f64, r: usize, centered: bool) -> Result<Self>;
}

impl SteklovOps for TrigPoly {
    fn steklov(&self, h: f64, centered: bool) -> Result<Self> {
        check_h(h)?;
        Ok(self.multiply(|k| steklov_multiplier(k, h, centered)))
    }

    fn i_minus_a_pow(&self, h: f64, r: usize, centered: bool) -> Result<Self> {
        check_h(h)?;
        check_r(r)?;
        Ok(self.multiply(|k| difference_multiplier(k, h, r, centered)))
    }

    fn smoothed(&self, h: f64, r: usize, centered: bool) -> Result<Self> {
        check_h(h)?;
        check_r(r)?;
        Ok(self.multiply(|k| Complex64::new(1.0, 0.0) - difference_multiplier(k, h, r, centered)))
    }
}

impl SteklovOps for PointwiseFunction {
    fn steklov(&self, h: f64, centered: bool) -> Result<Self> {
        check_h(h)?;
        let f = self.clone();
        let label = format!("{}_{h}[{}]", op_name(centered), self.label());
        Ok(derived(self, label, h, 1, centered, move |x| {
            steklov_power_value(&f, h, 1, centered, x)
        }))
    }

    fn i_minus_a_pow(&self, h: f64, r: usize, centered: bool) -> Result<Self> {
        check_h(h)?;
        check_r(r)?;
        let f = self.clone();
        let label = format!("(I-{}_{h})^{r}[{}]", op_name(centered), self.label());
        Ok(derived(self, label, h, r, centered, move |x| difference_value(&f, h, r, centered, x)))
    }

    fn smoothed(&self, h: f64, r: usize, centered: bool) -> Result<Self> {
        check_h(h)?;
        check_r(r)?;
        let f = self.clone();
        let label = format!("{}_{h},{r}", self.label());
        // f_h is continuous: jumps of f only produce kinks after averaging
        Ok(self
            .map(move |x| smoothed_value(&f, h, r, centered, x))
            .with_breakpoints(shifted(self.breakpoints(), h, r, centered))
            .with_singular_points(shifted(self.singular_points(), h, r, centered))
            .relabel(label))
    }
}

/// Minimum cache resolution for windows of width `h`.
pub fn required_resolution(h: f64) -> usize {
    ((NODES_PER_WINDOW as f64 * TAU / (h * GL_ORDER as f64)).ceil() as usize).max(64)
}

fn check_cache(cache: &DenseGridCache, h: f64) -> Result<()> {
    let need = required_resolution(h);
    if cache.resolution() < need {
        return Err(Error::UnderResolved {
            have: cache.resolution(),
            need,
        });
    }
    Ok(())
}

/// `A_h f` from differences of the cached antiderivative.
pub fn steklov_prefix_value(cache: &DenseGridCache, h: f64, centered: bool, x: f64) -> Complex64 {
    let (a, b) = if centered { (x - 0.5 * h, x + 0.5 * h) } else { (x, x + h) };
    (cache.antiderivative(b) - cache.antiderivative(a)) / h
}

impl SteklovOps for DenseGridCache {
    /// Prefix-sum backend: window averages as antiderivative differences.
    fn steklov(&self, h: f64, centered: bool) -> Result<Self> {
        check_h(h)?;
        check_cache(self, h)?;
        let src = Arc::new(self.clone());
        let label = format!("{}_{h}[{}]", op_name(centered), self.source().label());
        let f = derived(self.source(), label, h, 1, centered, move |x| {
            steklov_prefix_value(&src, h, centered, x)
        });
        build_cache(&f, self.resolution())
    }

    fn i_minus_a_pow(&self, h: f64, r: usize, centered: bool) -> Result<Self> {
        check_h(h)?;
        check_r(r)?;
        check_cache(self, h)?;
        build_cache(&self.source().i_minus_a_pow(h, r, centered)?, self.resolution())
    }

    fn smoothed(&self, h: f64, r: usize, centered: bool) -> Result<Self> {
        check_h(h)?;
        check_r(r)?;
        check_cache(self, h)?;
        build_cache(&self.source().smoothed(h, r, centered)?, self.resolution())
    }
}

/// How a Steklov operator is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Quadrature against the cached antiderivative / window kernels.
    PrefixSum,
    /// Diagonal action on Fourier coefficients (polynomials only).
    Multiplier,
}

/// A configured `(I - A_h)^r` (or `Ȧ_h`) operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteklovPlan {
    pub h: f64,
    pub r: usize,
    pub centered: bool,
    pub backend: Backend,
}

impl SteklovPlan {
    pub fn new(h: f64, r: usize, centered: bool, backend: Backend) -> Result<Self> {
        check_h(h)?;
        check_r(r)?;
        Ok(Self { h, r, centered, backend })
    }

    /// Plan at scale `n` with step `γ/n`.
    pub fn at_scale(n: usize, gamma: f64, r: usize, centered: bool, backend: Backend) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Self::new(gamma / n as f64, r, centered, backend)
    }

    pub fn apply_poly(&self, t: &TrigPoly) -> Result<TrigPoly> {
        if self.backend != Backend::Multiplier {
            return Err(Error::Unsupported("polynomials use the multiplier backend".into()));
        }
        t.i_minus_a_pow(self.h, self.r, self.centered)
    }

    /// `(I - A_h)^r f` as a cache, refining the resolution when the window is
    /// too narrow for the given one.
    pub fn apply_cache(&self, cache: &DenseGridCache) -> Result<DenseGridCache> {
        if self.backend != Backend::PrefixSum {
            return Err(Error::Unsupported("caches use the prefix-sum backend".into()));
        }
        let need = required_resolution(self.h);
        if cache.resolution() < need {
            let refined = build_cache(cache.source(), need.next_power_of_two())?;
            return refined.i_minus_a_pow(self.h, self.r, self.centered);
        }
        cache.i_minus_a_pow(self.h, self.r, self.centered)
    }

    /// `(I - A_h)^r f(x)` straight from the evaluator.
    pub fn value(&self, f: &PointwiseFunction, x: f64) -> Complex64 {
        difference_value(f, self.h, self.r, self.centered, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{cusp, exponential, square_wave};
    use crate::norms::{norm, NormSpec};
    use rand::SeedableRng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Composite 3-point Gauss oracle for `h⁻¹∫_a^{a+h} f`, split at `cuts`.
    fn gauss3_average(f: &PointwiseFunction, a: f64, h: f64, cuts: &[f64]) -> Complex64 {
        let mut pts = vec![a, a + h];
        for &p in cuts {
            for m in -2..=2 {
                let q = p + TAU * m as f64;
                if q > a && q < a + h {
                    pts.push(q);
                }
            }
        }
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut s = c(0.0);
        for w in pts.windows(2) {
            let m = 2000;
            let d = (w[1] - w[0]) / m as f64;
            for i in 0..m {
                let x0 = w[0] + i as f64 * d;
                // 3-point Gauss: interior samples only, so jump values at cuts never enter
                let g = 0.5 * (0.6f64).sqrt();
                let (l, mid, r) = (x0 + (0.5 - g) * d, x0 + 0.5 * d, x0 + (0.5 + g) * d);
                s += (f.value(l) * 5.0 + f.value(mid) * 8.0 + f.value(r) * 5.0) * (d / 18.0);
            }
        }
        s / h
    }

    #[test]
    fn bspline_basics() {
        assert_eq!(bspline(1, 0.5), 1.0);
        assert!((bspline(2, 1.0) - 1.0).abs() < 1e-15);
        assert!((bspline(2, 0.5) - 0.5).abs() < 1e-15);
        assert!((bspline(3, 1.5) - 0.75).abs() < 1e-15);
        assert!((bspline(4, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        // partition of unity and unit mass
        for k in 1..=6 {
            for i in 0..50 {
                let u = i as f64 * 0.0731;
                let s: f64 = (-12..=12).map(|j| bspline(k, u - j as f64)).sum();
                assert!((s - 1.0).abs() < 1e-13, "{k} {u}");
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        let cst = TrigPoly::constant(c(2.5));
        for h in [0.01, 1.0, PI, TAU] {
            assert_eq!(cst.steklov(h, true).unwrap().coeff(0), c(2.5));
        }
        let e = TrigPoly::monomial(1, 1).unwrap();
        let a = e.steklov(PI, true).unwrap();
        assert!((a.coeff(1) - c(2.0 / PI)).norm() < 1e-15);
        let h = 0.37;
        let ad = e.steklov(h, false).unwrap();
        let want = Complex64::from_polar((0.5 * h).sin() / (0.5 * h), 0.5 * h);
        assert!((ad.coeff(1) - want).norm() < 1e-15);
        // oracle: direct quadrature of the window
        let f = exponential(1);
        let q = gauss3_average(&f, 0.3, h, &[]) / f.value(0.3);
        assert!((q - want).norm() < 1e-12);
        assert!(cst.steklov(0.0, true).is_err());
        assert!(cst.steklov(7.0, true).is_err());
    }

    #[test]
    fn difference_examples() {
        let cst = TrigPoly::constant(c(1.0));
        assert_eq!(cst.i_minus_a_pow(0.3, 1, true).unwrap().coeff(0), c(0.0));
        let k = 5;
        let h = 0.2;
        let e = TrigPoly::monomial(k, 5).unwrap();
        let d = e.i_minus_a_pow(h, 1, true).unwrap();
        let t = 0.5 * k as f64 * h;
        assert!((d.coeff(k) - c(1.0 - t.sin() / t)).norm() < 1e-15);
        // quadrature path for the same identity
        let f = exponential(k);
        for x in [-2.0, 0.1, 1.7] {
            let v = difference_value(&f, h, 1, true, x);
            assert!((v - d.eval(x)).norm() < 1e-13);
        }
        // r = 2: binomial expansion vs composing (I - A_h) twice
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let t = TrigPoly::random(12, &mut rng);
        let once = t.i_minus_a_pow(h, 1, false).unwrap();
        let twice = once.i_minus_a_pow(h, 1, false).unwrap();
        let direct = t.i_minus_a_pow(h, 2, false).unwrap();
        assert!(twice.sub(&direct).max_abs_coeff() < 1e-12);
        let tf = t.to_function("t");
        for x in [-3.0, -0.4, 2.2] {
            let composed = {
                let g = tf.i_minus_a_pow(h, 1, false).unwrap();
                difference_value(&g, h, 1, false, x)
            };
            let expanded = difference_value(&tf, h, 2, false, x);
            assert!((composed - expanded).norm() < 1e-10);
            assert!((expanded - direct.eval(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn smoothed_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let t = TrigPoly::random(7, &mut rng);
        let s = t.smoothed(0.4, 3, true).unwrap();
        assert_eq!(s.degree(), 7);
        assert!(s.add(&t.i_minus_a_pow(0.4, 3, true).unwrap()).sub(&t).max_abs_coeff() < 1e-14);
        let cst = PointwiseFunction::circle("c", |_| c(4.0));
        let cs = cst.smoothed(0.7, 2, true).unwrap();
        assert!((cs.value(1.0) - c(4.0)).norm() < 1e-13);
        // square wave, h = 0.1, r = 1: moving average oracle
        let f = square_wave();
        let fh = f.smoothed(0.1, 1, true).unwrap();
        for x in [-3.1, -1.0, -0.04, 0.0, 0.03, 1.5, 3.09, 3.13] {
            let want = gauss3_average(&f, x - 0.05, 0.1, f.breakpoints());
            assert!((fh.value(x) - want).norm() < 1e-8, "{x} {} {}", fh.value(x), want);
        }
    }

    #[test]
    fn prefix_backend_matches_multiplier() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in [4usize, 32, 128] {
            let t = TrigPoly::random(n, &mut rng);
            let h = default_step(n);
            let f = t.to_function("t");
            let cache = build_cache(&f, crate::function::default_resolution(n)).unwrap();
            for centered in [true, false] {
                let mult = t.steklov(h, centered).unwrap();
                let mut err: f64 = 0.0;
                for i in 0..97 {
                    let x = -PI + TAU * i as f64 / 97.0;
                    err = err.max((steklov_prefix_value(&cache, h, centered, x) - mult.eval(x)).norm());
                }
                assert!(err < 1e-9 * (1.0 + t.max_abs_coeff()), "{n} {err}");
                if n <= 32 {
                    let via_cache = cache.steklov(h, centered).unwrap();
                    assert!((via_cache.source().value(0.3) - mult.eval(0.3)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn under_resolved_cache_is_rejected_or_refined() {
        let cache = build_cache(&cusp(0.5), 256).unwrap();
        let h = 0.01;
        match cache.steklov(h, true) {
            Err(Error::UnderResolved { need, .. }) => assert_eq!(need, required_resolution(h)),
            other => panic!("{other:?}"),
        }
        let plan = SteklovPlan::new(h, 1, true, Backend::PrefixSum).unwrap();
        let out = plan.apply_cache(&cache).unwrap();
        assert!(out.resolution() >= required_resolution(h));
    }

    #[test]
    fn mean_preservation_and_contraction() {
        for f in crate::function::corpus() {
            let cache = build_cache(&f, 1024).unwrap();
            for h in [0.05, 0.7] {
                let a = f.steklov(h, true).unwrap();
                let ac = build_cache(&a, 1024).unwrap();
                assert!((ac.integral() - cache.integral()).norm() < 1e-11, "{} {h} {}", f.label(), (ac.integral() - cache.integral()).norm());
                for p in [1.0, 2.0, 4.0] {
                    let spec = NormSpec::lebesgue(p).unwrap();
                    let na = norm(&ac, &spec).unwrap();
                    let nf = norm(&cache, &spec).unwrap();
                    assert!(na <= nf * (1.0 + 1e-9), "{} {h} {p}", f.label());
                }
            }
        }
    }

    #[test]
    fn shifted_iterate_is_translate_of_centered() {
        let f = cusp(1.5);
        let h = 0.2;
        for k in 1..=4 {
            for x in [-1.0, 0.05, 2.0] {
                let a = steklov_power_value(&f, h, k, false, x);
                let b = steklov_power_value(&f, h, k, true, x + 0.5 * k as f64 * h);
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}

