//! Trigonometric polynomials on the circle and the summation windows acting on them.

use crate::error::{invalid, Error, Result};
use crate::function::{DenseGridCache, PointwiseFunction, DEFAULT_RESOLUTION};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn fft_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `T(x) = Σ_{|k|≤n} c_k e^{ikx}`, stored as `c_{-n}, …, c_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// From `2n+1` coefficients ordered `c_{-n}..=c_n`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(invalid("coeffs", "need an odd number of coefficients"));
        }
        Ok(Self {
            degree: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            degree: n,
            coeffs: vec![ZERO; 2 * n + 1],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// `e^{ikx}` as an element of `𝒯_n`.
    pub fn monomial(k: i64, n: usize) -> Result<Self> {
        if k.unsigned_abs() as usize > n {
            return Err(Error::DegreeTooLarge {
                degree: k.unsigned_abs() as usize,
                bound: n,
            });
        }
        let mut t = Self::zero(n);
        *t.coeff_mut(k) = Complex64::new(1.0, 0.0);
        Ok(t)
    }

    /// I.i.d. standard complex normal coefficients.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let coeffs = (0..2 * n + 1)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * s, im * s)
            })
            .collect();
        Self { degree: n, coeffs }
    }

    /// Random real-valued polynomial: `c_{-k} = conj(c_k)`.
    pub fn random_real<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut t = Self::random(n, rng);
        t.coeffs[n] = Complex64::new(t.coeffs[n].re * std::f64::consts::SQRT_2, 0.0);
        for k in 1..=n {
            let v = t.coeffs[n + k];
            t.coeffs[n - k] = v.conj();
        }
        t
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`, zero outside `|k| ≤ n`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.degree as i64;
        if k.abs() > n {
            ZERO
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    pub fn coeff_mut(&mut self, k: i64) -> &mut Complex64 {
        let n = self.degree as i64;
        &mut self.coeffs[(k + n) as usize]
    }

    /// Iterate over `(k, c_k)`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - n, c))
    }

    /// Same polynomial viewed in `𝒯_m`, `m ≥ deg`; truncates when `m < deg`.
    pub fn with_degree(&self, m: usize) -> Self {
        let mut out = Self::zero(m);
        for (k, c) in self.iter() {
            if k.unsigned_abs() as usize <= m {
                *out.coeff_mut(k) = c;
            }
        }
        out
    }

    /// `T(x)` by Horner's rule in `z = e^{ix}`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, x);
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * Complex64::from_polar(1.0, -(self.degree as f64) * x)
    }

    /// Values at `start + 2πj/m`, `j < m`, by one inverse transform (aliasing folded exactly).
    pub fn eval_grid(&self, start: f64, m: usize) -> Vec<Complex64> {
        let mut buf = vec![ZERO; m];
        for (k, c) in self.iter() {
            let bin = k.rem_euclid(m as i64) as usize;
            buf[bin] += c * Complex64::from_polar(1.0, k as f64 * start);
        }
        fft_inverse(m).process(&mut buf);
        buf
    }

    /// Multiply coefficient `c_k` by `m(k)`.
    pub fn multiply<F: Fn(i64) -> Complex64>(&self, m: F) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.iter().map(|(k, c)| c * m(k)).collect(),
        }
    }

    /// `T^{(r)}`: coefficients `(ik)^r c_k`.
    pub fn derivative(&self, r: u32) -> Self {
        self.multiply(|k| Complex64::new(0.0, k as f64).powu(r))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.degree.max(other.degree);
        let mut out = self.with_degree(n);
        for (k, c) in other.iter() {
            *out.coeff_mut(k) += c;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.multiply(|_| a)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c_k|²` (the squared normalized `L_2` norm).
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// As a pointwise function with a fast grid evaluator.
    pub fn to_function(&self, label: impl Into<String>) -> PointwiseFunction {
        let t = Arc::new(self.clone());
        let g = t.clone();
        let real = self.iter().all(|(k, c)| (c - self.coeff(-k).conj()).norm() <= 1e-14 * (1.0 + c.norm()));
        let f = PointwiseFunction::circle(label, move |x| t.eval(x))
            .with_resolution(DEFAULT_RESOLUTION.max(64 * self.degree).next_power_of_two())
            .with_grid(Arc::new(move |s, m| g.eval_grid(s, m)));
        if real {
            f.real_valued()
        } else {
            f
        }
    }
}

/// Interpolation coefficients from samples at `t_k = 2πk/(2n+1)`, `k = 0..2n`.
pub fn analyze(samples: &[Complex64]) -> Result<TrigPoly> {
    let m = samples.len();
    if m.is_multiple_of(2) {
        return Err(Error::SampleCount {
            expected: m + 1,
            got: m,
        });
    }
    let n = m / 2;
    let mut buf = samples.to_vec();
    fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let mut t = TrigPoly::zero(n);
    for k in -(n as i64)..=n as i64 {
        *t.coeff_mut(k) = buf[k.rem_euclid(m as i64) as usize] * scale;
    }
    Ok(t)
}

/// [`analyze`] with an explicit degree check.
pub fn analyze_degree(samples: &[Complex64], n: usize) -> Result<TrigPoly> {
    if samples.len() != 2 * n + 1 {
        return Err(Error::SampleCount {
            expected: 2 * n + 1,
            got: samples.len(),
        });
    }
    analyze(samples)
}

/// The uniform interpolation nodes `t_k = 2πk/(2n+1)`, `k = 0..2n` (not reduced).
pub fn interpolation_nodes(n: usize) -> Vec<f64> {
    let m = 2 * n + 1;
    (0..m).map(|k| TAU * k as f64 / m as f64).collect()
}

pub fn eval(t: &TrigPoly, x: f64) -> Complex64 {
    t.eval(x)
}

pub fn derivative(t: &TrigPoly, r: u32) -> TrigPoly {
    t.derivative(r)
}

/// Even symbol supported in `[-1, 1]` generating the kernel `φ_n(x) = Σ φ(k/n) e^{ikx}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    Dirichlet,
    Fejer,
    /// `(1 − ξ²)_+^α`, `α > 0`.
    BochnerRiesz(f64),
    /// Values on a uniform grid of `[0, 1]`, linearly interpolated and extended evenly.
    Table(Arc<Vec<f64>>),
}

impl Window {
    pub fn bochner_riesz(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(invalid("alpha", "Bochner–Riesz order must be positive"));
        }
        Ok(Window::BochnerRiesz(alpha))
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("table", "need at least two values"));
        }
        Ok(Window::Table(Arc::new(values)))
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a > 1.0 {
            return 0.0;
        }
        match self {
            Window::Dirichlet => 1.0,
            Window::Fejer => 1.0 - a,
            Window::BochnerRiesz(alpha) => (1.0 - a * a).max(0.0).powf(*alpha),
            Window::Table(v) => {
                let pos = a * (v.len() - 1) as f64;
                let i = (pos.floor() as usize).min(v.len() - 2);
                let t = pos - i as f64;
                v[i] * (1.0 - t) + v[i + 1] * t
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Window::Dirichlet => "dirichlet".into(),
            Window::Fejer => "fejer".into(),
            Window::BochnerRiesz(a) => format!("br:{a}"),
            Window::Table(_) => "table".into(),
        }
    }
}

/// Multiply `c_k` by `φ(k/n)`.
pub fn apply_window(t: &TrigPoly, w: &Window, n: usize) -> Result<TrigPoly> {
    if t.degree() > n {
        return Err(Error::DegreeTooLarge {
            degree: t.degree(),
            bound: n,
        });
    }
    let nf = n as f64;
    Ok(t.multiply(|k| Complex64::new(w.eval(k as f64 / nf), 0.0)))
}

/// `φ_n(x) = Σ_{|k|≤n} φ(k/n) e^{ikx}`; the Dirichlet kernel uses its closed form.
pub fn kernel_eval(w: &Window, n: usize, x: f64) -> f64 {
    if let Window::Dirichlet = w {
        let s = (0.5 * x).sin();
        if s.abs() < 1e-300 {
            return (2 * n + 1) as f64;
        }
        return ((n as f64 + 0.5) * x).sin() / s;
    }
    let nf = n as f64;
    let mut acc = w.eval(0.0);
    for k in 1..=n {
        acc += 2.0 * w.eval(k as f64 / nf) * (k as f64 * x).cos();
    }
    acc
}

/// Fourier partial sum `S_n f` from a cache with at least `8n` grid points.
pub fn partial_sum(cache: &DenseGridCache, n: usize) -> Result<TrigPoly> {
    let need = 8 * n.max(1);
    if cache.resolution() < need {
        return Err(Error::UnderResolved {
            have: cache.resolution(),
            need,
        });
    }
    TrigPoly::new(cache.fourier_coefficients(n)?)
}

/// De la Vallée Poussin mean `V_n f = (n+1)^{-1} Σ_{m=n}^{2n} S_m f`, of degree `2n`.
pub fn vp_mean(cache: &DenseGridCache, n: usize) -> Result<TrigPoly> {
    let need = 16 * n.max(1);
    if cache.resolution() < need {
        return Err(Error::UnderResolved {
            have: cache.resolution(),
            need,
        });
    }
    let s = TrigPoly::new(cache.fourier_coefficients(2 * n)?)?;
    let nf = n as f64;
    Ok(s.multiply(|k| {
        let a = k.unsigned_abs() as f64;
        let w = if a <= nf { 1.0 } else { (2.0 * nf - a + 1.0) / (nf + 1.0) };
        Complex64::new(w, 0.0)
    }))
}

/// Fourier transform of a window with the `(2π)^{-1}` normalization:
/// `K^φ(x) = (2π)^{-1} ∫_{-1}^{1} φ(ξ) e^{-ixξ} dξ`.
pub fn window_transform(w: &Window, x: f64) -> f64 {
    match w {
        Window::Fejer => {
            let h = 0.5 * x;
            let s = if h.abs() < 1e-8 { 1.0 - h * h / 6.0 } else { h.sin() / h };
            s * s / TAU
        }
        Window::Dirichlet => {
            let s = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
            2.0 * s / TAU
        }
        _ => {
            // even symbol: (2π)^{-1} · 2∫_0^1 φ(ξ) cos(xξ) dξ, graded toward ξ = 1
            use crate::quadrature::{integrate_piece, Features};
            let feat = Features {
                breakpoints: &[],
                singular: &[1.0],
                periodic: false,
            };
            let max_len = (1.0 / (1.0 + x.abs())).min(0.125);
            let v = integrate_piece(
                |xi| Complex64::new(w.eval(xi) * (x * xi).cos(), 0.0),
                0.0,
                1.0,
                feat,
                max_len,
            );
            2.0 * v.re / TAU
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{build_cache, square_wave, PointwiseFunction};
    use rand::SeedableRng;
    use std::f64::consts::PI;
    use rand_chacha::ChaCha8Rng;

    fn direct_eval(t: &TrigPoly, x: f64) -> Complex64 {
        t.iter().map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * x)).sum()
    }

    fn samples_of<F: Fn(f64) -> Complex64>(n: usize, f: F) -> Vec<Complex64> {
        interpolation_nodes(n).into_iter().map(f).collect()
    }

    #[test]
    fn analyze_constant_and_monomial() {
        let c = Complex64::new(2.5, -1.0);
        let t = analyze(&[c; 9]).unwrap();
        assert!((t.coeff(0) - c).norm() < 1e-14);
        assert!(t.iter().filter(|(k, _)| *k != 0).all(|(_, v)| v.norm() < 1e-14));

        let t = analyze(&samples_of(3, |x| Complex64::from_polar(1.0, x))).unwrap();
        for (k, v) in t.iter() {
            let e = if k == 1 { 1.0 } else { 0.0 };
            assert!((v - e).norm() < 1e-14, "{k}");
        }
    }

    #[test]
    fn analyze_aliases_top_frequency_to_constant() {
        for n in [1usize, 4, 10] {
            let m = (2 * n + 1) as f64;
            let s = samples_of(n, |x| Complex64::from_polar(1.0, m * x));
            // oracle: direct sum
            for v in &s {
                assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
            let t = analyze(&s).unwrap();
            assert!((t.coeff(0) - 1.0).norm() < 1e-12);
            assert!(t.iter().filter(|(k, _)| *k != 0).all(|(_, v)| v.norm() < 1e-12));
        }
    }

    #[test]
    fn analyze_rejects_even_count() {
        assert!(analyze(&[Complex64::new(1.0, 0.0); 4]).is_err());
        assert!(analyze_degree(&[Complex64::new(1.0, 0.0); 5], 3).is_err());
    }

    #[test]
    fn eval_examples() {
        let t = TrigPoly::constant(Complex64::new(1.0, 0.0));
        assert_eq!(t.eval(0.37), Complex64::new(1.0, 0.0));
        let e = TrigPoly::monomial(1, 1).unwrap();
        assert!((e.eval(PI / 2.0) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3, 40, 200] {
            let t = TrigPoly::random(n, &mut rng);
            for i in 0..20 {
                let x = -PI + 0.31 * i as f64;
                assert!((t.eval(x) - direct_eval(&t, x)).norm() < 1e-12 * (n as f64).sqrt() * 4.0);
            }
        }
    }

    #[test]
    fn eval_grid_matches_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = TrigPoly::random(20, &mut rng);
        for m in [16usize, 41, 128] {
            let g = t.eval_grid(0.1, m);
            for (j, v) in g.iter().enumerate() {
                let x = 0.1 + TAU * j as f64 / m as f64;
                assert!((v - t.eval(x)).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let c = TrigPoly::constant(Complex64::new(3.0, 0.0)).derivative(2);
        assert_eq!(c.max_abs_coeff(), 0.0);
        let e = TrigPoly::monomial(1, 1).unwrap().derivative(2);
        assert!((e.coeff(1) + 1.0).norm() < 1e-15);
        // finite-difference oracle
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = TrigPoly::random(6, &mut rng);
        let d = t.derivative(1);
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            let x = -PI + TAU * i as f64 / 200.0;
            let fd = (t.eval(x + h) - t.eval(x - h)) / (2.0 * h);
            worst = worst.max((fd - d.eval(x)).norm());
        }
        assert!(worst <= 1e-6, "{worst}");
    }

    #[test]
    fn window_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = TrigPoly::random(8, &mut rng);
        assert_eq!(apply_window(&t, &Window::Dirichlet, 8).unwrap(), t);
        let e = TrigPoly::monomial(8, 8).unwrap();
        assert_eq!(apply_window(&e, &Window::Fejer, 8).unwrap().max_abs_coeff(), 0.0);
        let e = TrigPoly::monomial(4, 8).unwrap();
        let r = apply_window(&e, &Window::BochnerRiesz(1.0), 8).unwrap();
        assert!((r.coeff(4) - 0.75).norm() < 1e-15);
        assert!(apply_window(&TrigPoly::zero(9), &Window::Fejer, 8).is_err());
        assert!(Window::bochner_riesz(0.0).is_err());
        for w in [Window::Dirichlet, Window::Fejer, Window::BochnerRiesz(0.7)] {
            assert_eq!(w.eval(0.3), w.eval(-0.3));
            assert_eq!(w.eval(1.2), 0.0);
        }
    }

    #[test]
    fn kernel_examples() {
        for n in [1usize, 5, 32] {
            assert!((kernel_eval(&Window::Dirichlet, n, 0.0) - (2 * n + 1) as f64).abs() < 1e-12);
            assert!((kernel_eval(&Window::Fejer, n, 0.0) - n as f64).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x: f64 = rng.random_range(-PI..PI);
            let n = 17;
            let direct: f64 = 1.0 + (1..=n).map(|k| 2.0 * (k as f64 * x).cos()).sum::<f64>();
            assert!((kernel_eval(&Window::Dirichlet, n, x) - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_sum_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = TrigPoly::random(6, &mut rng);
        let f = t.to_function("t");
        let cache = build_cache(&f, 256).unwrap();
        let s = partial_sum(&cache, 6).unwrap();
        assert!(s.sub(&t).max_abs_coeff() < 1e-9);

        let cache = build_cache(&square_wave(), 256).unwrap();
        let s = partial_sum(&cache, 3).unwrap();
        for k in -3i64..=3 {
            let kf = k as f64;
            let exact = if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 - (-1f64).powi(k as i32), 0.0) / Complex64::new(0.0, PI * kf)
            };
            assert!((s.coeff(k) - exact).norm() < 1e-12);
        }

        let e = PointwiseFunction::circle("e5", |x| Complex64::from_polar(1.0, 5.0 * x));
        let cache = build_cache(&e, 256).unwrap();
        assert!(partial_sum(&cache, 4).unwrap().max_abs_coeff() < 1e-12);
        assert!(matches!(partial_sum(&cache, 40), Err(Error::UnderResolved { .. })));
    }

    #[test]
    fn vp_mean_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 5;
        let t = TrigPoly::random(n, &mut rng);
        let cache = build_cache(&t.to_function("t"), 256).unwrap();
        let v = vp_mean(&cache, n).unwrap();
        assert!(v.sub(&t).max_abs_coeff() < 1e-9);

        let e = PointwiseFunction::circle("e", move |x| Complex64::from_polar(1.0, 2.0 * n as f64 * x));
        let cache = build_cache(&e, 256).unwrap();
        let v = vp_mean(&cache, n).unwrap();
        // oracle: count of m in [n, 2n] with m ≥ 2n
        let count = (n..=2 * n).filter(|&m| m >= 2 * n).count() as f64;
        assert!((v.coeff(2 * n as i64) - count / (n as f64 + 1.0)).norm() < 1e-12);

        let one = PointwiseFunction::circle("one", |_| Complex64::new(4.0, 0.0));
        let v = vp_mean(&build_cache(&one, 256).unwrap(), 3).unwrap();
        assert!((v.coeff(0) - 4.0).norm() < 1e-12 && v.sub(&TrigPoly::constant(Complex64::new(4.0, 0.0))).max_abs_coeff() < 1e-12);
    }

    #[test]
    fn fejer_transform_matches_quadrature() {
        assert!((window_transform(&Window::Fejer, 0.0) - 1.0 / TAU).abs() < 1e-15);
        // quadrature-transform oracle: composite Simpson on ∫_0^1 (1-ξ) cos(xξ) dξ
        let simpson = |x: f64| {
            let m = 20_000;
            let h = 1.0 / m as f64;
            let mut s = 0.0;
            for i in 0..=m {
                let xi = i as f64 * h;
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * (1.0 - xi) * (x * xi).cos();
            }
            2.0 * s * h / 3.0 / TAU
        };
        for i in 0..100 {
            let x = -30.0 + 0.6 * i as f64;
            let closed = window_transform(&Window::Fejer, x);
            let numeric = window_transform(&Window::Table(Arc::new(vec![1.0, 0.0])), x);
            assert!((closed - simpson(x)).abs() < 1e-8, "{x}");
            assert!((closed - numeric).abs() < 1e-8, "{x}");
        }
    }

    #[test]
    fn parseval_on_uniform_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 7, 64] {
            let t = TrigPoly::random(n, &mut rng);
            let s: Vec<Complex64> = interpolation_nodes(n).into_iter().map(|x| t.eval(x)).collect();
            let lhs: f64 = s.iter().map(|v| v.norm_sqr()).sum::<f64>() / (2 * n + 1) as f64;
            assert!((lhs - t.energy()).abs() < 1e-12 * (1.0 + lhs));
        }
    }
}
