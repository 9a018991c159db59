//! Pointwise functions, sampling node sets, the dense grid cache and the test corpus.

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_piece, Features, PanelRule};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

pub type Evaluator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
/// Values on the shifted uniform grid `start + j·2π/m`, `j < m`.
pub type GridEvaluator = Arc<dyn Fn(f64, usize) -> Vec<Complex64> + Send + Sync>;

/// Default number of uniform panels for whole-period quadrature.
pub const DEFAULT_RESOLUTION: usize = 4096;

/// Default quadrature resolution for scale-`n` experiments: `max(4096, 64n)`,
/// rounded up to a power of two.
pub fn default_resolution(n: usize) -> usize {
    DEFAULT_RESOLUTION.max(64 * n).next_power_of_two()
}

/// Reduce an angle to `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x - TAU * ((x + PI) / TAU).floor();
    if y >= PI {
        y - TAU
    } else {
        y
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Circle,
    Line,
}

/// Envelope `|f(t)| ≤ scale · |t|^-power` for `|t| ≥ 1`, used for truncation tails on the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decay {
    pub scale: f64,
    pub power: f64,
}

/// A function known exactly at every point of its domain, together with the
/// locations where it is not smooth.
///
/// Discontinuities are listed in `breakpoints`; points where the function is
/// continuous but some derivative blows up (e.g. `|sin x|^α` at 0) are listed
/// in `singular_points` so quadrature can grade toward them.
#[derive(Clone)]
pub struct PointwiseFunction {
    label: String,
    domain: Domain,
    eval: Evaluator,
    grid: Option<GridEvaluator>,
    breakpoints: Vec<f64>,
    singular: Vec<f64>,
    smoothness_hint: Option<f64>,
    resolution_hint: usize,
    derivative: Option<Arc<PointwiseFunction>>,
    decay: Option<Decay>,
    real: bool,
}

impl fmt::Debug for PointwiseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointwiseFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("breakpoints", &self.breakpoints)
            .field("singular", &self.singular)
            .field("smoothness_hint", &self.smoothness_hint)
            .finish()
    }
}

fn normalize_points(domain: Domain, pts: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = pts
        .into_iter()
        .map(|p| if domain == Domain::Circle { wrap_angle(p) } else { p })
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    v
}

impl PointwiseFunction {
    /// A 2π-periodic function; the evaluator is only called on `[-π, π)`.
    pub fn circle<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(label, Domain::Circle, Arc::new(f))
    }

    pub fn line<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(label, Domain::Line, Arc::new(f))
    }

    fn new(label: impl Into<String>, domain: Domain, eval: Evaluator) -> Self {
        Self {
            label: label.into(),
            domain,
            eval,
            grid: None,
            breakpoints: Vec::new(),
            singular: Vec::new(),
            smoothness_hint: None,
            resolution_hint: DEFAULT_RESOLUTION,
            derivative: None,
            decay: None,
            real: false,
        }
    }

    pub fn with_breakpoints(mut self, pts: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints = normalize_points(self.domain, pts);
        self
    }

    pub fn with_singular_points(mut self, pts: impl IntoIterator<Item = f64>) -> Self {
        self.singular = normalize_points(self.domain, pts);
        self
    }

    pub fn with_smoothness(mut self, alpha: f64) -> Self {
        self.smoothness_hint = Some(alpha);
        self
    }

    pub fn with_derivative(mut self, d: PointwiseFunction) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_resolution(mut self, n: usize) -> Self {
        self.resolution_hint = n.max(64);
        self
    }

    pub fn with_grid(mut self, g: GridEvaluator) -> Self {
        self.grid = Some(g);
        self
    }

    pub fn with_decay(mut self, scale: f64, power: f64) -> Self {
        self.decay = Some(Decay { scale, power });
        self
    }

    pub fn real_valued(mut self) -> Self {
        self.real = true;
        self
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular
    }

    pub fn smoothness_hint(&self) -> Option<f64> {
        self.smoothness_hint
    }

    pub fn resolution_hint(&self) -> usize {
        self.resolution_hint
    }

    pub fn derivative(&self) -> Option<&PointwiseFunction> {
        self.derivative.as_deref()
    }

    pub fn decay(&self) -> Option<Decay> {
        self.decay
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn grid_evaluator(&self) -> Option<&GridEvaluator> {
        self.grid.as_ref()
    }

    /// Breakpoints and singular points together.
    pub fn rough_points(&self) -> Vec<f64> {
        let mut v = self.breakpoints.clone();
        v.extend_from_slice(&self.singular);
        normalize_points(self.domain, v)
    }

    pub fn features(&self) -> Features<'_> {
        Features {
            breakpoints: &self.breakpoints,
            singular: &self.singular,
            periodic: self.domain == Domain::Circle,
        }
    }

    /// Exact value at `x` (reduced mod 2π on the circle).
    #[inline]
    pub fn value(&self, x: f64) -> Complex64 {
        match self.domain {
            Domain::Circle => (self.eval)(wrap_angle(x)),
            Domain::Line => (self.eval)(x),
        }
    }

    /// Values on `start + j·2π/m`.
    pub fn grid_values(&self, start: f64, m: usize) -> Vec<Complex64> {
        match &self.grid {
            Some(g) => g(start, m),
            None => (0..m)
                .map(|j| self.value(start + TAU * j as f64 / m as f64))
                .collect(),
        }
    }

    /// `self - other`, with merged feature lists.
    pub fn sub(&self, other: &PointwiseFunction) -> PointwiseFunction {
        self.combine(other, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0))
    }

    /// `a·self + b·other`.
    pub fn combine(&self, other: &PointwiseFunction, a: Complex64, b: Complex64) -> PointwiseFunction {
        let (f, g) = (self.clone(), other.clone());
        let label = format!("{}~{}", self.label, other.label);
        let mut out = PointwiseFunction::new(
            label,
            self.domain,
            Arc::new(move |x| a * f.value(x) + b * g.value(x)),
        );
        if let (Some(gf), Some(gg)) = (&self.grid, &other.grid) {
            let (gf, gg) = (gf.clone(), gg.clone());
            out.grid = Some(Arc::new(move |s, m| {
                gf(s, m)
                    .into_iter()
                    .zip(gg(s, m))
                    .map(|(u, v)| a * u + b * v)
                    .collect()
            }));
        } else if self.grid.is_some() || other.grid.is_some() {
            // One side is cheap on grids; evaluate the other pointwise.
            let (f, g) = (self.clone(), other.clone());
            out.grid = Some(Arc::new(move |s, m| {
                let u = f.grid_values(s, m);
                let v = g.grid_values(s, m);
                u.into_iter().zip(v).map(|(u, v)| a * u + b * v).collect()
            }));
        }
        out.breakpoints = normalize_points(
            self.domain,
            self.breakpoints.iter().chain(&other.breakpoints).copied(),
        );
        out.singular = normalize_points(self.domain, self.singular.iter().chain(&other.singular).copied());
        out.resolution_hint = self.resolution_hint.max(other.resolution_hint);
        out.real = self.real && other.real && a.im == 0.0 && b.im == 0.0;
        out
    }

    /// `|f|` as a pointwise function.
    pub fn abs(&self) -> PointwiseFunction {
        let f = self.clone();
        let mut out = self.map(move |x| Complex64::new(f.value(x).norm(), 0.0));
        out.label = format!("|{}|", self.label);
        out.real = true;
        if let Some(g) = self.grid.clone() {
            out.grid = Some(Arc::new(move |s, m| {
                g(s, m).into_iter().map(|v| Complex64::new(v.norm(), 0.0)).collect()
            }));
        }
        out
    }

    /// Same features and hints, new evaluator.
    pub(crate) fn map<F>(&self, eval: F) -> PointwiseFunction
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        PointwiseFunction {
            label: self.label.clone(),
            domain: self.domain,
            eval: Arc::new(eval),
            grid: None,
            breakpoints: self.breakpoints.clone(),
            singular: self.singular.clone(),
            smoothness_hint: self.smoothness_hint,
            resolution_hint: self.resolution_hint,
            derivative: None,
            decay: None,
            real: self.real,
        }
    }
}

/// Sampling nodes with their mesh constants.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    nodes: Vec<f64>,
    n: f64,
    gamma: f64,
    gamma_prime: f64,
    domain: Domain,
}

impl NodeSet {
    /// Build from arbitrary strictly increasing nodes on `[-π, π)`; mesh constants are measured.
    pub fn from_nodes(mut nodes: Vec<f64>, n: f64) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(invalid("nodes", "need at least two nodes"));
        }
        if !(n > 0.0) {
            return Err(invalid("n", "scale must be positive"));
        }
        for x in &mut nodes {
            *x = wrap_angle(*x);
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut set = Self {
            nodes,
            n,
            gamma: 0.0,
            gamma_prime: 0.0,
            domain: Domain::Circle,
        };
        let gaps: Vec<f64> = set.cells().map(|(a, b)| b - a).collect();
        let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let max = gaps.iter().copied().fold(0.0, f64::max);
        if !(min > 0.0) {
            return Err(invalid("nodes", "nodes must be distinct"));
        }
        set.gamma = n * min;
        set.gamma_prime = n * max;
        Ok(set)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn scale(&self) -> f64 {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Cells `[x_k, x_{k+1})`, the last one wrapping to `x_1 + 2π`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = self.nodes.len();
        (0..m).map(move |k| {
            let a = self.nodes[k];
            let b = if k + 1 < m { self.nodes[k + 1] } else { self.nodes[0] + TAU };
            (a, b)
        })
    }
}

/// The equispaced nodes `t_k = 2πk/(2n+1)`, `k = 0..2n`, reduced to `[-π, π)`.
pub fn make_uniform_nodes(n: usize) -> Result<NodeSet> {
    if n == 0 {
        return Err(invalid("n", "n must be at least 1"));
    }
    let m = 2 * n + 1;
    let nodes = (0..m).map(|k| TAU * k as f64 / m as f64).collect();
    let mut set = NodeSet::from_nodes(nodes, n as f64)?;
    let g = TAU * n as f64 / m as f64;
    set.gamma = g;
    set.gamma_prime = g;
    Ok(set)
}

/// Uniform nodes moved by up to `jitter` mesh widths, deterministically in `seed`.
pub fn make_jittered_nodes(n: usize, seed: u64, jitter: f64) -> Result<NodeSet> {
    if !(0.0..0.5).contains(&jitter) {
        return Err(invalid("jitter", format!("{jitter} must lie in [0, 0.5)")));
    }
    if jitter == 0.0 {
        return make_uniform_nodes(n);
    }
    if n == 0 {
        return Err(invalid("n", "n must be at least 1"));
    }
    let m = 2 * n + 1;
    let mesh = TAU / m as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..m)
        .map(|k| k as f64 * mesh + jitter * mesh * rng.random_range(-1.0..=1.0))
        .collect();
    NodeSet::from_nodes(nodes, n as f64)
}

/// Uniform-grid samples, exact cell integrals and quadrature samples of one function.
///
/// Grid points are `x_i = -π + 2πi/N`. `prefix[i] = ∫_{-π}^{x_i} f`, computed
/// panel by panel with Gauss–Legendre nodes split at the function's
/// breakpoints, so `prefix[N]` is the full-period integral.
#[derive(Clone, Debug)]
pub struct DenseGridCache {
    source: PointwiseFunction,
    rule: Arc<PanelRule>,
    samples: Vec<Complex64>,
    grid: Vec<Complex64>,
    prefix: Vec<Complex64>,
}

/// Build a cache of `f` with `resolution` uniform panels.
pub fn build_cache(f: &PointwiseFunction, resolution: usize) -> Result<DenseGridCache> {
    DenseGridCache::new(f, resolution)
}

impl DenseGridCache {
    pub fn new(f: &PointwiseFunction, resolution: usize) -> Result<Self> {
        if resolution < 64 {
            return Err(invalid("resolution", format!("{resolution} < 64")));
        }
        if f.domain() != Domain::Circle {
            return Err(Error::Unsupported("dense grid cache is periodic only".into()));
        }
        // 0 is always graded: it carries the singularity of the power weights.
        let mut sing = f.singular_points().to_vec();
        sing.push(0.0);
        let sing = normalize_points(Domain::Circle, sing);
        let rule = PanelRule::circle(resolution, f.breakpoints(), &sing);
        let samples = match f.grid_evaluator() {
            Some(g) => rule.sample(|x| f.value(x), Some(|s: f64, m: usize| g(s, m))),
            None => rule.sample(|x| f.value(x), None::<fn(f64, usize) -> Vec<Complex64>>),
        };
        if let Some(i) = samples.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite {
                x: rule.nodes[i],
                value: samples[i].to_string(),
            });
        }
        let grid = f.grid_values(-PI, resolution);
        if let Some(i) = grid.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite {
                x: -PI + TAU * i as f64 / resolution as f64,
                value: grid[i].to_string(),
            });
        }
        let mut prefix = Vec::with_capacity(resolution + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for p in 0..resolution {
            let r = rule.panel_start[p]..rule.panel_start[p + 1];
            let s: Complex64 = samples[r.clone()]
                .iter()
                .zip(&rule.weights[r])
                .map(|(v, w)| v * *w)
                .sum();
            acc += s;
            prefix.push(acc);
        }
        Ok(Self {
            source: f.clone(),
            rule: Arc::new(rule),
            samples,
            grid,
            prefix,
        })
    }

    pub fn resolution(&self) -> usize {
        self.rule.resolution
    }

    pub fn source(&self) -> &PointwiseFunction {
        &self.source
    }

    pub fn rule(&self) -> &PanelRule {
        &self.rule
    }

    /// Values at the quadrature nodes of [`Self::rule`].
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Values at the uniform grid points.
    pub fn values(&self) -> &[Complex64] {
        &self.grid
    }

    pub fn prefix(&self) -> &[Complex64] {
        &self.prefix
    }

    /// `∫_{-π}^{π} f`.
    pub fn integral(&self) -> Complex64 {
        self.prefix[self.resolution()]
    }

    pub fn grid_step(&self) -> f64 {
        TAU / self.resolution() as f64
    }

    /// `F(y) = ∫_{-π}^{y} f`, extended to all of ℝ by `F(y + 2π) = F(y) + ∫f`.
    pub fn antiderivative(&self, y: f64) -> Complex64 {
        let n = self.resolution();
        let m = ((y + PI) / TAU).floor();
        let y0 = y - TAU * m;
        let d = self.grid_step();
        let i = (((y0 + PI) / d).floor() as usize).min(n - 1);
        let xi = -PI + i as f64 * d;
        let f = &self.source;
        let part = if y0 > xi {
            integrate_piece(|x| f.value(x), xi, y0, f.features(), d)
        } else {
            Complex64::new(0.0, 0.0)
        };
        self.integral() * m + self.prefix[i] + part
    }

    /// Fourier coefficients `(2π)^{-1}∫ f e^{-ikx}`, `k = -n..=n`.
    pub fn fourier_coefficients(&self, n: usize) -> Result<Vec<Complex64>> {
        let big_n = self.resolution();
        if 2 * n + 1 > big_n {
            return Err(Error::UnderResolved {
                have: big_n,
                need: 2 * n + 1,
            });
        }
        let rule = &*self.rule;
        let d = rule.panel_width();
        let (t, w) = crate::quadrature::gl_default();
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(big_n);
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        let mut buf = vec![Complex64::new(0.0, 0.0); big_n];
        for j in 0..t.len() {
            for (p, b) in buf.iter_mut().enumerate() {
                *b = if rule.regular[p] {
                    self.samples[rule.panel_start[p] + j]
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            fft.process(&mut buf);
            let x0 = -PI + t[j] * d;
            for (idx, k) in (-(n as i64)..=n as i64).enumerate() {
                let bin = k.rem_euclid(big_n as i64) as usize;
                let phase = Complex64::from_polar(1.0, -(k as f64) * x0);
                out[idx] += buf[bin] * phase * (w[j] * d);
            }
        }
        for p in (0..big_n).filter(|&p| !rule.regular[p]) {
            for i in rule.panel_start[p]..rule.panel_start[p + 1] {
                let x = rule.nodes[i];
                let v = self.samples[i] * rule.weights[i];
                let step = Complex64::from_polar(1.0, -x);
                let mut e = Complex64::from_polar(1.0, n as f64 * x);
                for o in out.iter_mut() {
                    *o += v * e;
                    e *= step;
                }
            }
        }
        for o in &mut out {
            *o /= TAU;
        }
        Ok(out)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `e^{ikx}` on the circle.
pub fn exponential(k: i64) -> PointwiseFunction {
    let kf = k as f64;
    let d = PointwiseFunction::circle(format!("d_exp{k}"), move |x| {
        Complex64::new(0.0, kf) * Complex64::from_polar(1.0, kf * x)
    });
    PointwiseFunction::circle(format!("exp{k}"), move |x| Complex64::from_polar(1.0, kf * x))
        .with_smoothness(f64::INFINITY)
        .with_derivative(d)
}

/// `χ_{[0,π)} − χ_{[−π,0)}` with value 0 at both jumps.
pub fn square_wave() -> PointwiseFunction {
    PointwiseFunction::circle("square", |x| {
        c(if x > 0.0 && x < PI {
            1.0
        } else if x < 0.0 && x > -PI {
            -1.0
        } else {
            0.0
        })
    })
    .with_breakpoints([-PI, 0.0])
    .real_valued()
}

/// `|sin x|^α`.
pub fn cusp(alpha: f64) -> PointwiseFunction {
    let f = PointwiseFunction::circle(format!("cusp{alpha}"), move |x| c(x.sin().abs().powf(alpha)))
        .with_singular_points([0.0, -PI])
        .with_smoothness(alpha)
        .real_valued();
    if alpha > 1.0 {
        let d = PointwiseFunction::circle(format!("d_cusp{alpha}"), move |x| {
            let s = x.sin();
            c(alpha * s.abs().powf(alpha - 1.0) * s.signum() * x.cos())
        })
        .with_singular_points([0.0, -PI])
        .with_smoothness(alpha - 1.0)
        .real_valued();
        f.with_derivative(d)
    } else {
        f
    }
}

/// `(x − π)/2` on `(0, 2π)`, value 0 at the jump.
pub fn sawtooth() -> PointwiseFunction {
    PointwiseFunction::circle("sawtooth", |x| {
        c(if x > 0.0 {
            (x - PI) / 2.0
        } else if x < 0.0 {
            (x + PI) / 2.0
        } else {
            0.0
        })
    })
    .with_breakpoints([0.0])
    .real_valued()
}

/// `sin x + cos 2x`.
pub fn smooth_trig() -> PointwiseFunction {
    let d = PointwiseFunction::circle("d_smooth", |x| c(x.cos() - 2.0 * (2.0 * x).sin())).real_valued();
    PointwiseFunction::circle("smooth", |x| c(x.sin() + (2.0 * x).cos()))
        .with_smoothness(f64::INFINITY)
        .with_derivative(d)
        .real_valued()
}

/// `sin x`.
pub fn sine() -> PointwiseFunction {
    let d = PointwiseFunction::circle("d_sin", |x| c(x.cos())).real_valued();
    PointwiseFunction::circle("sin", |x| c(x.sin()))
        .with_smoothness(f64::INFINITY)
        .with_derivative(d)
        .real_valued()
}

/// `e^{cos x}`, smooth but not a trigonometric polynomial.
pub fn exp_cos() -> PointwiseFunction {
    let d = PointwiseFunction::circle("d_expcos", |x| c(-x.sin() * x.cos().exp())).real_valued();
    PointwiseFunction::circle("expcos", |x| c(x.cos().exp()))
        .with_smoothness(f64::INFINITY)
        .with_derivative(d)
        .real_valued()
}

/// The test corpus.
pub fn corpus() -> Vec<PointwiseFunction> {
    vec![
        exponential(1),
        exponential(3),
        exponential(7),
        smooth_trig(),
        exp_cos(),
        square_wave(),
        cusp(0.5),
        cusp(1.5),
        sawtooth(),
    ]
}

/// Look up a corpus entry (or `sin`) by label.
pub fn corpus_entry(label: &str) -> Option<PointwiseFunction> {
    if label == "sin" {
        return Some(sine());
    }
    corpus().into_iter().find(|f| f.label() == label)
}
