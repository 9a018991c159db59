//! Sampling operators: periodic Lagrange interpolation `ℒ_n`, window
//! quasi-interpolants `Q_n^φ`, and on the line the truncated
//! Whittaker–Kotelnikov–Shannon series `𝒮_σ` and window series `𝒬_σ^φ`.

use crate::error::{invalid, Error, Result};
use crate::function::{build_cache, default_resolution, Domain, NodeSet, PointwiseFunction};
use crate::norms::{norm, NormSpec, StepFunction};
use crate::trig::{analyze, apply_window, interpolation_nodes, kernel_eval, window_transform, TrigPoly, Window};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;
use std::fmt;

/// Operator family.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Lagrange,
    QuasiInterp(Window),
    Wks,
    LineQuasi(Window),
}

impl Family {
    /// Parse `lagrange`, `dirichlet`, `fejer`, `br:<α>`, `wks`, `linefejer`, `linebr:<α>`.
    pub fn parse(s: &str) -> Result<Self> {
        let br = |a: &str| -> Result<Window> {
            let alpha = a
                .parse::<f64>()
                .map_err(|_| invalid("op", format!("bad Bochner–Riesz order in `{s}`")))?;
            Window::bochner_riesz(alpha)
        };
        match s {
            "lagrange" => Ok(Family::Lagrange),
            "dirichlet" => Ok(Family::QuasiInterp(Window::Dirichlet)),
            "fejer" => Ok(Family::QuasiInterp(Window::Fejer)),
            "wks" => Ok(Family::Wks),
            "linefejer" => Ok(Family::LineQuasi(Window::Fejer)),
            _ => {
                if let Some(a) = s.strip_prefix("br:") {
                    Ok(Family::QuasiInterp(br(a)?))
                } else if let Some(a) = s.strip_prefix("linebr:") {
                    Ok(Family::LineQuasi(br(a)?))
                } else {
                    Err(invalid("op", format!("unknown operator `{s}`")))
                }
            }
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Family::Lagrange | Family::QuasiInterp(_))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Lagrange => write!(f, "lagrange"),
            Family::QuasiInterp(w) => write!(f, "{}", w.name()),
            Family::Wks => write!(f, "wks"),
            Family::LineQuasi(w) => write!(f, "line{}", w.name()),
        }
    }
}

/// A configured sampling operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingOperatorSpec {
    pub family: Family,
    /// `n` for periodic families, `σ` on the line.
    pub scale: f64,
    /// Truncation `K` (line families).
    pub truncation: Option<usize>,
    /// Evaluation window half-width `L` (line families).
    pub window_half: Option<f64>,
}

impl SamplingOperatorSpec {
    /// Periodic operator at scale `n`. Checks `ℒ_n = Q_n^{Dirichlet}` on a random sample vector.
    pub fn periodic(family: Family, n: usize) -> Result<Self> {
        if !family.is_periodic() {
            return Err(invalid("family", format!("{family} is not periodic")));
        }
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        let dev = lagrange_dirichlet_deviation(n, 0x1a9);
        if dev > 1e-10 {
            return Err(Error::Unsupported(format!(
                "Lagrange and Dirichlet quasi-interpolant disagree by {dev:e}"
            )));
        }
        Ok(Self {
            family,
            scale: n as f64,
            truncation: None,
            window_half: None,
        })
    }

    /// Line operator with truncation `K` and window `[-L, L]`; requires `K/σ ≥ 2L`.
    pub fn line(family: Family, sigma: f64, k: usize, l: f64) -> Result<Self> {
        if family.is_periodic() {
            return Err(invalid("family", format!("{family} is periodic")));
        }
        check_line(sigma, k, l)?;
        Ok(Self {
            family,
            scale: sigma,
            truncation: Some(k),
            window_half: Some(l),
        })
    }

    pub fn n(&self) -> usize {
        self.scale as usize
    }

    /// `G_n f` for periodic families.
    pub fn apply(&self, f: &PointwiseFunction) -> Result<TrigPoly> {
        match &self.family {
            Family::Lagrange => Ok(lagrange(f, self.n())),
            Family::QuasiInterp(w) => quasi_interp(f, self.n(), w),
            _ => Err(Error::Unsupported("line operators are evaluated pointwise".into())),
        }
    }

    /// `G_n T` for a polynomial, sampling on the FFT grid.
    pub fn apply_poly(&self, t: &TrigPoly) -> Result<TrigPoly> {
        let n = self.n();
        let samples = t.eval_grid(0.0, 2 * n + 1);
        let l = analyze(&samples)?;
        match &self.family {
            Family::Lagrange => Ok(l),
            Family::QuasiInterp(w) => apply_window(&l, w, n),
            _ => Err(Error::Unsupported("line operators are evaluated pointwise".into())),
        }
    }

    /// `G_n` applied to node data `v_k` at `t_k`.
    pub fn apply_samples(&self, samples: &[Complex64]) -> Result<TrigPoly> {
        let n = self.n();
        if samples.len() != 2 * n + 1 {
            return Err(Error::SampleCount {
                expected: 2 * n + 1,
                got: samples.len(),
            });
        }
        let l = analyze(samples)?;
        match &self.family {
            Family::Lagrange => Ok(l),
            Family::QuasiInterp(w) => apply_window(&l, w, n),
            _ => Err(Error::Unsupported("line operators are evaluated pointwise".into())),
        }
    }

    /// Pointwise value of a line operator.
    pub fn line_value(&self, f: &PointwiseFunction, x: f64) -> Result<LineValue> {
        let (k, l) = match (self.truncation, self.window_half) {
            (Some(k), Some(l)) => (k, l),
            _ => return Err(Error::Unsupported("periodic operators produce polynomials".into())),
        };
        match &self.family {
            Family::Wks => wks(f, self.scale, k, l, x),
            Family::LineQuasi(w) => line_quasi(f, self.scale, w, k, l, x),
            _ => Err(Error::Unsupported("periodic operators produce polynomials".into())),
        }
    }
}

/// Max deviation between `ℒ_n` (transform path) and the Dirichlet kernel sum.
fn lagrange_dirichlet_deviation(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let m = 2 * n + 1;
    let samples: Vec<Complex64> = (0..m)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let l = analyze(&samples).expect("odd length");
    let nodes = interpolation_nodes(n);
    let xs = [-2.9, -1.3, 0.1, 0.77, 2.4];
    xs.iter()
        .map(|&x| {
            let direct: Complex64 = samples
                .iter()
                .zip(&nodes)
                .map(|(v, &t)| v * kernel_eval(&Window::Dirichlet, n, x - t))
                .sum::<Complex64>()
                / m as f64;
            (direct - l.eval(x)).norm() / (1.0 + direct.norm())
        })
        .fold(0.0, f64::max)
}

/// `ℒ_n f`: the interpolant at `t_k = 2πk/(2n+1)`.
pub fn lagrange(f: &PointwiseFunction, n: usize) -> TrigPoly {
    let samples: Vec<Complex64> = interpolation_nodes(n).iter().map(|&t| f.value(t)).collect();
    analyze(&samples).expect("odd length")
}

/// `Q_n^φ f = (2n+1)^{-1} Σ f(t_k) φ_n(· - t_k)`, computed as `φ(k/n)·ĉ_k`.
pub fn quasi_interp(f: &PointwiseFunction, n: usize, w: &Window) -> Result<TrigPoly> {
    apply_window(&lagrange(f, n), w, n)
}

/// The kernel-sum form of `Q_n^φ f(x)`.
pub fn quasi_interp_direct(f: &PointwiseFunction, n: usize, w: &Window, x: f64) -> Complex64 {
    let nodes = interpolation_nodes(n);
    nodes
        .iter()
        .map(|&t| f.value(t) * kernel_eval(w, n, x - t))
        .sum::<Complex64>()
        / nodes.len() as f64
}

/// Value of a truncated line series with a bound on the omitted terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineValue {
    pub value: Complex64,
    /// Bound on `|full series − truncated series|`; infinite when `f` declares no decay.
    pub tail_bound: f64,
}

fn check_line(sigma: f64, k: usize, l: f64) -> Result<()> {
    if !(sigma >= 1.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("{sigma} must be ≥ 1")));
    }
    if !(l > 0.0) {
        return Err(invalid("L", "window half-width must be positive"));
    }
    if (k as f64) < 2.0 * l * sigma {
        return Err(invalid(
            "K",
            format!("coverage K/σ = {} < 2L = {}", k as f64 / sigma, 2.0 * l),
        ));
    }
    Ok(())
}

fn check_window_point(f: &PointwiseFunction, l: f64, x: f64) -> Result<()> {
    if f.domain() != Domain::Line {
        return Err(Error::Unsupported("line series need a function on the line".into()));
    }
    if x.abs() > l {
        return Err(invalid("x", format!("{x} outside [-{l}, {l}]")));
    }
    Ok(())
}

/// Normalized `sinc(x) = sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `Σ_{|k|>K} |f(k/σ)|·kernel_bound` through the declared envelope
/// `|f(t)| ≤ C|t|^{-q}` (`|t| ≥ 1`), using `Σ_{k>K} k^{-q} ≤ K^{1-q}/(q-1)`.
fn tail_with_decay(f: &PointwiseFunction, sigma: f64, k: usize, kernel_bound: f64) -> f64 {
    let Some(d) = f.decay() else {
        return f64::INFINITY;
    };
    let kf = k as f64;
    if d.power <= 1.0 || kf < sigma {
        return f64::INFINITY;
    }
    2.0 * d.scale * sigma.powf(d.power) * kernel_bound * kf.powf(1.0 - d.power) / (d.power - 1.0)
}

/// `𝒮_σ f(x) = Σ_{|k|≤K} f(k/σ) sinc(σx - k)` for `|x| ≤ L`, `K/σ ≥ 2L`.
pub fn wks(f: &PointwiseFunction, sigma: f64, k: usize, l: f64, x: f64) -> Result<LineValue> {
    check_line(sigma, k, l)?;
    check_window_point(f, l, x)?;
    let ki = k as i64;
    let value: Complex64 = (-ki..=ki)
        .map(|j| f.value(j as f64 / sigma) * sinc(sigma * x - j as f64))
        .sum();
    // |sinc(σx - j)| ≤ 1/(π(|j| - σ|x|)) ≤ 1/(π(K - σ|x|)) for |j| > K
    let gap = k as f64 - sigma * x.abs();
    let tail = tail_with_decay(f, sigma, k, 1.0 / (PI * gap));
    Ok(LineValue { value, tail_bound: tail })
}

/// `𝒬_σ^φ f(x) = Σ_{|k|≤K} f(k/σ) K^φ(σx - k)` for `|x| ≤ L`, `K/σ ≥ 2L`.
pub fn line_quasi(f: &PointwiseFunction, sigma: f64, w: &Window, k: usize, l: f64, x: f64) -> Result<LineValue> {
    check_line(sigma, k, l)?;
    check_window_point(f, l, x)?;
    let ki = k as i64;
    let value: Complex64 = (-ki..=ki)
        .map(|j| f.value(j as f64 / sigma) * window_transform(w, sigma * x - j as f64))
        .sum();
    // |K^φ| ≤ (2π)^{-1}∫|φ| ≤ 1/π for windows bounded by 1
    let tail = tail_with_decay(f, sigma, k, 1.0 / PI);
    Ok(LineValue { value, tail_bound: tail })
}

/// Band-limited test signal `sinc²(σx/4)`: spectrum in `|ω| ≤ πσ/2`, half the
/// sampling band, with envelope `|f(t)| ≤ 16/(π²σ²) t^{-2}`.
pub fn bandlimited_signal(sigma: f64) -> PointwiseFunction {
    let s = sigma;
    PointwiseFunction::line(format!("sinc2_{sigma}"), move |x| {
        let v = sinc(0.25 * s * x);
        Complex64::new(v * v, 0.0)
    })
    .with_decay(16.0 / (PI * PI * sigma * sigma), 2.0)
    .real_valued()
}

/// Result of a line reconstruction study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineErrorReport {
    pub sigma: f64,
    pub truncation: usize,
    pub window_half: f64,
    /// `sup |f - G_σ f|` over the interior grid.
    pub sup_error: f64,
    /// Largest tail bound over the same grid.
    pub tail_bound: f64,
}

/// Interior sup error of a line operator on `points` equispaced samples of `[-L/2, L/2]`.
pub fn line_error(f: &PointwiseFunction, op: &SamplingOperatorSpec, points: usize) -> Result<LineErrorReport> {
    let (k, l) = match (op.truncation, op.window_half) {
        (Some(k), Some(l)) => (k, l),
        _ => return Err(Error::Unsupported("line operator required".into())),
    };
    let mut sup: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for i in 0..points {
        let x = -0.5 * l + l * i as f64 / (points - 1).max(1) as f64;
        let v = op.line_value(f, x)?;
        sup = sup.max((f.value(x) - v.value).norm());
        tail = tail.max(v.tail_bound);
    }
    Ok(LineErrorReport {
        sigma: op.scale,
        truncation: k,
        window_half: l,
        sup_error: sup,
        tail_bound: tail,
    })
}

/// `(‖f - G_n f‖_X, ‖f - G_n f‖_{X_n})` for a periodic operator.
pub fn approx_error(
    f: &PointwiseFunction,
    op: &SamplingOperatorSpec,
    spec: &NormSpec,
    nodes: &NodeSet,
) -> Result<(f64, f64)> {
    if !op.family.is_periodic() {
        return Err(Error::Unsupported("discrete error needs a periodic operator".into()));
    }
    let g = op.apply(f)?;
    error_pair(f, &g, spec, nodes)
}

/// `(‖f - T‖_X, ‖f - T‖_{X_n})`.
pub fn error_pair(f: &PointwiseFunction, t: &TrigPoly, spec: &NormSpec, nodes: &NodeSet) -> Result<(f64, f64)> {
    let n = nodes.scale().ceil() as usize;
    let res = default_resolution(n.max(t.degree()))
        .max(f.resolution_hint())
        .next_power_of_two();
    let diff = f.sub(&t.to_function("G_n f"));
    let cont = norm(&build_cache(&diff, res)?, spec)?;
    let values = nodes.nodes().iter().map(|&x| (f.value(x) - t.eval(x)).norm()).collect();
    let disc = StepFunction::from_values(nodes, values)?.norm(spec)?;
    Ok((cont, disc))
}
