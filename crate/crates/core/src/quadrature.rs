//! Gauss–Legendre panels, breakpoint splitting and geometric grading.
//!
//! Every integral in the crate funnels through [`PanelRule`] (whole-period
//! or whole-window integrals) or [`integrate_piece`] (short windows such as
//! Steklov averages). Panels are split exactly at declared breakpoints and
//! graded geometrically toward declared singular points.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

/// Points per Gauss–Legendre panel.
pub const GL_ORDER: usize = 8;

/// Ratio between consecutive graded panels near a singular point.
const GRADING_RATIO: f64 = 0.5;
/// Number of graded panels; the innermost panel has relative width 2^-80.
const GRADING_LEVELS: usize = 80;

/// Nodes and weights of the `q`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_q.
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(q, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[q - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[q - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if q == 0 {
        return (1.0, 0.0);
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The default rule used for panels.
pub fn gl_default() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// All translates `p + 2πm` of the periodic points that fall strictly inside `(a, b)`.
pub fn periodic_points_in(points: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for &p in points {
        let m_lo = ((a - p) / TAU).floor() as i64;
        let m_hi = ((b - p) / TAU).ceil() as i64;
        for m in m_lo..=m_hi {
            let q = p + TAU * m as f64;
            if q > a && q < b {
                out.push(q);
            }
        }
    }
    out
}

/// Points of a non-periodic list strictly inside `(a, b)`.
pub fn points_in(points: &[f64], a: f64, b: f64) -> Vec<f64> {
    points.iter().copied().filter(|&p| p > a && p < b).collect()
}

/// Locations where the integrand may be rough.
#[derive(Clone, Copy, Debug)]
pub struct Features<'a> {
    pub breakpoints: &'a [f64],
    pub singular: &'a [f64],
    pub periodic: bool,
}

impl Features<'_> {
    fn inner(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let pick = |pts: &[f64]| {
            if self.periodic {
                periodic_points_in(pts, a, b)
            } else {
                points_in(pts, a, b)
            }
        };
        (pick(self.breakpoints), pick(self.singular))
    }

    /// Distance from `[a, b]` to the closest feature not lying in `[a, b]`.
    fn gap_outside(&self, a: f64, b: f64) -> f64 {
        let len = b - a;
        let mut best = f64::INFINITY;
        for pts in [self.breakpoints, self.singular] {
            let near = if self.periodic {
                periodic_points_in(pts, a - len, b + len)
            } else {
                points_in(pts, a - len, b + len)
            };
            for p in near {
                let d = if p < a { a - p } else { p - b };
                if d > 1e-13 * p.abs().max(1.0) {
                    best = best.min(d);
                }
            }
        }
        best
    }

    fn singular_at(&self, x: f64) -> bool {
        self.singular_near(x).is_some()
    }

    /// The singular point (or translate) within rounding distance of `x`.
    fn singular_near(&self, x: f64) -> Option<f64> {
        if self.singular.is_empty() {
            return None;
        }
        let tol = 1e-13 * x.abs().max(1.0);
        let near = |p: f64| (p - x).abs() <= tol;
        if self.periodic {
            periodic_points_in(self.singular, x - 1e-9, x + 1e-9).into_iter().find(|&p| near(p))
        } else {
            self.singular.iter().copied().find(|&p| near(p))
        }
    }
}

/// Emit `(x, w)` quadrature pairs on `[a, b]`, splitting at features and grading
/// toward singular endpoints. `max_len` caps the length of a smooth sub-panel.
pub fn piece_nodes(a: f64, b: f64, feat: Features<'_>, max_len: f64, out: &mut Vec<(f64, f64)>) {
    if b <= a {
        return;
    }
    let (mut cuts, sing) = feat.inner(a, b);
    cuts.extend_from_slice(&sing);
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * x.abs().max(1.0));
    // endpoints that miss a singular point by rounding are moved onto it, so the
    // grading reaches the singularity and neighbouring pieces still tile exactly
    let last = cuts.len() - 1;
    for i in [0, last] {
        if let Some(p) = feat.singular_near(cuts[i]) {
            cuts[i] = p;
        }
    }
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let sl = feat.singular_at(lo);
        let sh = feat.singular_at(hi);
        match (sl, sh) {
            (false, false) => separated_nodes(lo, hi, feat, max_len, out, 0),
            (true, false) => graded_nodes(lo, hi, true, max_len, out),
            (false, true) => graded_nodes(lo, hi, false, max_len, out),
            (true, true) => {
                let mid = 0.5 * (lo + hi);
                graded_nodes(lo, mid, true, max_len, out);
                graded_nodes(mid, hi, false, max_len, out);
            }
        }
    }
}

/// Bisect until every sub-panel is no longer than its distance to the nearest
/// outside feature, so the integrand is analytic on a neighbourhood of each.
fn separated_nodes(a: f64, b: f64, feat: Features<'_>, max_len: f64, out: &mut Vec<(f64, f64)>, depth: u32) {
    if depth < 64 && feat.gap_outside(a, b) < b - a {
        let mid = 0.5 * (a + b);
        separated_nodes(a, mid, feat, max_len, out, depth + 1);
        separated_nodes(mid, b, feat, max_len, out, depth + 1);
    } else {
        smooth_nodes(a, b, max_len, out);
    }
}

fn smooth_nodes(a: f64, b: f64, max_len: f64, out: &mut Vec<(f64, f64)>) {
    let (t, w) = gl_default();
    let pieces = ((b - a) / max_len).ceil().max(1.0) as usize;
    let d = (b - a) / pieces as f64;
    for p in 0..pieces {
        let lo = a + p as f64 * d;
        for j in 0..t.len() {
            out.push((lo + t[j] * d, w[j] * d));
        }
    }
}

/// Geometric grading toward `a` (if `toward_lo`) or `b`.
fn graded_nodes(a: f64, b: f64, toward_lo: bool, max_len: f64, out: &mut Vec<(f64, f64)>) {
    let len = b - a;
    let mut outer = 1.0;
    for _ in 0..GRADING_LEVELS {
        let inner = outer * GRADING_RATIO;
        let (lo, hi) = if toward_lo {
            (a + inner * len, a + outer * len)
        } else {
            (b - outer * len, b - inner * len)
        };
        smooth_nodes(lo, hi, max_len, out);
        outer = inner;
    }
    let (lo, hi) = if toward_lo {
        (a, a + outer * len)
    } else {
        (b - outer * len, b)
    };
    smooth_nodes(lo, hi, max_len, out);
}

/// Integrate `f` over `[a, b]` with breakpoint splitting and singular grading.
pub fn integrate_piece<F>(f: F, a: f64, b: f64, feat: Features<'_>, max_len: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let mut nodes = Vec::new();
    piece_nodes(a, b, feat, max_len, &mut nodes);
    nodes.iter().map(|&(x, w)| f(x) * w).sum()
}

/// A composite rule over `N` uniform panels of `[lo, lo + len)`.
///
/// Regular panels hold [`GL_ORDER`] nodes at fixed relative offsets, so a
/// function with a fast shifted-grid evaluator can fill them with one
/// transform per offset. Panels touching a breakpoint or a singular point
/// are replaced by split and graded node sets.
#[derive(Clone, Debug)]
pub struct PanelRule {
    pub lo: f64,
    pub len: f64,
    pub resolution: usize,
    pub periodic: bool,
    pub nodes: Vec<f64>,
    /// Raw (un-normalized) weights.
    pub weights: Vec<f64>,
    /// `panel_start[p]..panel_start[p+1]` indexes the nodes of panel `p`.
    pub panel_start: Vec<usize>,
    pub regular: Vec<bool>,
}

impl PanelRule {
    /// Rule on the circle `[-π, π)`.
    pub fn circle(resolution: usize, breakpoints: &[f64], singular: &[f64]) -> Self {
        Self::build(-PI, TAU, resolution, true, breakpoints, singular)
    }

    /// Rule on the interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64, resolution: usize, breakpoints: &[f64], singular: &[f64]) -> Self {
        Self::build(lo, hi - lo, resolution, false, breakpoints, singular)
    }

    fn build(lo: f64, len: f64, resolution: usize, periodic: bool, bps: &[f64], sing: &[f64]) -> Self {
        let feat = Features {
            breakpoints: bps,
            singular: sing,
            periodic,
        };
        let (t, w) = gl_default();
        let d = len / resolution as f64;
        let mut nodes = Vec::with_capacity(resolution * GL_ORDER);
        let mut weights = Vec::with_capacity(resolution * GL_ORDER);
        let mut panel_start = Vec::with_capacity(resolution + 1);
        let mut regular = Vec::with_capacity(resolution);
        let mut buf = Vec::new();
        for p in 0..resolution {
            panel_start.push(nodes.len());
            let a = lo + p as f64 * d;
            let b = if p + 1 == resolution { lo + len } else { a + d };
            let (cuts, inner_sing) = feat.inner(a, b);
            let is_regular =
                cuts.is_empty()
                && inner_sing.is_empty()
                && !feat.singular_at(a)
                && !feat.singular_at(b)
                && feat.gap_outside(a, b) >= b - a;
            regular.push(is_regular);
            if is_regular {
                for j in 0..t.len() {
                    nodes.push(a + t[j] * d);
                    weights.push(w[j] * d);
                }
            } else {
                buf.clear();
                piece_nodes(a, b, feat, d, &mut buf);
                for &(x, wx) in &buf {
                    nodes.push(x);
                    weights.push(wx);
                }
            }
        }
        panel_start.push(nodes.len());
        Self {
            lo,
            len,
            resolution,
            periodic,
            nodes,
            weights,
            panel_start,
            regular,
        }
    }

    pub fn panel_width(&self) -> f64 {
        self.len / self.resolution as f64
    }

    /// Evaluate at every node. `grid` (when given) returns the values at
    /// `start + j·len/N`, `j < N`, and is used for regular panels.
    pub fn sample<F, G>(&self, f: F, grid: Option<G>) -> Vec<Complex64>
    where
        F: Fn(f64) -> Complex64 + Sync,
        G: Fn(f64, usize) -> Vec<Complex64>,
    {
        let mut out = vec![Complex64::new(0.0, 0.0); self.nodes.len()];
        match grid {
            Some(g) => {
                let (t, _) = gl_default();
                let d = self.panel_width();
                for (j, tj) in t.iter().enumerate() {
                    let vals = g(self.lo + tj * d, self.resolution);
                    for p in 0..self.resolution {
                        if self.regular[p] {
                            out[self.panel_start[p] + j] = vals[p];
                        }
                    }
                }
                let special: Vec<usize> = (0..self.resolution)
                    .filter(|&p| !self.regular[p])
                    .flat_map(|p| self.panel_start[p]..self.panel_start[p + 1])
                    .collect();
                let vals: Vec<Complex64> = special.par_iter().map(|&i| f(self.nodes[i])).collect();
                for (i, v) in special.into_iter().zip(vals) {
                    out[i] = v;
                }
            }
            None => {
                out.par_iter_mut()
                    .zip(self.nodes.par_iter())
                    .for_each(|(o, &x)| *o = f(x));
            }
        }
        out
    }
}
