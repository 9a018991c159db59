//! Dense bounded-variable primal simplex.
//!
//! Pricing picks the largest reduced cost and falls back to Bland's rule
//! after [`STALL_LIMIT`] consecutive degenerate pivots, so cycling is
//! impossible while non-degenerate progress stays fast.
//!
//! Solves `max cᵀx` subject to `Ax = b`, `l ≤ x ≤ u` with finite `l` and
//! possibly infinite `u`. Phase one starts from `x = l` with one signed
//! artificial column per row; those columns keep `B⁻¹` in the tableau so the
//! row duals `y = c_Bᵀ B⁻¹` are read off at the end.

/// Termination state of [`solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap reached; `x` is feasible only if phase one finished.
    Unconverged,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    /// Row-major `m × n` constraint matrix.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// Row multipliers `y`; at optimality `cᵀx = bᵀy + Σ_j d_j x_j` with reduced costs `d`.
    pub dual: Vec<f64>,
    pub objective: f64,
    /// `|cᵀx - (bᵀy + Σ_j bound-side reduced-cost terms)|`, zero at exact optimality.
    pub duality_gap: f64,
    pub iterations: usize,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
/// Degenerate pivots in a row before switching to Bland's rule.
const STALL_LIMIT: usize = 50;

struct Tableau {
    m: usize,
    cols: usize,
    /// `B⁻¹ [A | D]`, row-major `m × cols`.
    t: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    x: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let mut d = c.to_vec();
        for i in 0..self.m {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (dj, tij) in d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let p = self.at(r, j);
        for v in &mut self.t[r * cols..(r + 1) * cols] {
            *v /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[j];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[j] = 0.0;
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.basis[r] = j;
        self.is_basic[j] = true;
    }

    /// Runs simplex iterations for cost `c`; `allowed(j)` gates entering columns.
    fn run(&mut self, c: &[f64], allowed: impl Fn(usize) -> bool, iters: &mut usize, cap: usize) -> LpStatus {
        let mut stalled = 0;
        loop {
            if *iters >= cap {
                return LpStatus::Unconverged;
            }
            let d = self.reduced_costs(c);
            let eligible = |j: usize| {
                !self.is_basic[j]
                    && allowed(j)
                    && ((d[j] > COST_TOL && self.x[j] < self.upper[j]) || (d[j] < -COST_TOL && self.x[j] > self.lower[j]))
            };
            let entering = if stalled >= STALL_LIMIT {
                // Bland: lowest eligible index enters
                (0..self.cols).find(|&j| eligible(j))
            } else {
                (0..self.cols)
                    .filter(|&j| eligible(j))
                    .max_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()))
            };
            let Some(j) = entering else {
                return LpStatus::Optimal;
            };
            *iters += 1;
            let dir = if d[j] > 0.0 { 1.0 } else { -1.0 };
            let mut theta = self.upper[j] - self.lower[j];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let delta = -dir * self.at(i, j);
                let bi = self.basis[i];
                let lim = if delta < -PIVOT_TOL {
                    (self.x[bi] - self.lower[bi]).max(0.0) / -delta
                } else if delta > PIVOT_TOL && self.upper[bi].is_finite() {
                    (self.upper[bi] - self.x[bi]).max(0.0) / delta
                } else {
                    continue;
                };
                // ties prefer a bound flip, then the lowest basic index
                let better = match leave {
                    None => lim < theta,
                    Some((r, _)) => lim < theta || (lim == theta && bi < self.basis[r]),
                };
                if better {
                    theta = lim;
                    leave = Some((i, if delta < 0.0 { self.lower[bi] } else { self.upper[bi] }));
                }
            }
            if !theta.is_finite() {
                return LpStatus::Unbounded;
            }
            if theta > 0.0 {
                stalled = 0;
            } else {
                stalled += 1;
            }
            for i in 0..self.m {
                let bi = self.basis[i];
                self.x[bi] -= theta * dir * self.at(i, j);
            }
            self.x[j] += dir * theta;
            if let Some((r, bound)) = leave {
                let out = self.basis[r];
                self.x[out] = bound;
                self.pivot(r, j);
            } else {
                // bound flip
                self.x[j] = if dir > 0.0 { self.upper[j] } else { self.lower[j] };
            }
        }
    }
}

/// Solves the problem; at most `max_iter` pivots over both phases.
pub fn solve(p: &LpProblem, max_iter: usize) -> LpSolution {
    let m = p.b.len();
    let n = p.c.len();
    let cols = n + m;
    let mut x = p.lower.clone();
    let mut sign = vec![1.0; m];
    let mut t = vec![0.0; m * cols];
    for i in 0..m {
        let r = p.b[i] - p.a[i].iter().zip(&x).map(|(a, x)| a * x).sum::<f64>();
        sign[i] = if r < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * cols + j] = sign[i] * p.a[i][j];
        }
        t[i * cols + n + i] = 1.0;
        x.push(r.abs());
    }
    let mut lower = p.lower.clone();
    lower.extend(std::iter::repeat_n(0.0, m));
    let mut upper = p.upper.clone();
    upper.extend(std::iter::repeat_n(f64::INFINITY, m));
    let mut is_basic = vec![false; cols];
    is_basic[n..].iter_mut().for_each(|b| *b = true);
    let mut tab = Tableau {
        m,
        cols,
        t,
        basis: (n..cols).collect(),
        is_basic,
        x,
        lower,
        upper,
    };
    let mut iters = 0;

    let mut c1 = vec![0.0; cols];
    c1[n..].iter_mut().for_each(|c| *c = -1.0);
    let s1 = tab.run(&c1, |_| true, &mut iters, max_iter);
    let infeas: f64 = tab.x[n..].iter().sum();
    let scale = 1.0 + p.b.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let status = if s1 == LpStatus::Unconverged {
        LpStatus::Unconverged
    } else if infeas > 1e-9 * scale {
        LpStatus::Infeasible
    } else {
        // pin artificials at zero for phase two
        for k in n..cols {
            tab.upper[k] = 0.0;
            tab.x[k] = 0.0;
        }
        let mut c2 = p.c.clone();
        c2.extend(std::iter::repeat_n(0.0, m));
        tab.run(&c2, |j| j < n, &mut iters, max_iter)
    };

    let mut c2 = p.c.clone();
    c2.extend(std::iter::repeat_n(0.0, m));
    let dual: Vec<f64> = (0..m)
        .map(|k| {
            let s: f64 = (0..m).map(|i| c2[tab.basis[i]] * tab.at(i, n + k)).sum();
            s * sign[k]
        })
        .collect();
    let xs = tab.x[..n].to_vec();
    let objective: f64 = p.c.iter().zip(&xs).map(|(c, x)| c * x).sum();
    // weak-duality certificate: bᵀy plus the best bound-side value of each reduced cost
    let mut bound = p.b.iter().zip(&dual).map(|(b, y)| b * y).sum::<f64>();
    #[allow(clippy::needless_range_loop)]
    for j in 0..n {
        let dj = p.c[j] - (0..m).map(|i| p.a[i][j] * dual[i]).sum::<f64>();
        // a tolerated positive d_j against an infinite bound contributes at the current point
        let side = if dj <= 0.0 {
            p.lower[j]
        } else if p.upper[j].is_finite() {
            p.upper[j]
        } else {
            xs[j]
        };
        bound += dj * side;
    }
    let duality_gap = if bound.is_finite() { (bound - objective).abs() } else { f64::INFINITY };
    LpSolution {
        status,
        x: xs,
        dual,
        objective,
        duality_gap,
        iterations: iters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 with slacks: optimum (2, 6), value 36
        let p = LpProblem {
            a: vec![
                vec![1.0, 0.0, 1.0, 0.0, 0.0],
                vec![0.0, 2.0, 0.0, 1.0, 0.0],
                vec![3.0, 2.0, 0.0, 0.0, 1.0],
            ],
            b: vec![4.0, 12.0, 18.0],
            c: vec![3.0, 5.0, 0.0, 0.0, 0.0],
            lower: vec![0.0; 5],
            upper: vec![f64::INFINITY; 5],
        };
        let s = solve(&p, 100);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        // duals (0, 1.5, 1)
        assert!((s.dual[1] - 1.5).abs() < 1e-12 && (s.dual[2] - 1.0).abs() < 1e-12);
        assert!(s.duality_gap < 1e-10);
    }

    #[test]
    fn bounds_flip_and_negative_rhs() {
        // max x + y, x + y = -1 over [-2, 3]^2 → value -1
        let p = LpProblem {
            a: vec![vec![1.0, 1.0]],
            b: vec![-1.0],
            c: vec![1.0, 1.0],
            lower: vec![-2.0, -2.0],
            upper: vec![3.0, 3.0],
        };
        let s = solve(&p, 100);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-12);
        // max x - y over the same set: x = 1... x + y = -1, x ≤ 3 → (1, -2) gives 3
        let p = LpProblem { c: vec![1.0, -1.0], ..p };
        let s = solve(&p, 100);
        assert!((s.objective - 3.0).abs() < 1e-12, "{}", s.objective);
        assert!(s.duality_gap < 1e-10);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = LpProblem {
            a: vec![vec![1.0, 1.0]],
            b: vec![5.0],
            c: vec![1.0, 0.0],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        };
        assert_eq!(solve(&p, 100).status, LpStatus::Infeasible);
        let p = LpProblem {
            a: vec![vec![1.0, -1.0]],
            b: vec![0.0],
            c: vec![1.0, 0.0],
            lower: vec![0.0, 0.0],
            upper: vec![f64::INFINITY; 2],
        };
        assert_eq!(solve(&p, 100).status, LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_cycling_example() {
        // cycles under the largest-coefficient rule; optimum 1 at x1 = x3 = 1
        let p = LpProblem {
            a: vec![
                vec![0.5, -5.5, -2.5, 9.0, 1.0, 0.0, 0.0],
                vec![0.5, -1.5, -0.5, 1.0, 0.0, 1.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            ],
            b: vec![0.0, 0.0, 1.0],
            c: vec![10.0, -57.0, -9.0, -24.0, 0.0, 0.0, 0.0],
            lower: vec![0.0; 7],
            upper: vec![f64::INFINITY; 7],
        };
        let s = solve(&p, 1000);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12, "{}", s.objective);
    }
}
