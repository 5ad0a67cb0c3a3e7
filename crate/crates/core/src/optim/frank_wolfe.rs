//! Away-step Frank–Wolfe for `min ‖c − Lt‖²` over the probability simplex.
//!
//! Each step moves toward the best vertex or away from the worst active one
//! with an exact line search. Every few dozen steps the iterate is polished
//! by solving the affine least-squares problem on its current support, which
//! lands on the optimum exactly once the right face has been identified.
//! Termination is certified by the Frank–Wolfe gap, an upper bound on
//! `f(t) − f_min`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vector::SimplexPoint;

pub const DEFAULT_FW_STEPS: usize = 10_000;
const POLISH_EVERY: usize = 40;

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub point: SimplexPoint,
    pub value: f64,
    /// Frank–Wolfe duality gap at `point`; `value − f_min ≤ gap`.
    pub gap: f64,
    pub iterations: usize,
}

struct Problem<'a> {
    cols: &'a [Vec<f64>],
    c: &'a [f64],
}

impl Problem<'_> {
    fn residual(&self, t: &[f64]) -> Vec<f64> {
        let mut r = self.c.to_vec();
        for (ti, a) in t.iter().zip(self.cols) {
            if *ti != 0.0 {
                for (rj, aj) in r.iter_mut().zip(a) {
                    *rj -= ti * aj;
                }
            }
        }
        r
    }

    /// ∇f = −2 Lᵀ r
    fn gradient(&self, r: &[f64]) -> Vec<f64> {
        self.cols.iter().map(|a| -2.0 * dot(a, r)).collect()
    }

    fn gap(&self, t: &[f64], grad: &[f64]) -> f64 {
        let gt = dot(grad, t);
        let gmin = grad.iter().copied().fold(f64::INFINITY, f64::min);
        (gt - gmin).max(0.0)
    }

    /// Minimiser of `f` on the affine hull of the support of `t`, or `None`
    /// when the KKT system is singular.
    fn affine_min(&self, support: &[usize]) -> Option<Vec<f64>> {
        let k = support.len();
        let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
        let mut rhs = DVector::<f64>::zeros(k + 1);
        for (p, &i) in support.iter().enumerate() {
            for (q, &j) in support.iter().enumerate().skip(p) {
                let g = 2.0 * dot(&self.cols[i], &self.cols[j]);
                kkt[(p, q)] = g;
                kkt[(q, p)] = g;
            }
            kkt[(p, k)] = 1.0;
            kkt[(k, p)] = 1.0;
            rhs[p] = 2.0 * dot(&self.cols[i], self.c);
        }
        rhs[k] = 1.0;
        let sol = kkt.clone().lu().solve(&rhs).or_else(|| kkt.svd(true, true).solve(&rhs, 1e-14).ok())?;
        let sol: Vec<f64> = (0..k).map(|p| sol[p]).collect();
        sol.iter().all(|x| x.is_finite()).then_some(sol)
    }

    /// Wolfe's minor cycle: move toward the affine minimiser on the current
    /// support, stopping where the first weight hits zero, drop it and
    /// repeat. `f` never increases, and the result minimises `f` on the
    /// affine hull of its own support.
    fn polish(&self, t: &[f64]) -> Option<Vec<f64>> {
        let mut support: Vec<usize> = (0..t.len()).filter(|&i| t[i] > 0.0).collect();
        let mut w: Vec<f64> = support.iter().map(|&i| t[i]).collect();
        while support.len() > 1 {
            let sol = self.affine_min(&support)?;
            if sol.iter().all(|&x| x >= -1e-13) {
                let mut out = vec![0.0; t.len()];
                for (p, &i) in support.iter().enumerate() {
                    out[i] = sol[p].max(0.0);
                }
                let total: f64 = out.iter().sum();
                out.iter_mut().for_each(|v| *v /= total);
                return Some(out);
            }
            let theta = (0..w.len()).filter(|&p| sol[p] < 0.0).map(|p| w[p] / (w[p] - sol[p])).fold(1.0f64, f64::min);
            for (wp, sp) in w.iter_mut().zip(&sol) {
                *wp += theta * (sp - *wp);
            }
            let keep: Vec<usize> = (0..w.len()).filter(|&p| w[p] > 1e-15).collect();
            if keep.len() == w.len() {
                // rounding left the blocking weight positive: drop the smallest
                let p = (0..w.len()).min_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap();
                w[p] = 0.0;
            }
            support = (0..w.len()).filter(|&p| w[p] > 1e-15).map(|p| support[p]).collect();
            w.retain(|&x| x > 1e-15);
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
        }
        let mut out = vec![0.0; t.len()];
        out[support[0]] = 1.0;
        Some(out)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Minimises `f(t) = ‖c − Σ t_i cols[i]‖²` over `Δ_{n−1}` (n = `cols.len()`)
/// until the Frank–Wolfe gap is at most `tol`.
pub fn min_quadratic_over_simplex(cols: &[Vec<f64>], c: &[f64], tol: f64) -> Result<QuadResult> {
    min_quadratic_with_budget(cols, c, tol, DEFAULT_FW_STEPS)
}

pub(crate) fn min_quadratic_with_budget(cols: &[Vec<f64>], c: &[f64], tol: f64, budget: usize) -> Result<QuadResult> {
    let n = cols.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one column".into()));
    }
    if let Some(a) = cols.iter().find(|a| a.len() != c.len()) {
        return Err(Error::DimensionMismatch { expected: c.len(), got: a.len() });
    }
    let prob = Problem { cols, c };

    // start at the vertex nearest to c
    let start = (0..n)
        .map(|i| (i, norm2(&cols[i].iter().zip(c).map(|(a, b)| b - a).collect::<Vec<_>>())))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap()
        .0;
    let mut t = vec![0.0; n];
    t[start] = 1.0;
    let mut r = prob.residual(&t);
    let mut iterations = 0;

    loop {
        let grad = prob.gradient(&r);
        let gap = prob.gap(&t, &grad);
        if gap <= tol {
            return Ok(finish(t, &r, gap, iterations));
        }
        if iterations >= budget {
            return Err(Error::NoConvergence(format!("Frank-Wolfe gap {gap:e} above {tol:e} after {budget} steps")));
        }

        for _ in 0..POLISH_EVERY {
            let grad = prob.gradient(&r);
            let gt = dot(&grad, &t);
            let (s, gs) = argmin(&grad, |_| true);
            let (v, gv) = argmax(&grad, |i| t[i] > 0.0);
            let fw_gap = gt - gs;
            if fw_gap <= tol || iterations >= budget {
                break;
            }
            let lt: Vec<f64> = c.iter().zip(&r).map(|(ci, ri)| ci - ri).collect();
            let (dir, gamma_max, toward) = if fw_gap >= gv - gt || t[v] >= 1.0 {
                let d: Vec<f64> = cols[s].iter().zip(&lt).map(|(a, l)| a - l).collect();
                (d, 1.0, Some(s))
            } else {
                let d: Vec<f64> = lt.iter().zip(&cols[v]).map(|(l, a)| l - a).collect();
                (d, t[v] / (1.0 - t[v]), None)
            };
            let dd = norm2(&dir);
            if dd == 0.0 {
                break;
            }
            let gamma = (dot(&r, &dir) / dd).clamp(0.0, gamma_max);
            match toward {
                Some(s) => {
                    t.iter_mut().for_each(|x| *x *= 1.0 - gamma);
                    t[s] += gamma;
                }
                None => {
                    t.iter_mut().for_each(|x| *x *= 1.0 + gamma);
                    t[v] -= gamma;
                    if gamma == gamma_max {
                        t[v] = 0.0;
                    }
                }
            }
            t.iter_mut().for_each(|x| {
                if *x < 1e-300 {
                    *x = 0.0
                }
            });
            iterations += 1;
            r = prob.residual(&t);
        }

        if let Some(p) = prob.polish(&t) {
            let rp = prob.residual(&p);
            if norm2(&rp) <= norm2(&r) {
                t = p;
                r = rp;
            }
        }
    }
}

fn finish(t: Vec<f64>, r: &[f64], gap: f64, iterations: usize) -> QuadResult {
    let total: f64 = t.iter().sum();
    let t: Vec<f64> = t.into_iter().map(|x| x / total).collect();
    QuadResult { point: SimplexPoint::project(&t), value: norm2(r), gap, iterations }
}

fn argmin(v: &[f64], keep: impl Fn(usize) -> bool) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, &x) in v.iter().enumerate() {
        if keep(i) && x < best.1 {
            best = (i, x);
        }
    }
    best
}

fn argmax(v: &[f64], keep: impl Fn(usize) -> bool) -> (usize, f64) {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (i, &x) in v.iter().enumerate() {
        if keep(i) && x > best.1 {
            best = (i, x);
        }
    }
    best
}
