//! Dense two-phase simplex method.
//!
//! Instances are converted to standard form `min cᵀx, Ax = b, x ≥ 0, b ≥ 0`
//! with one slack or artificial column per row, so the final tableau carries
//! `B⁻¹` in those columns. Every optimum is returned together with the dual
//! point read from `B⁻¹`; dual feasibility and the duality gap are recomputed
//! from the untouched standard-form data before the answer is reported.
//!
//! Entering columns follow Dantzig's rule until a run of degenerate pivots,
//! then Bland's rule takes over until the objective moves again.

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program over `objective.len()` variables. Bounds default to
/// `[0, ∞)`; either end may be infinite.
#[derive(Clone, Debug)]
pub struct LpInstance {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

impl LpInstance {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { sense, objective, constraints: Vec::new(), bounds: vec![(0.0, f64::INFINITY); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    /// Sparse form of [`constrain`](Self::constrain).
    pub fn constrain_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.constrain(coeffs, relation, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.bounds.len() });
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.coeffs.len() });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(invalid("constraint data must be finite"));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(invalid("objective must be finite"));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(invalid(format!("bad bounds [{lo}, {hi}] on variable {j}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the instance's own sense (NaN unless optimal).
    pub value: f64,
    pub point: Vec<f64>,
    /// Objective of the certifying dual point.
    pub dual_value: f64,
    /// Sensitivity of `value` to each constraint's right-hand side.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    fn status_only(status: LpStatus, iterations: usize) -> Self {
        Self { status, value: f64::NAN, point: Vec::new(), dual_value: f64::NAN, duals: Vec::new(), iterations }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// x = lo + s
    Shift { col: usize, lo: f64 },
    /// x = hi − s
    Flip { col: usize, hi: f64 },
    /// x = p − q
    Split { pos: usize, neg: usize },
}

/// Standard-form data kept for the certificate.
struct StandardForm {
    a: Vec<f64>, // rows × cols, row-major, structural + slack columns only
    b: Vec<f64>,
    c: Vec<f64>,
    rows: usize,
    cols: usize,
    /// +1 or −1: sign applied to each original row when normalising b ≥ 0
    row_sign: Vec<f64>,
    /// number of rows coming from the user's constraints (the rest are bounds)
    user_rows: usize,
    slack_of_row: Vec<Option<usize>>,
    vars: Vec<VarMap>,
    obj_offset: f64,
}

fn standard_form(lp: &LpInstance) -> StandardForm {
    let mut vars = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        if lo.is_finite() {
            vars.push(VarMap::Shift { col: ncols, lo });
            if hi.is_finite() {
                upper_rows.push((ncols, hi - lo));
            }
            ncols += 1;
        } else if hi.is_finite() {
            vars.push(VarMap::Flip { col: ncols, hi });
            ncols += 1;
        } else {
            vars.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }
    let structural = ncols;

    // Rows before slacks: (coeffs over structural cols, relation, rhs).
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for con in &lp.constraints {
        let mut coeffs = vec![0.0; structural];
        let mut rhs = con.rhs;
        for (j, &a) in con.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match vars[j] {
                VarMap::Shift { col, lo } => {
                    coeffs[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Flip { col, hi } => {
                    coeffs[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push((coeffs, con.relation, rhs));
    }
    let user_rows = rows.len();
    for &(col, width) in &upper_rows {
        let mut coeffs = vec![0.0; structural];
        coeffs[col] = 1.0;
        rows.push((coeffs, Relation::Le, width));
    }

    let num_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let cols = structural + num_slack;
    let m = rows.len();
    let mut a = vec![0.0; m * cols];
    let mut b = vec![0.0; m];
    let mut row_sign = vec![1.0; m];
    let mut slack = structural;
    let mut slack_of_row = vec![None; m];
    for (i, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
        a[i * cols..i * cols + structural].copy_from_slice(&coeffs);
        if rel != Relation::Eq {
            a[i * cols + slack] = if rel == Relation::Le { 1.0 } else { -1.0 };
            slack_of_row[i] = Some(slack);
            slack += 1;
        }
        b[i] = rhs;
        if rhs < 0.0 {
            row_sign[i] = -1.0;
            b[i] = -rhs;
            for v in &mut a[i * cols..(i + 1) * cols] {
                *v = -*v;
            }
        }
    }

    let sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut c = vec![0.0; cols];
    let mut obj_offset = 0.0;
    for (j, &cj) in lp.objective.iter().enumerate() {
        let cj = sign * cj;
        match vars[j] {
            VarMap::Shift { col, lo } => {
                c[col] += cj;
                obj_offset += cj * lo;
            }
            VarMap::Flip { col, hi } => {
                c[col] -= cj;
                obj_offset += cj * hi;
            }
            VarMap::Split { pos, neg } => {
                c[pos] += cj;
                c[neg] -= cj;
            }
        }
    }
    StandardForm { a, b, c, rows: m, cols, row_sign, user_rows, slack_of_row, vars, obj_offset }
}

struct Tableau {
    t: Vec<f64>, // rows × width, last column is the rhs
    rows: usize,
    width: usize,
    /// first artificial column; columns at or beyond may never enter
    art_start: usize,
    basis: Vec<usize>,
    /// column that formed the identity for each row initially
    init_col: Vec<usize>,
    d: Vec<f64>, // reduced costs, width − 1 entries
}

const PIVOT_EPS: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(sf: &StandardForm) -> Self {
        let m = sf.rows;
        // A row starts on its slack when the slack kept coefficient +1.
        let mut init_col: Vec<usize> = (0..m)
            .map(|i| match sf.slack_of_row[i] {
                Some(j) if sf.a[i * sf.cols + j] == 1.0 => j,
                _ => usize::MAX,
            })
            .collect();
        let num_art = init_col.iter().filter(|&&c| c == usize::MAX).count();
        let art_start = sf.cols;
        let width = sf.cols + num_art + 1;
        let mut t = vec![0.0; m * width];
        let mut next_art = art_start;
        for i in 0..m {
            t[i * width..i * width + sf.cols].copy_from_slice(&sf.a[i * sf.cols..(i + 1) * sf.cols]);
            t[i * width + width - 1] = sf.b[i];
            if init_col[i] == usize::MAX {
                t[i * width + next_art] = 1.0;
                init_col[i] = next_art;
                next_art += 1;
            }
        }
        let basis = init_col.clone();
        Self { t, rows: m, width, art_start, basis, init_col, d: vec![0.0; width - 1] }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[c] = 1.0;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        let nz: Vec<usize> = (0..w).filter(|&j| pivot_row[j] != 0.0).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for &j in &nz {
                row[j] -= f * pivot_row[j];
            }
            row[c] = 0.0;
        }
        let f = self.d[c];
        if f != 0.0 {
            for &j in &nz {
                if j < w - 1 {
                    self.d[j] -= f * pivot_row[j];
                }
            }
            self.d[c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn set_costs(&mut self, cost: &dyn Fn(usize) -> f64) {
        let w = self.width;
        for j in 0..w - 1 {
            self.d[j] = cost(j);
        }
        for i in 0..self.rows {
            let cb = cost(self.basis[i]);
            if cb == 0.0 {
                continue;
            }
            for j in 0..w - 1 {
                self.d[j] -= cb * self.t[i * w + j];
            }
        }
    }

    fn run(&mut self, enter_limit: usize, cost_scale: f64, iters: &mut usize, max_iters: usize) -> Result<Outcome> {
        let opt_eps = 1e-11 * cost_scale.max(1.0);
        let mut bland = false;
        let mut degenerate = 0;
        loop {
            if *iters >= max_iters {
                return Err(Error::NoConvergence(format!("simplex exceeded {max_iters} pivots")));
            }
            let entering = if bland {
                (0..enter_limit).find(|&j| self.d[j] < -opt_eps)
            } else {
                let mut best = None;
                let mut best_val = -opt_eps;
                for j in 0..enter_limit {
                    if self.d[j] < best_val {
                        best_val = self.d[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[r] {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(r, c);
            *iters += 1;
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
        }
    }
}

/// Solves `lp`. `tol` bounds the feasibility residual and the primal–dual
/// gap, both measured relative to `max(1, scale)` of the quantity involved.
pub fn lp_solve(lp: &LpInstance, tol: f64) -> Result<LpSolution> {
    lp.validate()?;
    let sf = standard_form(lp);
    let mut tab = Tableau::build(&sf);
    let m = sf.rows;
    let max_iters = 50 * (m + tab.width) + 1000;
    let mut iters = 0;

    let b_scale = sf.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    if tab.art_start < tab.width - 1 {
        let art_start = tab.art_start;
        tab.set_costs(&|j| if j >= art_start { 1.0 } else { 0.0 });
        // artificials never re-enter once they leave
        tab.run(art_start, 1.0, &mut iters, max_iters)?;
        let infeasibility: f64 = (0..m).filter(|&i| tab.basis[i] >= art_start).map(|i| tab.rhs(i).abs()).sum();
        if infeasibility > tol * b_scale {
            return Ok(LpSolution::status_only(LpStatus::Infeasible, iters));
        }
        for i in 0..m {
            if tab.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| tab.at(i, j).abs() > PIVOT_EPS) {
                    tab.pivot(i, j);
                    iters += 1;
                }
                // otherwise the row is redundant and the artificial stays at zero
            }
        }
    }

    let c = &sf.c;
    let cost_scale = c.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let art_start = tab.art_start;
    tab.set_costs(&|j| if j < art_start { c[j] } else { 0.0 });
    match tab.run(art_start, cost_scale, &mut iters, max_iters)? {
        Outcome::Unbounded => return Ok(LpSolution::status_only(LpStatus::Unbounded, iters)),
        Outcome::Optimal => {}
    }

    // Primal point in standard form.
    let mut xs = vec![0.0; sf.cols];
    for i in 0..m {
        let j = tab.basis[i];
        if j < sf.cols {
            xs[j] = tab.rhs(i).max(0.0);
        }
    }
    // Dual point y = c_Bᵀ B⁻¹.
    let mut y = vec![0.0; m];
    for (k, yk) in y.iter_mut().enumerate() {
        let col = tab.init_col[k];
        *yk = (0..m)
            .map(|i| {
                let j = tab.basis[i];
                let cb = if j < sf.cols { c[j] } else { 0.0 };
                cb * tab.at(i, col)
            })
            .sum();
    }
    certify(&sf, lp, &xs, &y, tol, iters)
}

fn certify(sf: &StandardForm, lp: &LpInstance, xs: &[f64], y: &[f64], tol: f64, iters: usize) -> Result<LpSolution> {
    let (m, n) = (sf.rows, sf.cols);
    // primal residual ‖Ax − b‖∞
    let mut resid = 0.0f64;
    let mut b_scale = 1.0f64;
    for i in 0..m {
        let row = &sf.a[i * n..(i + 1) * n];
        let ax: f64 = row.iter().zip(xs).map(|(a, x)| a * x).sum();
        resid = resid.max((ax - sf.b[i]).abs());
        b_scale = b_scale.max(sf.b[i].abs());
    }
    // dual infeasibility max(Aᵀy − c)
    let mut dual_viol = 0.0f64;
    let mut c_scale = 1.0f64;
    for j in 0..n {
        let aty: f64 = (0..m).map(|i| sf.a[i * n + j] * y[i]).sum();
        dual_viol = dual_viol.max(aty - sf.c[j]);
        c_scale = c_scale.max(sf.c[j].abs());
    }
    let primal: f64 = sf.c.iter().zip(xs).map(|(c, x)| c * x).sum();
    let dual: f64 = sf.b.iter().zip(y).map(|(b, y)| b * y).sum();
    let value_scale = primal.abs().max(1.0);
    if resid > tol * b_scale {
        return Err(Error::Numerical(format!("primal residual {resid:e} exceeds tolerance")));
    }
    if dual_viol > tol * c_scale {
        return Err(Error::Numerical(format!("dual infeasibility {dual_viol:e} exceeds tolerance")));
    }
    if (primal - dual).abs() > tol * value_scale {
        return Err(Error::Numerical(format!("duality gap {:e} exceeds tolerance", (primal - dual).abs())));
    }

    let sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let point: Vec<f64> = sf
        .vars
        .iter()
        .map(|v| match *v {
            VarMap::Shift { col, lo } => lo + xs[col],
            VarMap::Flip { col, hi } => hi - xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        })
        .collect();
    let value: f64 = lp.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    let duals = (0..sf.user_rows).map(|i| sign * sf.row_sign[i] * y[i]).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
        dual_value: sign * (dual + sf.obj_offset),
        duals,
        iterations: iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn maximize_single_bound() {
        let mut lp = LpInstance::new(Sense::Maximize, vec![1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        let sol = lp_solve(&lp, TOL).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert!((sol.dual_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_interval() {
        let mut lp = LpInstance::new(Sense::Minimize, vec![1.0]);
        lp.constrain(vec![1.0], Relation::Ge, 2.0).constrain(vec![1.0], Relation::Le, 1.0);
        assert_eq!(lp_solve(&lp, TOL).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LpInstance::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(lp_solve(&lp, TOL).unwrap().status, LpStatus::Unbounded);
    }

    /// Enumerates every basic solution of a 2-variable LP with `≥`/`≤` rows
    /// (including the nonnegativity axes) and returns the best feasible one.
    fn brute_force_2d(obj: [f64; 2], rows: &[([f64; 2], f64)]) -> (f64, [f64; 2]) {
        // lines a·x = b, plus x=0 and y=0
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        lines.push(([1.0, 0.0], 0.0));
        lines.push(([0.0, 1.0], 0.0));
        let feasible = |p: [f64; 2]| {
            p[0] >= -1e-12 && p[1] >= -1e-12 && rows.iter().all(|(a, b)| a[0] * p[0] + a[1] * p[1] >= b - 1e-12)
        };
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a, b) = (lines[i], lines[j]);
                let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                if det.abs() < 1e-14 {
                    continue;
                }
                let p = [(a.1 * b.0[1] - a.0[1] * b.1) / det, (a.0[0] * b.1 - a.1 * b.0[0]) / det];
                if feasible(p) {
                    let v = obj[0] * p[0] + obj[1] * p[1];
                    if v < best.0 {
                        best = (v, p);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn min_cost_cover_matches_vertex_enumeration() {
        let (oracle_value, oracle_point) = brute_force_2d([1.0, 1.0], &[([1.0, 2.0], 2.0)]);
        assert_eq!(oracle_value, 1.0);
        assert_eq!(oracle_point, [0.0, 1.0]);

        let mut lp = LpInstance::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 2.0], Relation::Ge, 2.0);
        let sol = lp_solve(&lp, TOL).unwrap();
        assert!((sol.value - oracle_value).abs() < 1e-12);
        assert!((sol.point[0] - oracle_point[0]).abs() < 1e-12);
        assert!((sol.point[1] - oracle_point[1]).abs() < 1e-12);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min |x - 3| written as min s, s ≥ x − 3, s ≥ 3 − x, x free in [-10, 10]
        let mut lp = LpInstance::new(Sense::Minimize, vec![0.0, 1.0]);
        lp.set_bounds(0, -10.0, 10.0);
        lp.constrain(vec![-1.0, 1.0], Relation::Ge, -3.0).constrain(vec![1.0, 1.0], Relation::Ge, 3.0);
        let sol = lp_solve(&lp, TOL).unwrap();
        assert!(sol.value.abs() < 1e-12);
        assert!((sol.point[0] - 3.0).abs() < 1e-12);

        // max x with x ∈ (−∞, 4]
        let mut lp = LpInstance::new(Sense::Maximize, vec![1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, 4.0);
        let sol = lp_solve(&lp, TOL).unwrap();
        assert!((sol.value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn equality_with_redundant_row() {
        let mut lp = LpInstance::new(Sense::Minimize, vec![1.0, 2.0, 3.0]);
        lp.constrain(vec![1.0, 1.0, 1.0], Relation::Eq, 1.0)
            .constrain(vec![2.0, 2.0, 2.0], Relation::Eq, 2.0)
            .constrain(vec![0.0, 1.0, 1.0], Relation::Ge, 0.5);
        let sol = lp_solve(&lp, TOL).unwrap();
        // x = (0.5, 0.5, 0)
        assert!((sol.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn duals_are_rhs_sensitivities() {
        // max 3x + 2y, x + y ≤ 4, x + 3y ≤ 7, x ≤ 3 → (3, 1), value 11;
        // the vertex is non-degenerate, so the duals (2, 0, 1) are unique
        let mut lp = LpInstance::new(Sense::Maximize, vec![3.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Le, 4.0).constrain(vec![1.0, 3.0], Relation::Le, 7.0).constrain(
            vec![1.0, 0.0],
            Relation::Le,
            3.0,
        );
        let sol = lp_solve(&lp, TOL).unwrap();
        assert!((sol.value - 11.0).abs() < 1e-12);
        let bumped = {
            let mut lp2 = lp.clone();
            lp2.constraints[0].rhs += 1e-3;
            lp_solve(&lp2, TOL).unwrap().value
        };
        assert!(((bumped - sol.value) / 1e-3 - sol.duals[0]).abs() < 1e-6);
        for (d, want) in sol.duals.iter().zip([2.0, 0.0, 1.0]) {
            assert!((d - want).abs() < 1e-12, "{:?}", sol.duals);
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule without anti-cycling.
        let mut lp = LpInstance::new(Sense::Minimize, vec![-0.75, 150.0, -0.02, 6.0]);
        lp.constrain(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .constrain(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .constrain(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = lp_solve(&lp, TOL).unwrap();
        assert!((sol.value + 0.05).abs() < 1e-12);
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let mut lp = LpInstance::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(lp_solve(&lp, TOL), Err(Error::DimensionMismatch { .. })));
    }
}
