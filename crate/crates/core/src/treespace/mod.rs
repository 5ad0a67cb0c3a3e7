//! A finite window of the tree-indexed space `c₀₀(L)`.
//!
//! Labels are leaves or ordered pairs of labels. `T e_(b,c) = (e_b + e_c)/2`,
//! `T e_leaf = 0`, `S = I − T`, and the norm is
//! `‖x‖ = inf{M‖y‖₁ + ‖S⁻¹z‖₁' : x = y + z}`, where `‖·‖₁'` weights leaves by
//! `M` and pairs by 1. Unit functionals are exactly the maps `φ` with
//! `|φ(a)| ≤ M` and `|φ(a) − (φ(b)+φ(c))/2| ≤ 1`, so the norm is computed
//! twice — once as the decomposition LP, once as the functional LP — and the
//! two values must meet.

mod label;

use std::collections::{BTreeMap, BTreeSet};

pub use label::{LabelKind, TreeLabel};

use crate::error::{invalid, Error, Result};
use crate::optim::{lp_solve, LpInstance, LpStatus, Relation, Sense};
use crate::vector::Vector;

pub type TreeVector = Vector<TreeLabel>;

/// Allowed gap between the primal and dual norm values, relative to
/// `max(1, |primal|)`.
pub const DEFAULT_NORM_TOL: f64 = 1e-8;

/// Closure of `labels` under taking children of pairs.
pub fn downward_closure<'a>(labels: impl IntoIterator<Item = &'a TreeLabel>) -> BTreeSet<TreeLabel> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<TreeLabel> = labels.into_iter().copied().collect();
    while let Some(a) = stack.pop() {
        if out.insert(a) {
            if let Some((b, c)) = a.children() {
                stack.push(b);
                stack.push(c);
            }
        }
    }
    out
}

pub fn apply_t(x: &TreeVector) -> TreeVector {
    let mut out = TreeVector::zero();
    for (a, v) in x.iter() {
        if let Some((b, c)) = a.children() {
            out.add_at(b, v / 2.0);
            out.add_at(c, v / 2.0);
        }
    }
    out
}

pub fn apply_s(x: &TreeVector) -> TreeVector {
    x.sub(&apply_t(x))
}

/// `Σ_k T^k x`; finite because `T` lowers the level of every label.
pub fn apply_s_inv(x: &TreeVector) -> TreeVector {
    let mut out = x.clone();
    let mut term = apply_t(x);
    while !term.is_zero() {
        out = out.add(&term);
        term = apply_t(&term);
    }
    out
}

/// `E_a` split by `a`-order: class `k` holds the labels that first appear
/// in `supp(T^k e_a)`. All coefficients of `T^k e_a` are positive, so the
/// support of each power is just the set of `k`-fold descendants.
pub fn order_classes(a: TreeLabel) -> BTreeMap<u32, BTreeSet<TreeLabel>> {
    let mut classes = BTreeMap::new();
    let mut seen = BTreeSet::new();
    let mut frontier: BTreeSet<TreeLabel> = [a].into();
    let mut k = 0;
    while !frontier.is_empty() {
        let fresh: BTreeSet<TreeLabel> = frontier.iter().filter(|d| !seen.contains(*d)).copied().collect();
        seen.extend(fresh.iter().copied());
        if !fresh.is_empty() {
            classes.insert(k, fresh);
        }
        frontier = frontier.iter().filter_map(|d| d.children()).flat_map(|(b, c)| [b, c]).collect();
        k += 1;
    }
    classes
}

/// `o_a(d)` for every `d ∈ E_a`.
pub fn a_order(a: TreeLabel) -> BTreeMap<TreeLabel, u32> {
    order_classes(a).into_iter().flat_map(|(k, ds)| ds.into_iter().map(move |d| (d, k))).collect()
}

/// A candidate unit functional, stored on a finite set of labels.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFunctional {
    m: f64,
    values: BTreeMap<TreeLabel, f64>,
}

impl DualFunctional {
    pub fn new(m: f64) -> Result<Self> {
        check_scale(m)?;
        Ok(Self { m, values: BTreeMap::new() })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn get(&self, a: TreeLabel) -> Option<f64> {
        self.values.get(&a).copied()
    }

    pub fn set(&mut self, a: TreeLabel, v: f64) {
        self.values.insert(a, v);
    }

    pub fn domain(&self) -> impl Iterator<Item = TreeLabel> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TreeLabel, f64)> + '_ {
        self.values.iter().map(|(a, v)| (*a, *v))
    }

    /// Checks `|φ(a)| ≤ M` everywhere and the midpoint rule on every stored
    /// pair whose children are stored, each up to `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        for (&a, &v) in &self.values {
            if !(v.abs() <= self.m + tol) {
                return Err(Error::Hypothesis(format!("|phi({a})| = {} exceeds M = {}", v.abs(), self.m)));
            }
            if let Some((b, c)) = a.children() {
                if let (Some(pb), Some(pc)) = (self.get(b), self.get(c)) {
                    let defect = (v - (pb + pc) / 2.0).abs();
                    if defect > 1.0 + tol {
                        return Err(Error::Hypothesis(format!("midpoint defect {defect} at {a} exceeds 1")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_scale(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("M must be positive, got {m}")))
    }
}

/// `Σ x(d)·φ(d)`.
pub fn functional_eval(phi: &DualFunctional, x: &TreeVector) -> Result<f64> {
    x.iter()
        .try_fold(0.0, |acc, (a, v)| phi.get(*a).map(|p| acc + v * p).ok_or_else(|| Error::MissingLabel(a.to_string())))
}

#[derive(Clone, Debug)]
pub struct TreeNorm {
    /// Decomposition LP value (an upper bound on the norm).
    pub primal: f64,
    /// Functional LP value (a lower bound on the norm).
    pub dual: f64,
    /// The maximising functional, on the downward closure of `supp(x)`.
    pub phi: DualFunctional,
}

/// The norm of `x`, computed by two independent LPs over the downward
/// closure of its support.
pub fn tree_norm(x: &TreeVector, m: f64, tol: f64) -> Result<TreeNorm> {
    check_scale(m)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let closure: Vec<TreeLabel> = downward_closure(x.support()).into_iter().collect();
    if closure.is_empty() {
        return Ok(TreeNorm { primal: 0.0, dual: 0.0, phi: DualFunctional::new(m)? });
    }
    let pos: BTreeMap<TreeLabel, usize> = closure.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let lp_tol = tol * 1e-2;
    let primal = primal_lp(x, m, &closure, &pos, lp_tol)?;
    let (dual, phi) = dual_lp(x, m, &closure, &pos, lp_tol)?;
    let scale = primal.abs().max(1.0);
    if (primal - dual).abs() > tol * scale {
        return Err(Error::Numerical(format!("tree norm primal {primal} and dual {dual} differ by more than {tol:e}")));
    }
    Ok(TreeNorm { primal, dual, phi })
}

/// `min M·Σ|r_d| + Σ wt(d)|w_d|` subject to `S w + r = x` on the closure,
/// with `w = S⁻¹z` and `r = y`. Variables: w⁺, w⁻, r⁺, r⁻, each `K` wide.
fn primal_lp(x: &TreeVector, m: f64, closure: &[TreeLabel], pos: &BTreeMap<TreeLabel, usize>, tol: f64) -> Result<f64> {
    let k = closure.len();
    let mut obj = vec![0.0; 4 * k];
    for (i, a) in closure.iter().enumerate() {
        let wt = if a.is_leaf() { m } else { 1.0 };
        obj[i] = wt;
        obj[k + i] = wt;
        obj[2 * k + i] = m;
        obj[3 * k + i] = m;
    }
    // column of S for label a: e_a − (e_b + e_c)/2
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for (i, a) in closure.iter().enumerate() {
        rows[i].push((i, 1.0));
        rows[i].push((k + i, -1.0));
        if let Some((b, c)) = a.children() {
            for ch in [b, c] {
                let r = pos[&ch];
                rows[r].push((i, -0.5));
                rows[r].push((k + i, 0.5));
            }
        }
    }
    let mut lp = LpInstance::new(Sense::Minimize, obj);
    for (i, a) in closure.iter().enumerate() {
        let mut terms = std::mem::take(&mut rows[i]);
        terms.push((2 * k + i, 1.0));
        terms.push((3 * k + i, -1.0));
        lp.constrain_sparse(&terms, Relation::Eq, x.get(a));
    }
    let sol = lp_solve(&lp, tol)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        s => Err(Error::Numerical(format!("tree norm primal LP reported {s:?}"))),
    }
}

/// `max Σ x(d)φ(d)` over unit functionals on the closure, in the shifted
/// variable `ψ = φ + M ∈ [0, 2M]` so that every row is `≤` with a
/// non-negative right-hand side.
fn dual_lp(
    x: &TreeVector,
    m: f64,
    closure: &[TreeLabel],
    pos: &BTreeMap<TreeLabel, usize>,
    tol: f64,
) -> Result<(f64, DualFunctional)> {
    let k = closure.len();
    let obj: Vec<f64> = closure.iter().map(|a| x.get(a)).collect();
    let offset: f64 = obj.iter().sum::<f64>() * m;
    let mut lp = LpInstance::new(Sense::Maximize, obj);
    for i in 0..k {
        lp.set_bounds(i, 0.0, 2.0 * m);
    }
    for (i, a) in closure.iter().enumerate() {
        if let Some((b, c)) = a.children() {
            let (pb, pc) = (pos[&b], pos[&c]);
            lp.constrain_sparse(&[(i, 1.0), (pb, -0.5), (pc, -0.5)], Relation::Le, 1.0);
            lp.constrain_sparse(&[(i, -1.0), (pb, 0.5), (pc, 0.5)], Relation::Le, 1.0);
        }
    }
    let sol = lp_solve(&lp, tol)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Numerical(format!("tree norm dual LP reported {:?}", sol.status)));
    }
    let mut phi = DualFunctional::new(m)?;
    for (i, a) in closure.iter().enumerate() {
        phi.set(*a, (sol.point[i] - m).clamp(-m, m));
    }
    Ok((sol.value - offset, phi))
}

/// Extends `phi0`, given on a child-closed set `e`, to the downward closure
/// of `universe ∪ e`: leaves outside `e` get `−M`, pairs outside `e` the
/// midpoint of their children.
pub fn extend_phi(
    e: &BTreeSet<TreeLabel>,
    phi0: &DualFunctional,
    universe: &BTreeSet<TreeLabel>,
) -> Result<DualFunctional> {
    let m = phi0.m();
    let mut restricted = DualFunctional::new(m)?;
    for &a in e {
        if let Some((b, c)) = a.children() {
            if !e.contains(&b) || !e.contains(&c) {
                return Err(invalid(format!("E is not closed under children at {a}")));
            }
        }
        let v = phi0.get(a).ok_or_else(|| Error::MissingLabel(a.to_string()))?;
        restricted.set(a, v);
    }
    restricted.check(1e-12)?;

    let mut labels: Vec<TreeLabel> = downward_closure(universe.iter().chain(e)).into_iter().collect();
    labels.sort_by_key(|a| a.level());
    let mut phi = restricted;
    for a in labels {
        if e.contains(&a) {
            continue;
        }
        let v = match a.children() {
            None => -m,
            Some((b, c)) => (phi.get(b).unwrap() + phi.get(c).unwrap()) / 2.0,
        };
        phi.set(a, v);
    }
    Ok(phi)
}

/// The functional peaked at `a`: `φ(a) = M`, `−M` on leaves outside `E_a`,
/// `max(M − o_a(d), −M)` on leaves inside, and
/// `min(M, (φ(b)+φ(c))/2 + 1)` up through the pairs of `E_a`.
pub fn build_phi(a: TreeLabel, m: u32, universe: &BTreeSet<TreeLabel>) -> Result<DualFunctional> {
    if m == 0 {
        return Err(invalid("M must be a positive integer"));
    }
    let mf = m as f64;
    let order = a_order(a);
    let mut ea: Vec<TreeLabel> = order.keys().copied().collect();
    ea.sort_by_key(|d| d.level());
    let mut phi0 = DualFunctional::new(mf)?;
    for d in ea {
        let v = match d.children() {
            None => (mf - order[&d] as f64).max(-mf),
            Some((b, c)) => mf.min((phi0.get(b).unwrap() + phi0.get(c).unwrap()) / 2.0 + 1.0),
        };
        phi0.set(d, v);
    }
    let e: BTreeSet<TreeLabel> = order.keys().copied().collect();
    extend_phi(&e, &phi0, universe)
}

#[derive(Clone, Debug)]
pub struct HausReport {
    pub m: u32,
    pub n: u64,
    /// `φ_a(e_a − (1/N)Σe_{a_k})` for each candidate `a`.
    pub values: Vec<(TreeLabel, f64)>,
    /// Minimum over the candidates.
    pub value: f64,
    /// `2M − 2^{2M+1}M/N`.
    pub bound: f64,
}

/// The candidates used when none are given: a fresh leaf, a level-2 pair
/// and a level-3 pair.
pub fn default_candidates(n: u64) -> Vec<TreeLabel> {
    let l = TreeLabel::leaf;
    vec![l(n + 1), TreeLabel::pair(l(1), l(2)), TreeLabel::pair(TreeLabel::pair(l(1), l(2)), l(3))]
}

/// Lower-bounds `‖e_a − (1/N)Σ_k e_{a_k}‖` with `a_k = leaf k` by
/// evaluating the functional peaked at each candidate `a`. Every functional
/// is checked for feasibility before its value is used.
pub fn haus_experiment(m: u32, n: u64, candidates: &[TreeLabel]) -> Result<HausReport> {
    if m == 0 {
        return Err(invalid("M must be a positive integer"));
    }
    if n == 0 {
        return Err(invalid("N must be positive"));
    }
    let defaults;
    let candidates = if candidates.is_empty() {
        defaults = default_candidates(n);
        &defaults[..]
    } else {
        candidates
    };
    let leaves: BTreeSet<TreeLabel> = (1..=n).map(TreeLabel::leaf).collect();
    let mean = TreeVector::from_pairs(leaves.iter().map(|&l| (l, 1.0 / n as f64)));
    let mut values = Vec::with_capacity(candidates.len());
    for &a in candidates {
        let mut universe = leaves.clone();
        universe.insert(a);
        let phi = build_phi(a, m, &universe)?;
        phi.check(1e-12)?;
        let v = functional_eval(&phi, &TreeVector::basis(a).sub(&mean))?;
        values.push((a, v));
    }
    let value = values.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mf = m as f64;
    let bound = 2.0 * mf - 2f64.powi(2 * m as i32 + 1) * mf / n as f64;
    Ok(HausReport { m, n, values, value, bound })
}

/// `‖e_(b,c) − (e_b + e_c)/2‖`.
pub fn jensen_defect(b: TreeLabel, c: TreeLabel, m: f64) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(invalid(format!("jensen defect needs M >= 1, got {m}")));
    }
    let mut x = TreeVector::basis(TreeLabel::pair(b, c));
    x.add_at(b, -0.5);
    x.add_at(c, -0.5);
    Ok(tree_norm(&x, m, DEFAULT_NORM_TOL)?.primal)
}
