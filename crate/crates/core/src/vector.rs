//! Sparse vectors over labelled index sets, the norms used throughout, and
//! discretisation of the probability simplex.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{invalid, Error, Result};
use crate::treespace::TreeLabel;

/// Coordinates of a [`Vector`]. Integer axes carry `ℓp` points, tree labels
/// carry points of the tree space.
pub trait Index: Ord + Clone + Debug {
    /// The tree label behind this index, if there is one.
    fn tree_label(&self) -> Option<TreeLabel> {
        None
    }
}

impl Index for usize {}

impl Index for TreeLabel {
    fn tree_label(&self) -> Option<TreeLabel> {
        Some(*self)
    }
}

/// Finitely supported vector. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<I: Index = usize> {
    entries: BTreeMap<I, f64>,
}

impl<I: Index> Default for Vector<I> {
    fn default() -> Self {
        Self { entries: BTreeMap::new() }
    }
}

impl<I: Index> Vector<I> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Unit vector `e_i`.
    pub fn basis(i: I) -> Self {
        let mut v = Self::zero();
        v.set(i, 1.0);
        v
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (I, f64)>) -> Self {
        let mut v = Self::zero();
        for (i, x) in pairs {
            v.add_at(i, x);
        }
        v
    }

    pub fn get(&self, i: &I) -> f64 {
        self.entries.get(i).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, i: I, value: f64) {
        if value == 0.0 {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, value);
        }
    }

    pub fn add_at(&mut self, i: I, value: f64) {
        let v = self.get(&i) + value;
        self.set(i, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&I, f64)> + '_ {
        self.entries.iter().map(|(i, x)| (i, *x))
    }

    pub fn support(&self) -> impl Iterator<Item = &I> + '_ {
        self.entries.keys()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_pairs(self.iter().map(|(i, x)| (i.clone(), s * x)))
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            out.add_at(i.clone(), s * x);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// Convex combination `t·self + (1−t)·other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        self.scaled(t).axpy(1.0 - t, other)
    }

    /// Drops entries with `|x| ≤ eps`.
    pub fn pruned(&self, eps: f64) -> Self {
        Self::from_pairs(self.iter().filter(|(_, x)| x.abs() > eps).map(|(i, x)| (i.clone(), x)))
    }
}

impl Vector<usize> {
    /// Dense vector with entries on axes `0..values.len()`.
    pub fn dense(values: &[f64]) -> Self {
        Self::from_pairs(values.iter().copied().enumerate())
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&i, x) in self.iter() {
            out[i] = x;
        }
        out
    }
}

/// Point of the probability simplex `Δ_{n−1}` (n coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(invalid("simplex point needs at least one coordinate"));
        }
        if let Some(x) = t.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(invalid(format!("simplex coordinate {x} is negative or not finite")));
        }
        let sum: f64 = t.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL * t.len().max(1) as f64 {
            return Err(invalid(format!("simplex coordinates sum to {sum}, not 1")));
        }
        Ok(Self(t))
    }

    /// Vertex `e_i` of `Δ_{n−1}`.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut t = vec![0.0; n];
        t[i] = 1.0;
        Self(t)
    }

    pub fn barycenter(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Projects an arbitrary finite vector to the nearest simplex point.
    pub fn project(v: &[f64]) -> Self {
        Self(crate::optim::project_to_simplex(v))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn lerp(&self, other: &Self, t: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let v = self.0.iter().zip(&other.0).map(|(a, b)| (t * a + (1.0 - t) * b).max(0.0)).collect();
        Ok(Self(v))
    }
}

/// Which norm to measure with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormSpec {
    /// `ℓp` with `p ∈ [1, ∞]`.
    Lp(f64),
    /// `M·Σ_{leaves}|x_a| + Σ_{pairs}|x_a|` on tree-indexed vectors.
    WeightedL1 { leaf_weight: f64 },
    /// The tree-space norm with scale `M`.
    Tree { m: f64 },
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormSpec::Lp(p) if !(p >= 1.0) => Err(invalid(format!("lp norm needs p >= 1, got {p}"))),
            NormSpec::WeightedL1 { leaf_weight: m } | NormSpec::Tree { m } if !(m > 0.0 && m.is_finite()) => {
                Err(invalid(format!("norm scale M must be positive, got {m}")))
            }
            _ => Ok(()),
        }
    }

    pub fn norm<I: Index>(&self, x: &Vector<I>) -> Result<f64> {
        match *self {
            NormSpec::Lp(p) => lp_norm(x, p),
            NormSpec::WeightedL1 { leaf_weight } => weighted_l1_norm(x, leaf_weight),
            NormSpec::Tree { m } => {
                let tx = to_tree_vector(x)?;
                Ok(crate::treespace::tree_norm(&tx, m, crate::treespace::DEFAULT_NORM_TOL)?.primal)
            }
        }
    }

    pub fn distance<I: Index>(&self, x: &Vector<I>, y: &Vector<I>) -> Result<f64> {
        self.norm(&x.sub(y))
    }
}

fn to_tree_vector<I: Index>(x: &Vector<I>) -> Result<Vector<TreeLabel>> {
    x.iter()
        .map(|(i, v)| i.tree_label().map(|l| (l, v)).ok_or_else(|| invalid(format!("index {i:?} is not a tree label"))))
        .collect::<Result<Vec<_>>>()
        .map(Vector::from_pairs)
}

/// `(Σ|x_i|^p)^{1/p}`, or `max|x_i|` for `p = ∞`.
pub fn lp_norm<I: Index>(x: &Vector<I>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid(format!("lp norm needs p >= 1, got {p}")));
    }
    Ok(lp_norm_slice(x.iter().map(|(_, v)| v), p))
}

pub(crate) fn lp_norm_slice(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 1.0 {
        return values.map(f64::abs).sum();
    }
    // scale by the max entry to avoid overflow in |x|^p
    let vals: Vec<f64> = values.map(f64::abs).collect();
    let scale = vals.iter().fold(0.0f64, |m, &v| m.max(v));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = vals.iter().map(|v| (v / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

/// `M·Σ_{a ∈ L1}|x_a| + Σ_{a ∉ L1}|x_a|`.
pub fn weighted_l1_norm<I: Index>(x: &Vector<I>, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(invalid(format!("leaf weight M must be positive, got {m}")));
    }
    let mut total = 0.0;
    for (i, v) in x.iter() {
        let label = i.tree_label().ok_or_else(|| invalid(format!("index {i:?} is not a tree label")))?;
        total += if label.is_leaf() { m * v.abs() } else { v.abs() };
    }
    Ok(total)
}

/// Number of points `simplex_grid(n, m)` returns: `C(m+n−1, n−1)`.
/// Saturates at `u128::MAX`.
pub fn simplex_grid_len(n: usize, m: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let k = (n - 1).min(m) as u128;
    let top = (m + n - 1) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (top - i) / (i + 1) stays integral at each step
        acc = match acc.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All points `(k_1/m, …, k_n/m)` with `k_i ≥ 0` and `Σk_i = m`, in
/// lexicographically decreasing order of `k`.
pub fn simplex_grid(n: usize, m: usize) -> Vec<SimplexPoint> {
    if n == 0 || m == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(usize::try_from(simplex_grid_len(n, m)).unwrap_or(0));
    let mut k = vec![0usize; n];
    fill_compositions(&mut k, 0, m, m, &mut out);
    out
}

fn fill_compositions(k: &mut [usize], pos: usize, left: usize, m: usize, out: &mut Vec<SimplexPoint>) {
    if pos == k.len() - 1 {
        k[pos] = left;
        out.push(SimplexPoint(k.iter().map(|&c| c as f64 / m as f64).collect()));
        return;
    }
    for c in (0..=left).rev() {
        k[pos] = c;
        fill_compositions(k, pos + 1, left - c, m, out);
    }
}
