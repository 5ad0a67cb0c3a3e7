//! The entropy-graph sets `A_M = {M·Σ t_i e_i + E(t)·e_0}` and the closed-form
//! bounds on their Hausdorff distance to the hull and their diameter.
//!
//! Axis 0 carries the height `E(t)`; axes `1..` are horizontal. Two layouts
//! are supported: [`Layout::Full`] puts all `n` simplex coordinates on their
//! own axis, [`Layout::Auerbach`] sends the last simplex vertex to the origin
//! (`e_n = 0`), so only `n − 1` horizontal axes are used.

use std::f64::consts::LN_2;

use crate::entropy::{entropy_grad, entropy_raw, phi_unchecked};
use crate::error::{invalid, Error, Result};
use crate::hulls::{convexity_defect, diameter, hausdorff_lb, SampledSet};
use crate::optim::min_smooth_over_simplex;
use crate::vector::{simplex_grid, simplex_grid_len, NormSpec, SimplexPoint, Vector};

/// Largest sample `build_entropy_set` will materialise.
pub const MAX_SAMPLE: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Layout {
    #[default]
    Full,
    Auerbach,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstructionSpec {
    pub space: NormSpec,
    pub n: usize,
    pub m: f64,
    pub grid: usize,
    pub layout: Layout,
}

impl ConstructionSpec {
    pub fn new(space: NormSpec, n: usize, m: f64, grid: usize) -> Result<Self> {
        let spec = Self { space, n, m, grid, layout: Layout::Full };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.layout = layout;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        if self.n < 2 {
            return Err(invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(invalid(format!("M must be positive, got {}", self.m)));
        }
        if self.grid < 1 {
            return Err(invalid("grid must be at least 1"));
        }
        Ok(())
    }

    fn horizontal_axes(&self) -> usize {
        match self.layout {
            Layout::Full => self.n,
            Layout::Auerbach => self.n - 1,
        }
    }

    /// The point of `A_M` over `t`.
    pub fn point(&self, t: &SimplexPoint) -> Result<Vector> {
        if t.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: t.dim() });
        }
        let mut v = Vector::from_pairs(
            t.coords().iter().take(self.horizontal_axes()).enumerate().map(|(i, &ti)| (i + 1, self.m * ti)),
        );
        v.set(0, entropy_raw(t.coords()));
        Ok(v)
    }
}

/// The Euclidean scale `M = √((2/ln2)·n·log₂n)`.
pub fn extremal_m(n: usize) -> f64 {
    let nf = n as f64;
    (2.0 / LN_2 * nf * nf.log2()).sqrt()
}

/// `A_M` sampled over `simplex_grid(n, grid)`.
pub fn build_entropy_set(spec: &ConstructionSpec) -> Result<SampledSet> {
    spec.validate()?;
    if !matches!(spec.space, NormSpec::Lp(_)) {
        return Err(Error::UnsupportedNorm("entropy sets are built in lp spaces only".into()));
    }
    let count = simplex_grid_len(spec.n, spec.grid);
    if count > MAX_SAMPLE {
        return Err(invalid(format!("grid would produce {count} points, more than {MAX_SAMPLE}")));
    }
    let points = simplex_grid(spec.n, spec.grid).iter().map(|t| spec.point(t)).collect::<Result<Vec<_>>>()?;
    let provenance =
        format!("entropy set {:?} n={} M={} grid={} {:?}", spec.space, spec.n, spec.m, spec.grid, spec.layout);
    SampledSet::new(points, provenance)
}

/// `x_0 = (M/n)·Σ e_i` over the horizontal axes, height 0.
pub fn witness(spec: &ConstructionSpec) -> Vector {
    let c = spec.m / spec.n as f64;
    Vector::from_pairs((1..=spec.horizontal_axes()).map(|i| (i, c)))
}

/// Largest sampled convexity defect any grid sample of `A_M` can show:
/// `1 + M·n^{1/p}/grid + n·φ(1/grid)`. The second term covers rounding the
/// horizontal part to the grid, the third the height change (`φ` is the
/// modulus of continuity of itself on `[0, 1/2]`).
pub fn mesh_defect_bound(spec: &ConstructionSpec) -> Result<f64> {
    let NormSpec::Lp(p) = spec.space else {
        return Err(Error::UnsupportedNorm("mesh bound needs an lp space".into()));
    };
    let h = 1.0 / spec.grid as f64;
    let nf = spec.n as f64;
    let spread = if p.is_infinite() { 1.0 } else { nf.powf(1.0 / p) };
    let height = if spec.grid >= 2 { nf * phi_unchecked(h) } else { nf.log2() };
    Ok(1.0 + spec.m * spread * h + height)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    /// `M` is the extremal scale and `n ≥ 4`: the minimiser is the uniform
    /// point and the distance is exactly `log₂n`.
    Analytic,
    /// Multi-start projected gradient; the value is an upper bound.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessDistance {
    pub value: f64,
    pub mode: DistanceMode,
    /// `min g` as found (or known).
    pub g_min: f64,
}

/// `d(x_0, A)` in `ℓ2` for the full layout, via
/// `d² = min_t M²Σt_i² + E(t)² − M²/n`. Uses the closed form when `M` is the
/// extremal scale and `n ≥ 4`, numeric search otherwise.
pub fn euclid_witness_distance(n: usize, m: f64) -> Result<WitnessDistance> {
    if n < 2 || !(m > 0.0 && m.is_finite()) {
        return Err(invalid(format!("need n >= 2 and M > 0, got n={n}, M={m}")));
    }
    let pm = extremal_m(n);
    if n >= 4 && ((m - pm) / pm).abs() <= 1e-12 {
        let l = (n as f64).log2();
        return Ok(WitnessDistance { value: l, mode: DistanceMode::Analytic, g_min: m * m / n as f64 + l * l });
    }
    euclid_witness_distance_numeric(n, m, 1e-12)
}

/// Numeric mode of [`euclid_witness_distance`], always searched.
pub fn euclid_witness_distance_numeric(n: usize, m: f64, tol: f64) -> Result<WitnessDistance> {
    if n < 2 || !(m > 0.0 && m.is_finite()) {
        return Err(invalid(format!("need n >= 2 and M > 0, got n={n}, M={m}")));
    }
    let m2 = m * m;
    let g = |t: &[f64]| {
        let e = entropy_raw(t);
        let grad = entropy_grad(t).iter().zip(t).map(|(de, ti)| 2.0 * m2 * ti + 2.0 * e * de).collect();
        Ok((m2 * t.iter().map(|x| x * x).sum::<f64>() + e * e, grad))
    };
    let res = min_smooth_over_simplex(g, n, 4 * n, tol)?;
    let radicand = res.value - m2 / n as f64;
    if radicand < -1e-9 * m2.max(1.0) {
        return Err(Error::Numerical(format!("negative squared distance {radicand}")));
    }
    Ok(WitnessDistance { value: radicand.max(0.0).sqrt(), mode: DistanceMode::Numeric, g_min: res.value })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub m_used: f64,
    pub hausdorff_lb: f64,
    pub diam_ub: f64,
    /// Whether the "n large enough" hypotheses of the bound hold at this `n`.
    pub valid: bool,
}

impl BoundReport {
    pub fn is_consistent(&self) -> bool {
        self.hausdorff_lb <= self.diam_ub
    }
}

/// The `ℓ1` construction: `M = 4log₂n/ε`, `𝓗 ≥ log₂n − ε`,
/// `diam ≤ (8/ε + 1)log₂n`, valid once `log₂(n+1) − log₂n ≤ ε/4`.
pub fn l1_bound(n: usize, eps: f64) -> Result<BoundReport> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    if !(eps > 0.0 && eps < 2.0) {
        return Err(invalid(format!("eps must lie in (0, 2), got {eps}")));
    }
    let l = (n as f64).log2();
    Ok(BoundReport {
        m_used: 4.0 * l / eps,
        hausdorff_lb: l - eps,
        diam_ub: (8.0 / eps + 1.0) * l,
        valid: ((n + 1) as f64).log2() - l <= eps / 4.0,
    })
}

/// The construction in a space at Banach–Mazur distance `d` from `ℓ1ⁿ`:
/// `M = 12(log₂n)²/ε`, `𝓗 ≥ log₂n − ε`, `diam ≤ 25(log₂n)²d/ε`. Valid once
/// `log₂(n+1) − log₂n ≤ ε/6` and `ε ≤ d·log₂n` (the latter absorbs the
/// height term `log₂n` into the diameter bound).
pub fn general_bound(n: usize, eps: f64, dist_to_l1: f64) -> Result<BoundReport> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    if !(eps > 0.0 && eps < 3.0) {
        return Err(invalid(format!("eps must lie in (0, 3), got {eps}")));
    }
    if !(dist_to_l1 >= 1.0 && dist_to_l1.is_finite()) {
        return Err(invalid(format!("Banach-Mazur distance must be >= 1, got {dist_to_l1}")));
    }
    let l = (n as f64).log2();
    Ok(BoundReport {
        m_used: 12.0 * l * l / eps,
        hausdorff_lb: l - eps,
        diam_ub: 25.0 * l * l * dist_to_l1 / eps,
        valid: ((n + 1) as f64).log2() - l <= eps / 6.0 && eps <= dist_to_l1 * l,
    })
}

/// `d(ℓpⁿ, ℓ1ⁿ) = n^{(p−1)/p}` for `1 ≤ p ≤ 2`.
pub fn lp_distance_to_l1(n: usize, p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(invalid(format!("the formula holds for 1 <= p <= 2, got {p}")));
    }
    Ok((n as f64).powf((p - 1.0) / p))
}

/// `f(j, n) = (log₂n − 1 − ⌈log₂j⌉)·√j / √(n−j+1)`.
pub fn lowbound_ratio(j: u64, n: u64) -> Result<f64> {
    if j < 1 || j > n {
        return Err(invalid(format!("need 1 <= j <= n, got j={j}, n={n}")));
    }
    let ceil_log = if j == 1 { 0 } else { 64 - (j - 1).leading_zeros() };
    let (jf, nf) = (j as f64, n as f64);
    Ok((nf.log2() - 1.0 - ceil_log as f64) * jf.sqrt() / (nf - jf + 1.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowBound {
    pub best_j: u64,
    /// `max_j f(j, n)`.
    pub ratio: f64,
    /// `ratio·√n`: a lower bound on `diam(A)` for any approximately convex
    /// `A ⊆ ℝⁿ` with `𝓗(A, Co(A)) ≥ log₂n − 1`.
    pub bound: f64,
}

/// Maximises `f(j, n)` over `1 ≤ j ≤ n`. On each block `2^{k−1} < j ≤ 2^k`
/// the numerator is constant and `√j/√(n−j+1)` increases, so only powers of
/// two and `j = n` need checking.
pub fn lowbound3(n: u64) -> Result<LowBound> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    let mut best = (1, lowbound_ratio(1, n)?);
    let candidates = (0..64).map(|k| 1u64 << k).take_while(|&j| j <= n).chain([n]);
    for j in candidates {
        let f = lowbound_ratio(j, n)?;
        if f > best.1 {
            best = (j, f);
        }
    }
    Ok(LowBound { best_j: best.0, ratio: best.1, bound: best.1 * (n as f64).sqrt() })
}

/// `F(α) = (log₂α − 1)/√(α − 1)`.
pub fn big_f(alpha: f64) -> f64 {
    (alpha.log2() - 1.0) / (alpha - 1.0).sqrt()
}

/// `G(β) = (log₂β − 1)/√(β − 1/2)`.
pub fn big_g(beta: f64) -> f64 {
    (beta.log2() - 1.0) / (beta - 0.5).sqrt()
}

pub const ALPHA0: f64 = 9.109883742;
pub const BETA0: f64 = 9.919205826;

/// `D ≥ 8^{1/p}/(16·T_p)·2^{d(p−1)/p}` for a set with `𝓗(A, Co(A)) ≥ d` in
/// a space of type `p` with constant `T_p`. Needs `d ≥ 2`.
pub fn typep_bound(p: f64, tp: f64, d: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(invalid(format!("type p must lie in (1, 2], got {p}")));
    }
    if !(tp >= 1.0 && tp.is_finite()) {
        return Err(invalid(format!("type constant must be >= 1, got {tp}")));
    }
    if !(d >= 2.0 && d.is_finite()) {
        return Err(invalid(format!("the type-p bound needs d >= 2, got {d}")));
    }
    Ok(8f64.powf(1.0 / p) / (16.0 * tp) * 2f64.powf(d * (p - 1.0) / p))
}

/// Measured quantities of a sampled `A_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetMeasurements {
    pub points: usize,
    /// `d(x_0, sample)`, never below the true `d(x_0, A)`.
    pub witness_distance: f64,
    pub diameter: f64,
    /// Sampled convexity defect, or `None` when not requested.
    pub defect: Option<f64>,
    pub defect_bound: f64,
}

/// Builds the sample and measures witness distance, diameter and (with
/// `t_grid > 0`) the sampled convexity defect.
pub fn measure_set(spec: &ConstructionSpec, t_grid: usize) -> Result<SetMeasurements> {
    let a = build_entropy_set(spec)?;
    let x0 = witness(spec);
    let witness_distance = hausdorff_lb(&a, std::slice::from_ref(&x0), &spec.space)?;
    let diameter = diameter(&a, &spec.space)?;
    let defect = if t_grid > 0 { Some(convexity_defect(&a, &spec.space, t_grid)?.sup_defect) } else { None };
    Ok(SetMeasurements { points: a.len(), witness_distance, diameter, defect, defect_bound: mesh_defect_bound(spec)? })
}
