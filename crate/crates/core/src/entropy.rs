//! The entropy function on the simplex and the Hyers–Ulam constants `κ(n)`.

use std::f64::consts::LN_2;

use crate::error::{invalid, Error, Result};
use crate::vector::SimplexPoint;

/// `φ(t) = −t·log₂t`, with `φ(0) = 0`.
pub fn phi(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("phi is defined on [0, 1], got {t}")));
    }
    Ok(phi_unchecked(t))
}

#[inline]
pub(crate) fn phi_unchecked(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -t * t.log2()
    }
}

/// `φ'(t) = −log₂t − 1/ln2`. Infinite at 0; callers clamp.
#[inline]
pub(crate) fn phi_prime(t: f64) -> f64 {
    -t.max(f64::MIN_POSITIVE).log2() - 1.0 / LN_2
}

/// `E(t) = Σ φ(t_i)`.
pub fn entropy(t: &SimplexPoint) -> f64 {
    entropy_raw(t.coords())
}

/// [`entropy`] on raw coordinates, without the simplex check.
pub fn entropy_raw(t: &[f64]) -> f64 {
    t.iter().map(|&x| phi_unchecked(x)).sum()
}

/// Gradient of [`entropy_raw`], with `t_i = 0` clamped to the smallest
/// positive normal so the result stays finite.
pub fn entropy_grad(t: &[f64]) -> Vec<f64> {
    t.iter().map(|&x| phi_prime(x)).collect()
}

/// `|E(tx + (1−t)y) − tE(x) − (1−t)E(y)|`.
pub fn affine_defect(x: &SimplexPoint, y: &SimplexPoint, t: f64) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("t must lie in [0, 1], got {t}")));
    }
    let z: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(a, b)| t * a + (1.0 - t) * b).collect();
    Ok((entropy_raw(&z) - t * entropy(x) - (1.0 - t) * entropy(y)).abs())
}

/// Bounds and closed form for the sharp Hyers–Ulam constant on `Δ_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaReport {
    pub n: u64,
    /// `log₂(n+1)`
    pub lower: f64,
    /// `⌈log₂(n+1)⌉`
    pub upper: f64,
    /// `⌊log₂(n+1)⌋ + 2 − 2^{1+⌊log₂(n+1)⌋}/(n+1)`. This closed form is
    /// stated without proof in the literature; only the bounds are proven.
    pub formula: f64,
}

impl KappaReport {
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.formula && self.formula <= self.upper
    }
}

pub fn kappa(n: u64) -> Result<KappaReport> {
    if n < 1 {
        return Err(invalid("kappa(n) needs n >= 1"));
    }
    let m = n.checked_add(1).ok_or_else(|| invalid("n too large"))?;
    let floor_log = 63 - m.leading_zeros() as u64;
    let ceil_log = if m.is_power_of_two() { floor_log } else { floor_log + 1 };
    let lower = if m.is_power_of_two() { floor_log as f64 } else { (m as f64).log2() };
    let formula = floor_log as f64 + 2.0 - 2f64.powi(1 + floor_log as i32) / m as f64;
    Ok(KappaReport { n, lower, upper: ceil_log as f64, formula })
}

/// For `n = 2^k`, whether `κ(n−1) ≥ √(2n)(√(2n) + √(n−1))/(n+1)`.
///
/// This is the sufficient condition under which `C(ℝⁿ) = log₂n`; the raw
/// inequality is reported for every `k`, including small ones.
pub fn power2_condition(n: u64) -> Result<bool> {
    let (lhs, rhs) = power2_sides(n)?;
    Ok(lhs >= rhs)
}

/// `(κ(n−1), √(2n)(√(2n)+√(n−1))/(n+1))` for `n = 2^k`, `k ≥ 1`.
pub fn power2_sides(n: u64) -> Result<(f64, f64)> {
    if n < 2 || !n.is_power_of_two() {
        return Err(invalid(format!("power2_condition needs n = 2^k with k >= 1, got {n}")));
    }
    let lhs = kappa(n - 1)?.formula;
    let nf = n as f64;
    let s = (2.0 * nf).sqrt();
    Ok((lhs, s * (s + (nf - 1.0).sqrt()) / (nf + 1.0)))
}
