//! The variational problem `min I(y)` over densities `0 ≤ y ≤ 1` on `[0, n]`
//! with unit mass, where `I(y) = M²∫y² + (∫φ(y))²`.

use std::f64::consts::LN_2;

use crate::entropy::phi_unchecked;
use crate::error::{invalid, Result};

const MASS_TOL: f64 = 1e-10;
const GRID_MESH: f64 = 1e-4;
/// Extra logarithmic grid below the uniform mesh, where `log₂(1/k)` varies fast.
const LOG_GRID_DECADES: i32 = 12;
const LOG_GRID_PER_DECADE: usize = 200;

/// A step function on `[0, n]`: consecutive pieces `(length, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pieces: Vec<(f64, f64)>,
    domain: f64,
}

impl StepFunction {
    pub fn new(pieces: Vec<(f64, f64)>, domain: f64) -> Result<Self> {
        if !(domain > 0.0) || !domain.is_finite() {
            return Err(invalid(format!("domain length must be positive, got {domain}")));
        }
        if pieces.is_empty() {
            return Err(invalid("step function needs at least one piece"));
        }
        for &(len, val) in &pieces {
            if !(len > 0.0) || !len.is_finite() {
                return Err(invalid(format!("piece length must be positive, got {len}")));
            }
            if !(0.0..=1.0).contains(&val) {
                return Err(invalid(format!("piece value must lie in [0, 1], got {val}")));
            }
        }
        let total: f64 = pieces.iter().map(|p| p.0).sum();
        if (total - domain).abs() > MASS_TOL * domain.max(1.0) {
            return Err(invalid(format!("piece lengths sum to {total}, domain is {domain}")));
        }
        let mass: f64 = pieces.iter().map(|p| p.0 * p.1).sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(invalid(format!("mass must be 1, got {mass}")));
        }
        Ok(Self { pieces, domain })
    }

    /// `(1/n)·𝟙_(0,n)`.
    pub fn uniform(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let n = n as f64;
        Self::new(vec![(n, 1.0 / n)], n)
    }

    /// `1` on `[0, x]`, `k` on a piece of length `(1−x)/k`, zero after.
    pub fn family(n: u64, x: f64, k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(k > 0.0 && k <= 1.0) {
            return Err(invalid(format!("family parameters out of range: x={x}, k={k}")));
        }
        let n = n as f64;
        let mid = (1.0 - x) / k;
        let rest = n - x - mid;
        if rest < -MASS_TOL * n {
            return Err(invalid(format!("family (x={x}, k={k}) does not fit in [0, {n}]")));
        }
        let pieces: Vec<(f64, f64)> =
            [(x, 1.0), (mid, k), (rest.max(0.0), 0.0)].into_iter().filter(|p| p.0 > MASS_TOL).collect();
        Self::new(pieces, n)
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn domain(&self) -> f64 {
        self.domain
    }

    /// Total length on which the function equals 1.
    pub fn length_at_one(&self) -> f64 {
        self.pieces.iter().filter(|p| p.1 >= 1.0 - 1e-12).map(|p| p.0).sum()
    }
}

pub fn i_eval(y: &StepFunction, m: f64) -> f64 {
    let sq: f64 = y.pieces.iter().map(|&(l, v)| l * v * v).sum();
    let ent: f64 = y.pieces.iter().map(|&(l, v)| l * phi_unchecked(v)).sum();
    m * m * sq + ent * ent
}

/// `∂I/∂k` along `k·𝟙_(0,1/k)`: `M² − 2log₂(1/k)/(k·ln2)`.
pub fn family_derivative(k: f64, m: f64) -> f64 {
    m * m - 2.0 * (1.0 / k).log2() / (k * LN_2)
}

/// `M²` at which the uniform step is a critical point of the family: `(2/ln2)·n·log₂n`.
pub fn critical_m_squared(n: u64) -> f64 {
    let n = n as f64;
    2.0 / LN_2 * n * n.log2()
}

#[derive(Clone, Debug)]
pub struct IMinimum {
    pub y: StepFunction,
    pub value: f64,
    /// Length on which the minimiser equals 1.
    pub x: f64,
    /// The non-trivial value of the minimiser.
    pub k: f64,
}

/// Minimises `I` over `{1 on [0,x], k on length (1−x)/k}` (which contains
/// the one-parameter family `x = 0`): dense grid in `k`, closed form in `x`,
/// golden-section refinement around the best grid point.
pub fn minimize_i(n: u64, m: f64, tol: f64) -> Result<IMinimum> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(m > 0.0) || !m.is_finite() {
        return Err(invalid(format!("M must be positive, got {m}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let nf = n as f64;

    let mut grid: Vec<f64> = (1..=(1.0 / GRID_MESH) as usize).map(|i| i as f64 * GRID_MESH).collect();
    for d in 0..LOG_GRID_DECADES {
        for j in 0..LOG_GRID_PER_DECADE {
            grid.push(GRID_MESH * 10f64.powf(-(d as f64) - j as f64 / LOG_GRID_PER_DECADE as f64));
        }
    }
    grid.push(1.0 / nf);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let best = grid
        .iter()
        .enumerate()
        .map(|(i, &k)| (i, best_x(nf, m, k).1))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap();
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let k_ref = golden(|k| best_x(nf, m, k).1, lo, hi, tol);
    // near a minimum f is flat to ~√ε in k: keep the grid point (which
    // contains 1/n exactly) unless refinement is clearly better
    let f_grid = best_x(nf, m, grid[best]).1;
    let k = if best_x(nf, m, k_ref).1 < f_grid - 1e-13 * f_grid.abs() { k_ref } else { grid[best] };

    let (x, _) = best_x(nf, m, k);
    let y = StepFunction::family(n, x, k)?;
    let value = i_eval(&y, m);
    Ok(IMinimum { y, value, x, k })
}

/// Optimal `x` for fixed `k`. With `u = 1 − x`,
/// `I = M²(1 − u(1−k)) + u²·log₂(1/k)²`, a quadratic in `u` on the feasible
/// interval `u ≤ min(1, (n−1)k/(1−k))`.
fn best_x(n: f64, m: f64, k: f64) -> (f64, f64) {
    let m2 = m * m;
    if k >= 1.0 {
        return (0.0, m2);
    }
    let l = (1.0 / k).log2();
    let u_max = ((n - 1.0) * k / (1.0 - k)).min(1.0);
    let u_star = if l > 0.0 { m2 * (1.0 - k) / (2.0 * l * l) } else { u_max };
    let u = u_star.clamp(0.0, u_max);
    (1.0 - u, m2 * (1.0 - u * (1.0 - k)) + u * u * l * l)
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}
