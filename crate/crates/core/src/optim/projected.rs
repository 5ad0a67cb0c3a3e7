//! Multi-start projected gradient descent on the probability simplex.

use crate::error::{Error, Result};
use crate::vector::{simplex_grid, simplex_grid_len, SimplexPoint};

pub const DEFAULT_PG_STEPS: usize = 2_000;
/// Largest change of any coordinate (before projection) in one step. Without
/// it a single long step can jump onto a vertex, where gradients of
/// entropy-type objectives degenerate and the search loses the edge it was
/// following.
const MAX_MOVE: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct SmoothResult {
    pub point: SimplexPoint,
    /// `f(point)`: an upper bound on the minimum over the simplex.
    pub value: f64,
    pub starts_used: usize,
}

/// Euclidean projection onto `{t ≥ 0, Σt = 1}` (sort-and-threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if uk - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Starting points: every vertex, the barycentre, and `extra` points spread
/// over the smallest simplex grid that has at least that many points.
fn starting_points(n: usize, extra: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = (0..n).map(|i| SimplexPoint::vertex(n, i).into_inner()).collect();
    pts.push(SimplexPoint::barycenter(n).into_inner());
    if extra > 0 {
        let mut m = 2;
        while simplex_grid_len(n, m) < extra as u128 && m < 64 {
            m += 1;
        }
        if simplex_grid_len(n, m) <= 200_000 {
            let grid = simplex_grid(n, m);
            let stride = (grid.len() / extra).max(1);
            pts.extend(grid.into_iter().step_by(stride).take(extra).map(SimplexPoint::into_inner));
        }
    }
    pts
}

/// Minimises a differentiable `f` over `Δ_{n−1}` from several starts and
/// returns the best local minimiser found. The value is an upper bound on the
/// true minimum, not a certificate of optimality.
///
/// `f` returns `(value, gradient)`; an error from it aborts the search.
pub fn min_smooth_over_simplex<F>(f: F, n: usize, starts: usize, tol: f64) -> Result<SmoothResult>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    if n == 0 {
        return Err(Error::InvalidArgument("simplex dimension must be at least 1".into()));
    }
    let eval = |t: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (v, g) = f(t)?;
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.len() });
        }
        if !v.is_finite() {
            return Err(Error::Numerical(format!("objective not finite at {t:?}")));
        }
        Ok((v, g))
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let pts = starting_points(n, starts);
    let used = pts.len();
    for start in pts {
        let (t, v) = descend(&eval, start, tol)?;
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((t, v));
        }
    }
    let (t, value) = best.unwrap();
    Ok(SmoothResult { point: SimplexPoint::project(&t), value, starts_used: used })
}

fn descend<F>(eval: &F, mut t: Vec<f64>, tol: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let (mut fx, mut g) = eval(&t)?;
    let mut step: f64 = 1.0;
    for _ in 0..DEFAULT_PG_STEPS {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("gradient not finite".into()));
        }
        // zero coordinates may carry huge (clamped) gradients that only push
        // them further out; the move is measured on the support
        let support: Vec<usize> = (0..t.len()).filter(|&i| t[i] > 0.0).collect();
        let mean = support.iter().map(|&i| g[i]).sum::<f64>() / support.len() as f64;
        let gmax = support.iter().fold(0.0f64, |m, &i| m.max((g[i] - mean).abs()));
        if gmax > 0.0 {
            step = step.min(MAX_MOVE / gmax);
        }
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = t.iter().zip(&g).map(|(x, gi)| x - step * gi).collect();
            let cand = project_to_simplex(&trial);
            let diff: Vec<f64> = cand.iter().zip(&t).map(|(a, b)| a - b).collect();
            let dist2: f64 = diff.iter().map(|d| d * d).sum();
            if dist2 == 0.0 {
                break;
            }
            let (fc, gc) = eval(&cand)?;
            let model = fx + g.iter().zip(&diff).map(|(a, b)| a * b).sum::<f64>() + dist2 / (2.0 * step);
            if fc <= model + 1e-15 * fx.abs() {
                accepted = Some((cand, fc, gc, dist2.sqrt()));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc, gc, moved)) = accepted else {
            break;
        };
        let decrease = fx - fc;
        t = cand;
        fx = fc;
        g = gc;
        step *= 2.0;
        if moved <= tol || decrease.abs() <= tol * tol * fx.abs().max(1.0) {
            break;
        }
    }
    Ok((t, fx))
}
