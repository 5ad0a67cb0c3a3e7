//! Near faces of simplices inscribed in a Euclidean sphere, and small
//! subsets of a point cloud whose hull passes close to the origin.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::optim::min_quadratic_over_simplex;

/// Largest accepted ratio of extreme singular values of the edge matrix.
pub const MAX_CONDITION: f64 = 1e10;
/// Barycentric coordinates below this count as "on the boundary".
pub const INTERIOR_EPS: f64 = 1e-10;
pub const JITTER: f64 = 1e-8;
const SPHERE_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-15;
const JITTER_ATTEMPTS: u64 = 64;

/// `α_{n,k} = √((n−k)/(n(k+1)))`, the distance from the centre of a regular
/// unit `n`-simplex to its `k`-faces.
pub fn alpha(n: usize, k: usize) -> Result<f64> {
    if n == 0 || k >= n {
        return Err(invalid(format!("alpha needs 0 <= k <= n-1, got n={n}, k={k}")));
    }
    Ok((((n - k) as f64) / ((n * (k + 1)) as f64)).sqrt())
}

/// One level of the facet recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    /// Dimension of the simplex at this level.
    pub dim: usize,
    /// Radius of its circumsphere around the current centre.
    pub radius: f64,
    /// Distance from the current centre to its nearest facet.
    pub d: f64,
    /// `d(centre, F_k)²` for the face finally returned.
    pub face_dist_sq: f64,
    /// `d² + (r² − d²)·α_{dim−1,k}²`.
    pub bound_sq: f64,
}

impl TraceStep {
    pub fn holds(&self, tol: f64) -> bool {
        self.face_dist_sq <= self.bound_sq + tol
    }
}

#[derive(Clone, Debug)]
pub struct FaceResult {
    /// Sorted indices of the chosen vertices.
    pub vertices: Vec<usize>,
    /// Euclidean distance from the origin to their hull.
    pub distance: f64,
    /// The guaranteed bound for this face size.
    pub bound: f64,
    /// Recursion levels, outermost first (empty for `best_subset` inputs
    /// that needed no recursion).
    pub trace: Vec<TraceStep>,
    /// Whether the input had to be perturbed off the boundary.
    pub jittered: bool,
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance from `target` to the hull of `pts[ids]`.
fn hull_distance(pts: &[Vec<f64>], ids: &[usize], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    let cols: Vec<Vec<f64>> = ids.iter().map(|&i| pts[i].clone()).collect();
    let res = min_quadratic_over_simplex(&cols, target, GAP_TOL)?;
    let w = res.point.coords();
    let foot: Vec<f64> = (0..target.len()).map(|j| cols.iter().zip(w).map(|(c, wi)| wi * c[j]).sum()).collect();
    Ok((res.value.max(0.0).sqrt(), foot))
}

fn check_shape(pts: &[Vec<f64>]) -> Result<usize> {
    if pts.len() < 2 {
        return Err(invalid("need at least two points"));
    }
    let dim = pts[0].len();
    if let Some(p) = pts.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
    }
    if pts.iter().flatten().any(|x| !x.is_finite()) {
        return Err(invalid("coordinates must be finite"));
    }
    Ok(dim)
}

/// Barycentric coordinates of the origin, or an error if the points are
/// affinely degenerate or the origin is off their affine hull.
fn barycentric_of_origin(pts: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (k, dim) = (pts.len(), pts[0].len());
    if k - 1 > dim {
        return Err(Error::Degenerate(format!("{k} points cannot be affinely independent in dimension {dim}")));
    }
    let edges = DMatrix::from_fn(dim, k - 1, |r, c| pts[c + 1][r] - pts[0][r]);
    let sv = edges.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 0.0) || smax / smin > MAX_CONDITION {
        return Err(Error::Degenerate(format!("simplex condition number {:e} too large", smax / smin)));
    }
    let a = DMatrix::from_fn(dim + 1, k, |r, c| if r < dim { pts[c][r] } else { 1.0 });
    let mut b = DVector::zeros(dim + 1);
    b[dim] = 1.0;
    let lam = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| Error::Numerical(e.to_string()))?;
    let resid = (&a * &lam - &b).norm();
    if resid > 1e-9 {
        return Err(invalid(format!("origin is not in the affine hull of the points (residual {resid:e})")));
    }
    Ok(lam.iter().copied().collect())
}

/// A `k`-face of the simplex with the given vertices (on the unit sphere,
/// origin strictly inside) within `α_{n,k}` of the origin, found by
/// repeatedly descending to the nearest facet and recentring at its foot
/// point.
pub fn near_face(vertices: &[Vec<f64>], k: usize) -> Result<FaceResult> {
    check_shape(vertices)?;
    let n = vertices.len() - 1;
    let bound = alpha(n, k)?;
    if let Some(v) = vertices.iter().find(|v| (norm(v) - 1.0).abs() > SPHERE_TOL) {
        return Err(invalid(format!("vertex {v:?} is not on the unit sphere")));
    }
    let lam = barycentric_of_origin(vertices)?;
    if let Some(l) = lam.iter().copied().find(|&l| l <= 0.0) {
        return Err(invalid(format!("origin is not strictly inside the simplex (barycentric {l:e})")));
    }
    let (ids, trace) = descend(vertices, k)?;
    let origin = vec![0.0; vertices[0].len()];
    let (distance, _) = hull_distance(vertices, &ids, &origin)?;
    Ok(FaceResult { vertices: ids, distance, bound, trace, jittered: false })
}

fn descend(pts: &[Vec<f64>], k: usize) -> Result<(Vec<usize>, Vec<TraceStep>)> {
    let mut ids: Vec<usize> = (0..pts.len()).collect();
    let mut centre = vec![0.0; pts[0].len()];
    let mut radius = 1.0f64;
    let mut levels: Vec<(usize, f64, f64, Vec<f64>)> = Vec::new();
    while ids.len() > k + 1 {
        let dim = ids.len() - 1;
        // nearest facet; ties go to the lexicographically smallest index set
        let mut best: Option<(Vec<usize>, f64, Vec<f64>)> = None;
        for drop in (0..ids.len()).rev() {
            let facet: Vec<usize> = ids.iter().enumerate().filter(|(p, _)| *p != drop).map(|(_, &i)| i).collect();
            let (d, foot) = hull_distance(pts, &facet, &centre)?;
            let better = match &best {
                None => true,
                Some((f, bd, _)) => d < bd - 1e-12 || (d <= bd + 1e-12 && facet < *f),
            };
            if better {
                best = Some((facet, d, foot));
            }
        }
        let (facet, d, foot) = best.unwrap();
        levels.push((dim, radius, d, centre.clone()));
        radius = (radius * radius - d * d).max(0.0).sqrt();
        centre = foot;
        ids = facet;
    }
    let mut trace = Vec::with_capacity(levels.len());
    for (dim, r, d, c) in levels {
        let (fd, _) = hull_distance(pts, &ids, &c)?;
        let a = if k < dim - 1 { alpha(dim - 1, k)? } else { 0.0 };
        trace.push(TraceStep { dim, radius: r, d, face_dist_sq: fd * fd, bound_sq: d * d + (r * r - d * d) * a * a });
    }
    Ok((ids, trace))
}

/// `j` of the points whose hull lies within `√((n+1−j)/(nj))` of the origin,
/// for `n + 1` points in the unit ball with the origin in their hull.
pub fn best_subset(points: &[Vec<f64>], j: usize) -> Result<FaceResult> {
    let dim = check_shape(points)?;
    let n = points.len() - 1;
    if j == 0 || j > n {
        return Err(invalid(format!("best_subset needs 1 <= j <= n = {n}, got {j}")));
    }
    for p in points {
        let r = norm(p);
        if r == 0.0 {
            return Err(invalid("the zero vector cannot be normalised"));
        }
        if r > 1.0 + SPHERE_TOL {
            return Err(invalid(format!("point of norm {r} lies outside the unit ball")));
        }
    }
    let all: Vec<usize> = (0..points.len()).collect();
    let origin = vec![0.0; dim];
    let (d0, _) = hull_distance(points, &all, &origin)?;
    if d0 > crate::hulls::HULL_MEMBERSHIP_TOL {
        return Err(invalid(format!("origin is at distance {d0:e} from the hull")));
    }
    let bound = (((n + 1 - j) as f64) / ((n * j) as f64)).sqrt();

    let unit: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|x| x / norm(p)).collect()).collect();
    let unit = span_coordinates(&unit, n);
    let interior = |pts: &[Vec<f64>]| barycentric_of_origin(pts).map(|l| l.iter().all(|&x| x >= INTERIOR_EPS));
    let (simplex, jittered) = if matches!(interior(&unit), Ok(true)) {
        (unit, false)
    } else {
        (jitter_into_general_position(&unit, n, interior)?, true)
    };
    let (ids, trace) = descend(&simplex, j - 1)?;
    let (distance, _) = hull_distance(points, &ids, &origin)?;
    Ok(FaceResult { vertices: ids, distance, bound, trace, jittered })
}

/// Coordinates in an orthonormal basis of the linear span, padded with zeros
/// to `n` entries. Distances are unchanged; since the origin is in the hull
/// the span has dimension at most `n`, and a generic perturbation inside
/// `ℝⁿ` keeps the origin in the affine hull.
fn span_coordinates(pts: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let dim = pts[0].len();
    let m = DMatrix::from_fn(dim, pts.len(), |r, c| pts[c][r]);
    let svd = m.svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.max();
    let basis: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-12 * smax).collect();
    pts.iter()
        .map(|p| {
            let mut q: Vec<f64> = basis.iter().map(|&b| (0..dim).map(|r| u[(r, b)] * p[r]).sum()).collect();
            q.resize(q.len().max(n), 0.0);
            q
        })
        .collect()
}

/// Perturbs by `JITTER` into general position, then moves the origin a
/// hair toward the centroid and renormalises. Positive rescaling of the
/// vertices keeps the origin's barycentric coordinates positive, so the
/// result has the origin strictly inside. Seeds are fixed, so the outcome is
/// reproducible.
fn jitter_into_general_position(
    unit: &[Vec<f64>],
    n: usize,
    interior: impl Fn(&[Vec<f64>]) -> Result<bool>,
) -> Result<Vec<Vec<f64>>> {
    let dim = unit[0].len().max(n);
    let share = 1.0 / unit.len() as f64;
    for seed in 0..JITTER_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = unit
            .iter()
            .map(|p| (0..dim).map(|i| p.get(i).copied().unwrap_or(0.0) + JITTER * rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let Ok(lam) = barycentric_of_origin(&pts) else { continue };
        let low = lam.iter().copied().fold(f64::INFINITY, f64::min);
        // (1−s)λ + s/(n+1) ≥ 2·INTERIOR_EPS for every coordinate
        let s = if low >= 2.0 * INTERIOR_EPS { 0.0 } else { (2.0 * INTERIOR_EPS - low) / (share - low) };
        let centre: Vec<f64> = (0..dim).map(|r| pts.iter().map(|p| p[r] * share).sum::<f64>() * s).collect();
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let q = sub(p, &centre);
                let r = norm(&q);
                q.into_iter().map(|x| x / r).collect()
            })
            .collect();
        if matches!(interior(&moved), Ok(true)) {
            return Ok(moved);
        }
    }
    Err(Error::Degenerate("could not perturb the points into general position".into()))
}
