//! Distances to convex hulls, convexity defects and Hausdorff lower bounds
//! for finite point samples.

use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::optim::{lp_solve, min_quadratic_over_simplex, LpInstance, LpStatus, Relation, Sense};
use crate::vector::{lp_norm_slice, Index, NormSpec, Vector};

/// Default tolerance for accepting a witness as a member of `Co(A)`.
pub const HULL_MEMBERSHIP_TOL: f64 = 1e-7;

/// A finite sample of a set, tagged with how it was produced.
#[derive(Clone, Debug)]
pub struct SampledSet<I: Index = usize> {
    points: Vec<Vector<I>>,
    provenance: String,
}

impl<I: Index> SampledSet<I> {
    pub fn new(points: Vec<Vector<I>>, provenance: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("a sampled set needs at least one point"));
        }
        Ok(Self { points, provenance: provenance.into() })
    }

    pub fn points(&self) -> &[Vector<I>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Image under a linear map applied point by point.
    pub fn map(&self, f: impl Fn(&Vector<I>) -> Vector<I>, provenance: impl Into<String>) -> Self {
        Self { points: self.points.iter().map(f).collect(), provenance: provenance.into() }
    }
}

/// Largest sampled value of `d(tx + (1−t)y, A)` and where it occurred.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    pub sup_defect: f64,
    /// `(index of x, index of y, t)` into the sampled set.
    pub witness: (usize, usize, f64),
}

/// Points of a sample laid out on a shared dense coordinate list.
struct Dense<I: Index> {
    axes: Vec<I>,
    points: Vec<Vec<f64>>,
}

impl<I: Index> Dense<I> {
    fn new<'a>(sets: impl IntoIterator<Item = &'a Vector<I>>) -> (Self, Vec<&'a Vector<I>>)
    where
        I: 'a,
    {
        let vecs: Vec<&Vector<I>> = sets.into_iter().collect();
        let axes: Vec<I> =
            vecs.iter().flat_map(|v| v.support().cloned()).collect::<BTreeSet<I>>().into_iter().collect();
        let points = vecs.iter().map(|v| axes.iter().map(|i| v.get(i)).collect()).collect();
        (Self { axes, points }, vecs)
    }
}

/// A norm evaluated on dense coordinate slices.
enum DenseNorm {
    Lp(f64),
    Weighted(Vec<f64>),
    Tree(f64),
}

impl DenseNorm {
    fn new<I: Index>(spec: &NormSpec, axes: &[I]) -> Result<Self> {
        spec.validate()?;
        Ok(match *spec {
            NormSpec::Lp(p) => DenseNorm::Lp(p),
            NormSpec::WeightedL1 { leaf_weight } => DenseNorm::Weighted(
                axes.iter()
                    .map(|i| {
                        i.tree_label()
                            .map(|l| if l.is_leaf() { leaf_weight } else { 1.0 })
                            .ok_or_else(|| invalid(format!("index {i:?} is not a tree label")))
                    })
                    .collect::<Result<_>>()?,
            ),
            NormSpec::Tree { m } => {
                if let Some(i) = axes.iter().find(|i| i.tree_label().is_none()) {
                    return Err(invalid(format!("index {i:?} is not a tree label")));
                }
                DenseNorm::Tree(m)
            }
        })
    }

    fn eval<I: Index>(&self, v: &[f64], axes: &[I]) -> Result<f64> {
        Ok(match self {
            DenseNorm::Lp(p) => lp_norm_slice(v.iter().copied(), *p),
            DenseNorm::Weighted(w) => v.iter().zip(w).map(|(x, w)| w * x.abs()).sum(),
            DenseNorm::Tree(m) => {
                let x = Vector::from_pairs(axes.iter().zip(v).map(|(i, x)| (i.tree_label().unwrap(), *x)));
                NormSpec::Tree { m: *m }.norm(&x)?
            }
        })
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `min_{λ ∈ Δ} ‖x − Σλ_i a_i‖`. Euclidean norms go through the quadratic
/// kernel; `ℓ1`, `ℓ∞` and the weighted `ℓ1` norm through a linear program.
pub fn dist_to_hull<I: Index>(x: &Vector<I>, a: &SampledSet<I>, norm: &NormSpec, tol: f64) -> Result<f64> {
    let (dense, _) = Dense::new(std::iter::once(x).chain(a.points()));
    let target = &dense.points[0];
    let pts = &dense.points[1..];
    match *norm {
        NormSpec::Lp(2.0) => {
            let scale = pts.iter().map(|q| lp_norm_slice(diff(q, target).into_iter(), 2.0)).fold(1.0f64, f64::max);
            let gap_tol = (tol * tol).max(1e-13) * scale * scale;
            let res = min_quadratic_over_simplex(pts, target, gap_tol)?;
            Ok(res.value.max(0.0).sqrt())
        }
        NormSpec::Lp(1.0) => hull_lp_l1(target, pts, &vec![1.0; target.len()], tol),
        NormSpec::Lp(p) if p.is_infinite() => hull_lp_linf(target, pts, tol),
        NormSpec::WeightedL1 { .. } => {
            let DenseNorm::Weighted(w) = DenseNorm::new(norm, &dense.axes)? else { unreachable!() };
            hull_lp_l1(target, pts, &w, tol)
        }
        NormSpec::Lp(p) => Err(Error::UnsupportedNorm(format!("hull distance in l{p}"))),
        NormSpec::Tree { .. } => Err(Error::UnsupportedNorm("hull distance in the tree norm".into())),
    }
}

/// Variables: λ (k), r⁺ (d), r⁻ (d). `Σλa + r⁺ − r⁻ = x`, `Σλ = 1`.
fn hull_lp_l1(x: &[f64], pts: &[Vec<f64>], w: &[f64], tol: f64) -> Result<f64> {
    let (k, d) = (pts.len(), x.len());
    let mut obj = vec![0.0; k + 2 * d];
    for j in 0..d {
        obj[k + j] = w[j];
        obj[k + d + j] = w[j];
    }
    let mut lp = LpInstance::new(Sense::Minimize, obj);
    for j in 0..d {
        let mut terms: Vec<(usize, f64)> = (0..k).map(|i| (i, pts[i][j])).filter(|t| t.1 != 0.0).collect();
        terms.push((k + j, 1.0));
        terms.push((k + d + j, -1.0));
        lp.constrain_sparse(&terms, Relation::Eq, x[j]);
    }
    lp.constrain_sparse(&(0..k).map(|i| (i, 1.0)).collect::<Vec<_>>(), Relation::Eq, 1.0);
    solved_value(lp_solve(&lp, tol)?)
}

/// Variables: λ (k), s. `±(x − Σλa)_j ≤ s`, `Σλ = 1`.
fn hull_lp_linf(x: &[f64], pts: &[Vec<f64>], tol: f64) -> Result<f64> {
    let (k, d) = (pts.len(), x.len());
    let mut obj = vec![0.0; k + 1];
    obj[k] = 1.0;
    let mut lp = LpInstance::new(Sense::Minimize, obj);
    for j in 0..d {
        let mut plus: Vec<(usize, f64)> = (0..k).map(|i| (i, pts[i][j])).collect();
        plus.push((k, 1.0));
        lp.constrain_sparse(&plus, Relation::Ge, x[j]);
        let mut minus: Vec<(usize, f64)> = (0..k).map(|i| (i, -pts[i][j])).collect();
        minus.push((k, 1.0));
        lp.constrain_sparse(&minus, Relation::Ge, -x[j]);
    }
    lp.constrain_sparse(&(0..k).map(|i| (i, 1.0)).collect::<Vec<_>>(), Relation::Eq, 1.0);
    solved_value(lp_solve(&lp, tol)?)
}

fn solved_value(sol: crate::optim::LpSolution) -> Result<f64> {
    match sol.status {
        LpStatus::Optimal => Ok(sol.value.max(0.0)),
        s => Err(Error::Numerical(format!("hull distance LP reported {s:?}"))),
    }
}

/// Distance from `x` to the nearest sampled point of `a` (not its hull).
pub fn dist_to_set<I: Index>(x: &Vector<I>, a: &SampledSet<I>, norm: &NormSpec) -> Result<f64> {
    let (dense, _) = Dense::new(std::iter::once(x).chain(a.points()));
    let dn = DenseNorm::new(norm, &dense.axes)?;
    let mut best = f64::INFINITY;
    for p in &dense.points[1..] {
        best = best.min(dn.eval(&diff(&dense.points[0], p), &dense.axes)?);
    }
    Ok(best)
}

/// Max over sampled pairs `x, y ∈ A` and `t = k/t_grid` of `d(tx+(1−t)y, A)`,
/// distances taken to the sample itself. A lower bound on the true supremum.
pub fn convexity_defect<I: Index>(a: &SampledSet<I>, norm: &NormSpec, t_grid: usize) -> Result<DefectReport> {
    if a.len() < 2 {
        return Err(invalid("convexity defect needs at least two points"));
    }
    if t_grid < 2 {
        return Err(invalid("t_grid must be at least 2"));
    }
    let (dense, _) = Dense::new(a.points());
    let dn = DenseNorm::new(norm, &dense.axes)?;
    let pts = &dense.points;
    let mut report = DefectReport { sup_defect: 0.0, witness: (0, 0, 0.0) };
    let mut mid = vec![0.0; dense.axes.len()];
    let mut buf = vec![0.0; dense.axes.len()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in 1..t_grid {
                let t = k as f64 / t_grid as f64;
                for (m, (x, y)) in mid.iter_mut().zip(pts[i].iter().zip(&pts[j])) {
                    *m = t * x + (1.0 - t) * y;
                }
                // early exit once some point is closer than the current record
                let mut nearest = f64::INFINITY;
                for q in pts {
                    for (b, (m, qv)) in buf.iter_mut().zip(mid.iter().zip(q)) {
                        *b = m - qv;
                    }
                    nearest = nearest.min(dn.eval(&buf, &dense.axes)?);
                    if nearest <= report.sup_defect {
                        break;
                    }
                }
                if nearest > report.sup_defect {
                    report = DefectReport { sup_defect: nearest, witness: (i, j, t) };
                }
            }
        }
    }
    Ok(report)
}

/// `max_w d(w, A)` over witnesses `w ∈ Co(A)`: a lower bound on `𝓗(A, Co(A))`.
///
/// Hull membership does not depend on the norm, so it is checked with the
/// Euclidean kernel for every norm.
pub fn hausdorff_lb<I: Index>(a: &SampledSet<I>, witnesses: &[Vector<I>], norm: &NormSpec) -> Result<f64> {
    hausdorff_lb_with_tol(a, witnesses, norm, HULL_MEMBERSHIP_TOL)
}

pub fn hausdorff_lb_with_tol<I: Index>(
    a: &SampledSet<I>,
    witnesses: &[Vector<I>],
    norm: &NormSpec,
    hull_tol: f64,
) -> Result<f64> {
    let mut best = 0.0f64;
    for w in witnesses {
        let membership = dist_to_hull(w, a, &NormSpec::Lp(2.0), hull_tol * 1e-2)?;
        if membership > hull_tol {
            return Err(Error::WitnessOutsideHull { distance: membership, tol: hull_tol });
        }
        best = best.max(dist_to_set(w, a, norm)?);
    }
    Ok(best)
}

/// Exact pairwise diameter of the sample.
pub fn diameter<I: Index>(a: &SampledSet<I>, norm: &NormSpec) -> Result<f64> {
    let (dense, _) = Dense::new(a.points());
    let dn = DenseNorm::new(norm, &dense.axes)?;
    let pts = &dense.points;
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(dn.eval(&diff(&pts[i], &pts[j]), &dense.axes)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::simplex_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(points: &[&[f64]]) -> SampledSet {
        SampledSet::new(points.iter().map(|p| Vector::dense(p)).collect(), "test").unwrap()
    }

    const TOL: f64 = 1e-9;

    #[test]
    fn member_has_zero_distance() {
        let a = set(&[&[1.0, 0.0], &[0.0, 1.0], &[2.0, 3.0]]);
        for norm in [NormSpec::Lp(1.0), NormSpec::Lp(2.0), NormSpec::Lp(f64::INFINITY)] {
            assert!(dist_to_hull(&Vector::dense(&[2.0, 3.0]), &a, &norm, TOL).unwrap() < 1e-12);
        }
    }

    #[test]
    fn origin_to_segment() {
        let a = set(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let x = Vector::dense(&[0.0, 0.0]);
        let l2 = dist_to_hull(&x, &a, &NormSpec::Lp(2.0), TOL).unwrap();
        assert!((l2 - 2f64.sqrt() / 2.0).abs() < 1e-12);
        // brute force over λ for ℓ1: ‖(λ, 1−λ)‖₁ = 1 everywhere on the segment
        let brute =
            (0..=1000).map(|k| k as f64 / 1000.0).map(|l| l.abs() + (1.0 - l).abs()).fold(f64::INFINITY, f64::min);
        let l1 = dist_to_hull(&x, &a, &NormSpec::Lp(1.0), TOL).unwrap();
        assert!((l1 - brute).abs() < 1e-12);
        assert!((l1 - 1.0).abs() < 1e-12);
        let linf = dist_to_hull(&x, &a, &NormSpec::Lp(f64::INFINITY), TOL).unwrap();
        assert!((linf - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unsupported_norms_rejected() {
        let a = set(&[&[1.0, 0.0]]);
        let x = Vector::dense(&[0.0, 0.0]);
        assert!(matches!(dist_to_hull(&x, &a, &NormSpec::Lp(3.0), TOL), Err(Error::UnsupportedNorm(_))));
        assert!(dist_to_hull(&x, &a, &NormSpec::WeightedL1 { leaf_weight: 2.0 }, TOL).is_err());
    }

    #[test]
    fn weighted_l1_hull_distance() {
        use crate::treespace::TreeLabel;
        let leaf = TreeLabel::leaf(1);
        let pair = TreeLabel::pair(TreeLabel::leaf(1), TreeLabel::leaf(2));
        let a = SampledSet::new(vec![Vector::basis(leaf), Vector::basis(pair)], "t").unwrap();
        // distance from 0: min over λ of 3λ + (1−λ) = 1 at λ = 0
        let d = dist_to_hull(&Vector::zero(), &a, &NormSpec::WeightedL1 { leaf_weight: 3.0 }, TOL).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_midpoint_defect() {
        let a = set(&[&[0.0], &[4.0]]);
        let r = convexity_defect(&a, &NormSpec::Lp(2.0), 3).unwrap();
        // t ∈ {1/3, 2/3} lands at distance 4/3; t_grid = 2 hits the midpoint
        assert!((r.sup_defect - 4.0 / 3.0).abs() < 1e-12);
        let r = convexity_defect(&a, &NormSpec::Lp(2.0), 2).unwrap();
        assert_eq!(r.sup_defect, 2.0);
        assert_eq!(r.witness.2, 0.5);
        let (i, j, t) = r.witness;
        let mid = a.points()[i].lerp(&a.points()[j], t);
        assert!((dist_to_set(&mid, &a, &NormSpec::Lp(2.0)).unwrap() - r.sup_defect).abs() < 1e-9);
    }

    #[test]
    fn dense_sample_of_convex_set_has_small_defect() {
        // all grid points of the triangle with vertices (0,0), (1,0), (0,1)
        let m = 10;
        let pts: Vec<Vector> = simplex_grid(3, m).iter().map(|p| Vector::dense(&p.coords()[..2])).collect();
        let a = SampledSet::new(pts, "triangle").unwrap();
        let r = convexity_defect(&a, &NormSpec::Lp(2.0), 4).unwrap();
        // every point of the triangle is within half a cell diagonal of the grid
        assert!(r.sup_defect <= (2f64).sqrt() / m as f64 + 1e-12);
    }

    #[test]
    fn defect_scales_linearly() {
        let a = set(&[&[0.0, 0.0], &[3.0, 1.0], &[1.0, 4.0], &[5.0, 5.0]]);
        let base = convexity_defect(&a, &NormSpec::Lp(2.0), 5).unwrap().sup_defect;
        let scaled = a.map(|v| v.scaled(0.25), "scaled");
        let s = convexity_defect(&scaled, &NormSpec::Lp(2.0), 5).unwrap().sup_defect;
        assert!((s - 0.25 * base).abs() < 1e-12);
    }

    #[test]
    fn defect_invariant_under_coordinate_permutation() {
        let a = set(&[&[0.0, 1.0, 2.0], &[3.0, 1.0, 0.0], &[1.0, 4.0, 1.0], &[2.0, 2.0, 5.0]]);
        let perm = a.map(|v| Vector::dense(&[v.get(&2), v.get(&0), v.get(&1)]), "perm");
        for p in [1.0, 2.0, 3.0, f64::INFINITY] {
            let d1 = convexity_defect(&a, &NormSpec::Lp(p), 4).unwrap().sup_defect;
            let d2 = convexity_defect(&perm, &NormSpec::Lp(p), 4).unwrap().sup_defect;
            assert!((d1 - d2).abs() < 1e-12);
        }
    }

    #[test]
    fn hausdorff_witness_examples() {
        let a = set(&[&[0.0], &[4.0]]);
        let norm = NormSpec::Lp(2.0);
        assert_eq!(hausdorff_lb(&a, &[Vector::dense(&[4.0])], &norm).unwrap(), 0.0);
        assert_eq!(hausdorff_lb(&a, &[Vector::dense(&[2.0])], &norm).unwrap(), 2.0);
        let outside = hausdorff_lb(&a, &[Vector::dense(&[5.0])], &norm);
        assert!(matches!(outside, Err(Error::WitnessOutsideHull { .. })));
    }

    /// Grid over λ ∈ Δ_{k−1} at mesh 1/m: an upper bound on the hull distance
    /// that converges as m grows.
    fn grid_hull_distance(x: &[f64], pts: &[Vec<f64>], p: f64, m: usize) -> f64 {
        simplex_grid(pts.len(), m)
            .iter()
            .map(|l| {
                let v: Vec<f64> = (0..x.len())
                    .map(|j| x[j] - (0..pts.len()).map(|i| l.coords()[i] * pts[i][j]).sum::<f64>())
                    .collect();
                lp_norm_slice(v.into_iter(), p)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn hull_distance_zero_iff_member_against_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for case in 0..60 {
            let d = rng.gen_range(1..=4);
            let k = rng.gen_range(1..=6);
            let pts: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            // half the cases: a convex combination (inside); the rest random
            let x: Vec<f64> = if case % 2 == 0 {
                let w = crate::optim::project_to_simplex(&(0..k).map(|_| rng.gen::<f64>()).collect::<Vec<_>>());
                (0..d).map(|j| (0..k).map(|i| w[i] * pts[i][j]).sum()).collect()
            } else {
                (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect()
            };
            let a = SampledSet::new(pts.iter().map(|p| Vector::dense(p)).collect(), "rand").unwrap();
            for p in [1.0, 2.0, f64::INFINITY] {
                let dist = dist_to_hull(&Vector::dense(&x), &a, &NormSpec::Lp(p), TOL).unwrap();
                let grid = grid_hull_distance(&x, &pts, p, if k <= 4 { 40 } else { 16 });
                assert!(dist <= grid + 1e-9, "p={p}: solver {dist} above grid {grid}");
                if case % 2 == 0 {
                    assert!(dist < 1e-7, "member reported at distance {dist}");
                } else if dist < 1e-7 {
                    // reported member: the fine grid must agree up to its mesh
                    assert!(grid < 0.2);
                }
            }
        }
    }

    #[test]
    fn hausdorff_lb_at_most_diameter() {
        let a = set(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        let w = vec![Vector::dense(&[2.0 / 3.0, 2.0 / 3.0]), Vector::dense(&[1.0, 1.0])];
        let h = hausdorff_lb(&a, &w, &NormSpec::Lp(2.0)).unwrap();
        let mut all = a.points().to_vec();
        all.extend(w.iter().cloned());
        let diam = diameter(&SampledSet::new(all, "u").unwrap(), &NormSpec::Lp(2.0)).unwrap();
        assert!(h <= diam);
        assert!((h - 2f64.sqrt()).abs() < 1e-12);
    }
}
