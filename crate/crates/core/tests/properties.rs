use approxconvex::entropy::{affine_defect, entropy, kappa, phi};
use approxconvex::entropy_opt::{critical_m_squared, i_eval, minimize_i, StepFunction};
use approxconvex::hulls::{convexity_defect, dist_to_hull, dist_to_set, SampledSet};
use approxconvex::optim::{lp_solve, LpInstance, Relation, Sense};
use approxconvex::optim::{min_quadratic_over_simplex, project_to_simplex};
use approxconvex::simplexgeo::{alpha, near_face};
use approxconvex::treespace::{apply_s, apply_s_inv, jensen_defect, tree_norm, TreeVector};
use approxconvex::{NormSpec, SimplexPoint, TreeLabel, Vector};
use proptest::prelude::*;

fn simplex_point(n: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("zero mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-9).then(|| SimplexPoint::new(w.iter().map(|x| x / s).collect()).ok()).flatten()
    })
}

fn label(max_level: u32) -> impl Strategy<Value = TreeLabel> {
    let leaf = (1u64..6).prop_map(TreeLabel::leaf);
    leaf.prop_recursive(max_level, 64, 2, |inner| (inner.clone(), inner).prop_map(|(b, c)| TreeLabel::pair(b, c)))
}

fn tree_vector() -> impl Strategy<Value = TreeVector> {
    prop::collection::vec((label(3), -2.0f64..2.0), 1..5).prop_map(Vector::from_pairs)
}

/// Random feasible step function with at most 8 pieces on `[0, n]`.
fn step_function(n: u64) -> impl Strategy<Value = StepFunction> {
    (prop::collection::vec(0.01f64..1.0, 1..=8), prop::collection::vec(0.0f64..1.0, 1..=8)).prop_filter_map(
        "value above 1 after normalisation",
        move |(lens, vals)| {
            let k = lens.len().min(vals.len());
            let total: f64 = lens[..k].iter().sum();
            let lens: Vec<f64> = lens[..k].iter().map(|l| l * n as f64 / total).collect();
            let mass: f64 = lens.iter().zip(&vals).map(|(l, v)| l * v).sum();
            if mass <= 1e-9 {
                return None;
            }
            let pieces: Vec<(f64, f64)> = lens.iter().zip(&vals).map(|(&l, &v)| (l, v / mass)).collect();
            StepFunction::new(pieces, n as f64).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_is_concave_and_bounded(s in 0.0f64..=1.0, t in 0.0f64..=1.0, l in 0.0f64..=1.0) {
        let mid = phi(l * s + (1.0 - l) * t).unwrap();
        prop_assert!(mid >= l * phi(s).unwrap() + (1.0 - l) * phi(t).unwrap() - 1e-15);
        prop_assert!((0.0..=1.0 / (std::f64::consts::E * std::f64::consts::LN_2) + 1e-15).contains(&phi(s).unwrap()));
    }

    #[test]
    fn entropy_between_zero_and_log_n((x, y) in (2usize..12).prop_flat_map(|n| (simplex_point(n), simplex_point(n))), t in 0.0f64..=1.0) {
        let n = x.dim() as f64;
        prop_assert!(entropy(&x) >= -1e-15 && entropy(&x) <= n.log2() + 1e-12);
        prop_assert!(affine_defect(&x, &y, t).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn kappa_between_its_bounds(n in 1u64..(1 << 40)) {
        let k = kappa(n).unwrap();
        prop_assert!(k.is_consistent());
    }

    #[test]
    fn projection_lands_on_simplex_and_is_idempotent(v in prop::collection::vec(-5.0f64..5.0, 1..20)) {
        let p = project_to_simplex(&v);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let q = project_to_simplex(&p);
        prop_assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn frank_wolfe_beats_every_vertex(
        cols in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 2..8),
        c in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let r = min_quadratic_over_simplex(&cols, &c, 1e-12).unwrap();
        for col in &cols {
            let v: f64 = col.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
            prop_assert!(r.value <= v + 1e-9);
        }
    }

    #[test]
    fn lp_primal_and_dual_agree(
        a in prop::collection::vec(prop::collection::vec(0.1f64..2.0, 3), 1..5),
        b in prop::collection::vec(0.5f64..4.0, 5),
        c in prop::collection::vec(0.0f64..3.0, 3),
    ) {
        let mut lp = LpInstance::new(Sense::Maximize, c.clone());
        for (row, rhs) in a.iter().zip(&b) {
            lp.constrain(row.clone(), Relation::Le, *rhs);
        }
        let s = lp_solve(&lp, 1e-10).unwrap();
        prop_assert!(s.is_optimal());
        prop_assert!((s.value - s.dual_value).abs() < 1e-8 * s.value.abs().max(1.0));
        for (row, rhs) in a.iter().zip(&b) {
            let lhs: f64 = row.iter().zip(&s.point).map(|(x, y)| x * y).sum();
            prop_assert!(lhs <= rhs + 1e-9);
        }
        prop_assert!(s.duals.iter().all(|&y| y >= -1e-9));
    }

    #[test]
    fn hull_distance_is_below_set_distance(
        pts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 1..6),
        x in prop::collection::vec(-3.0f64..3.0, 3),
        p in prop::sample::select(vec![1.0, 2.0, f64::INFINITY]),
    ) {
        let set = SampledSet::new(pts.iter().map(|v| Vector::dense(v)).collect(), "random").unwrap();
        let xv = Vector::dense(&x);
        let norm = NormSpec::Lp(p);
        let h = dist_to_hull(&xv, &set, &norm, 1e-9).unwrap();
        let s = dist_to_set(&xv, &set, &norm).unwrap();
        prop_assert!(h >= -1e-12 && h <= s + 1e-9);
        // the hull contains the centroid
        let c = set.points().iter().fold(Vector::zero(), |acc, v| acc.add(v)).scaled(1.0 / set.len() as f64);
        prop_assert!(dist_to_hull(&c, &set, &norm, 1e-9).unwrap() <= 1e-6);
    }

    #[test]
    fn defect_of_convex_samples_is_small(pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..5)) {
        // a finite set is never convex, but the defect is bounded by its diameter
        let set = SampledSet::new(pts.iter().map(|v| Vector::dense(v)).collect(), "random").unwrap();
        let d = convexity_defect(&set, &NormSpec::Lp(2.0), 4).unwrap();
        let diam = approxconvex::hulls::diameter(&set, &NormSpec::Lp(2.0)).unwrap();
        prop_assert!(d.sup_defect >= 0.0 && d.sup_defect <= diam / 2.0 + 1e-9);
    }

    #[test]
    fn s_inverse_inverts_s(x in tree_vector()) {
        let back = apply_s(&apply_s_inv(&x)).sub(&x);
        prop_assert!(back.iter().all(|(_, v)| v.abs() < 1e-12));
    }

    #[test]
    fn tree_norm_sandwich(x in tree_vector(), m in 1u32..=3) {
        let m = m as f64;
        let r = tree_norm(&x, m, 1e-8).unwrap();
        let l1: f64 = x.iter().map(|(_, v)| v.abs()).sum();
        prop_assert!((r.primal - r.dual).abs() <= 1e-7 * r.primal.max(1.0));
        prop_assert!(r.primal >= 0.5 * l1 - 1e-9 && r.primal <= m * l1 + 1e-9);
    }

    #[test]
    fn jensen_defect_at_most_one(b in label(4), c in label(4), m in 1u32..=3) {
        prop_assert!(jensen_defect(b, c, m as f64).unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn uniform_step_minimises_at_critical_m(
        (n, y) in prop::sample::select(vec![4u64, 8, 16]).prop_flat_map(|n| (Just(n), step_function(n)))
    ) {
        let m = critical_m_squared(n).sqrt();
        let u = StepFunction::uniform(n).unwrap();
        prop_assert!(i_eval(&y, m) >= i_eval(&u, m) - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn near_face_respects_alpha(n in 2usize..=5, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // random unit vectors with positive barycentric weights summing to zero
        let w: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let mut verts: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut last = vec![0.0; n];
        for (v, wi) in verts.iter().zip(&w) {
            for (l, x) in last.iter_mut().zip(v) {
                *l -= wi * x / w[n];
            }
        }
        verts.push(last);
        for v in verts.iter_mut() {
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= r);
        }
        for k in 0..n {
            match near_face(&verts, k) {
                Ok(f) => prop_assert!(f.distance <= alpha(n, k).unwrap() + 1e-9),
                // normalising can move the origin out of a thin simplex
                Err(approxconvex::Error::Hypothesis(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn exclusion_regime_puts_no_mass_at_one(n in 4u64..=64, s in 0.0f64..=1.0) {
        let lo = 5.0 * n as f64;
        let hi = critical_m_squared(n);
        let m = (lo + s * (hi - lo)).max(lo * (1.0 + 1e-9)).sqrt();
        let r = minimize_i(n, m, 1e-9).unwrap();
        prop_assert!(r.y.length_at_one() == 0.0, "n={n} M²={} x={}", m * m, r.x);
    }
}
