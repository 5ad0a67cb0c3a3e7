//! End-to-end acceptance checks. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed; exits non-zero on any FAIL.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use approxconvex::constructions::{
    big_f, build_entropy_set, euclid_witness_distance, euclid_witness_distance_numeric, extremal_m, general_bound,
    l1_bound, lowbound3, lp_distance_to_l1, typep_bound, ConstructionSpec, DistanceMode, ALPHA0,
};
use approxconvex::entropy::{affine_defect, kappa};
use approxconvex::entropy_opt::{i_eval, minimize_i, StepFunction};
use approxconvex::hulls::{diameter, dist_to_hull, SampledSet};
use approxconvex::optim::project_to_simplex;
use approxconvex::simplexgeo::{alpha, best_subset, near_face};
use approxconvex::treespace::{downward_closure, haus_experiment, jensen_defect, tree_norm, TreeVector};
use approxconvex::{NormSpec, SimplexPoint, TreeLabel, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type Criterion = (&'static str, Duration, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize) -> SimplexPoint {
    // exponential spacings give the uniform distribution on the simplex
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    SimplexPoint::new(w.into_iter().map(|x| x / s).collect()).unwrap()
}

fn kappa_table() -> Check {
    for n in 1..=(1u64 << 20) {
        let k = ok(kappa(n))?;
        ensure!(k.lower <= k.formula && k.formula <= k.upper, "n={n}: {k:?}");
    }
    ensure!(ok(kappa(1))?.formula == 1.0, "kappa(1) != 1");
    ensure!((ok(kappa(2))?.formula - 5.0 / 3.0).abs() <= 1e-12, "kappa(2) != 5/3");
    for k in 1..=20u32 {
        let v = ok(kappa((1u64 << k) - 1))?.formula;
        ensure!(v == k as f64, "kappa(2^{k}-1) = {v}");
    }
    Ok(())
}

fn approximate_affineness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..100_000 {
        let n = 2 + i % 9;
        let x = random_simplex_point(&mut rng, n);
        let y = random_simplex_point(&mut rng, n);
        let t = rng.gen::<f64>();
        let d = ok(affine_defect(&x, &y, t))?;
        ensure!(d <= 1.0 + 1e-12, "defect {d} at n={n}");
    }
    let d = ok(affine_defect(&SimplexPoint::vertex(2, 0), &SimplexPoint::vertex(2, 1), 0.5))?;
    ensure!((d - 1.0).abs() <= 1e-12, "defect at (e1, e2, 1/2) = {d}");
    Ok(())
}

fn euclidean_extremal_set() -> Check {
    for (n, grid) in [(4usize, 6usize), (8, 3), (16, 2)] {
        let m = extremal_m(n);
        let l = (n as f64).log2();
        let a = ok(euclid_witness_distance(n, m))?;
        ensure!(a.mode == DistanceMode::Analytic, "n={n}: analytic mode not selected");
        ensure!((a.value - l).abs() <= 1e-6, "n={n}: analytic {} vs log2 n {l}", a.value);
        let num = ok(euclid_witness_distance_numeric(n, m, 1e-10))?;
        ensure!((num.value - a.value).abs() <= 1e-3, "n={n}: numeric {} vs analytic {}", num.value, a.value);
        let spec = ok(ConstructionSpec::new(NormSpec::Lp(2.0), n, m, grid))?;
        let set = ok(build_entropy_set(&spec))?;
        let d = ok(diameter(&set, &NormSpec::Lp(2.0)))?;
        let nl = n as f64 * l;
        let bound = 2.0 / std::f64::consts::LN_2.sqrt() * nl.sqrt() + l;
        ensure!(d <= bound + 1e-9, "n={n}: diameter {d} > {bound}");
    }
    Ok(())
}

fn variational_problem() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [4u64, 8, 16] {
        let nf = n as f64;
        let m = extremal_m(n as usize);
        let r = ok(minimize_i(n, m, 1e-10))?;
        let u = ok(StepFunction::uniform(n))?;
        ensure!((r.k - 1.0 / nf).abs() <= 1e-6 && r.x == 0.0, "n={n}: minimiser k={} x={}", r.k, r.x);
        let direct = m * m / nf + nf.log2().powi(2);
        ensure!((i_eval(&u, m) - direct).abs() <= 1e-9, "n={n}: I(uniform) != M²/n + log²n");
        ensure!((r.value - direct).abs() <= 1e-9, "n={n}: minimum {} vs {direct}", r.value);
        let mut tried = 0;
        while tried < 1000 {
            let pieces = rng.gen_range(1..=8);
            let lens: Vec<f64> = (0..pieces).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = lens.iter().sum();
            let vals: Vec<f64> = (0..pieces).map(|_| rng.gen::<f64>()).collect();
            let lens: Vec<f64> = lens.iter().map(|l| l * nf / total).collect();
            let mass: f64 = lens.iter().zip(&vals).map(|(l, v)| l * v).sum();
            let steps: Vec<(f64, f64)> = lens.iter().zip(&vals).map(|(&l, &v)| (l, v / mass)).collect();
            let Ok(y) = StepFunction::new(steps, nf) else { continue };
            tried += 1;
            ensure!(i_eval(&y, m) >= direct - 1e-9, "n={n}: {:?} beats the uniform step", y.pieces());
        }
    }
    Ok(())
}

fn subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == j)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn origin_distance(points: &[Vec<f64>]) -> Result<f64, String> {
    let set = ok(SampledSet::new(points.iter().map(|p| Vector::dense(p)).collect(), "subset"))?;
    ok(dist_to_hull(&Vector::zero(), &set, &NormSpec::Lp(2.0), 1e-12))
}

fn simplex_geometry() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=6usize {
        let mut done = 0;
        while done < 500 {
            let pts: Vec<Vec<f64>> = (0..=n)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let r = norm(&v);
                    v.into_iter().map(|x| x / r).collect()
                })
                .collect();
            let mut faces = Vec::with_capacity(n);
            let mut interior = true;
            for k in 0..n {
                match near_face(&pts, k) {
                    Ok(f) => faces.push(f),
                    Err(approxconvex::Error::Hypothesis(_)) | Err(approxconvex::Error::InvalidArgument(_)) => {
                        interior = false;
                        break;
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
            if !interior {
                continue;
            }
            done += 1;
            for (k, f) in faces.iter().enumerate() {
                let a = ok(alpha(n, k))?;
                ensure!(f.distance <= a + 1e-9, "n={n} k={k}: {} > alpha {a}", f.distance);
            }
        }
        // regular simplex: e_i − centroid in ℝ^{n+1}
        let c = 1.0 / (n + 1) as f64;
        let reg: Vec<Vec<f64>> = (0..=n)
            .map(|i| {
                let v: Vec<f64> = (0..=n).map(|j| if i == j { 1.0 - c } else { -c }).collect();
                let r = norm(&v);
                v.into_iter().map(|x| x / r).collect()
            })
            .collect();
        for k in 0..n {
            let f = ok(near_face(&reg, k))?;
            let a = ok(alpha(n, k))?;
            ensure!((f.distance - a).abs() <= 1e-9, "regular n={n} k={k}: {} vs {a}", f.distance);
        }
    }
    for n in 1..=5usize {
        for _ in 0..40 {
            let raw: Vec<Vec<f64>> = (0..=n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let w = project_to_simplex(&(0..=n).map(|_| rng.gen::<f64>()).collect::<Vec<_>>());
            let c: Vec<f64> = (0..n).map(|r| (0..=n).map(|i| w[i] * raw[i][r]).sum()).collect();
            let shifted: Vec<Vec<f64>> = raw.iter().map(|p| p.iter().zip(&c).map(|(a, b)| a - b).collect()).collect();
            let s = shifted.iter().map(|p| norm(p)).fold(0.0, f64::max);
            let pts: Vec<Vec<f64>> = shifted.iter().map(|p| p.iter().map(|x| x / s).collect()).collect();
            for j in 1..=n {
                let bound = (((n + 1 - j) as f64) / ((n * j) as f64)).sqrt();
                let mut brute = f64::INFINITY;
                for sub in subsets(n + 1, j) {
                    let face: Vec<Vec<f64>> = sub.iter().map(|&i| pts[i].clone()).collect();
                    brute = brute.min(origin_distance(&face)?);
                }
                ensure!(brute <= bound + 1e-9, "n={n} j={j}: best subset at {brute} > {bound}");
                let f = ok(best_subset(&pts, j))?;
                let tol = if f.jittered { 1e-7 } else { 1e-9 };
                ensure!(f.distance <= bound + tol, "n={n} j={j}: best_subset {} > {bound}", f.distance);
                ensure!(f.distance >= brute - 1e-9, "n={n} j={j}: best_subset below the exhaustive minimum");
            }
        }
    }
    Ok(())
}

fn diameter_lower_bound() -> Check {
    for n in 20..=10_000u64 {
        let r = ok(lowbound3(n))?.ratio;
        ensure!(r >= 0.7525, "n={n}: max_j f = {r}");
    }
    for i in 0..=900 {
        let n = (1e6 * 10f64.powf(i as f64 / 100.0)) as u64;
        let r = ok(lowbound3(n))?.ratio;
        ensure!(r >= 0.768, "n={n}: max_j f = {r}");
    }
    // the displayed constant, compared verbatim
    let f = big_f(ALPHA0);
    ensure!(f >= 0.76811996, "F({ALPHA0}) = {f:.12} < 0.76811996 (displayed constant not met)");
    Ok(())
}

fn l1_and_general_bounds() -> Check {
    let r = ok(l1_bound(1024, 1.0))?;
    ensure!(r.m_used == 40.0 && r.hausdorff_lb == 9.0 && r.diam_ub == 90.0, "l1_bound(1024, 1) = {r:?}");
    ensure!(r.valid, "l1_bound(1024, 1) flagged invalid");
    ensure!(l1_bound(1024, 2.0).is_err(), "l1_bound accepted eps = 2 outside (0, 2)");
    for n in 2..=(1usize << 16) {
        for eps in [0.5, 1.0, 2.0] {
            if eps < 2.0 {
                let r = ok(l1_bound(n, eps))?;
                ensure!(r.is_consistent(), "l1 n={n} eps={eps}: {r:?}");
            }
            for d in [1.0, ok(lp_distance_to_l1(n, 2.0))?] {
                let r = ok(general_bound(n, eps, d))?;
                ensure!(r.is_consistent(), "general n={n} eps={eps} d={d}: {r:?}");
            }
        }
    }
    Ok(())
}

fn random_label(rng: &mut ChaCha8Rng, level: u32, leaves: u64) -> TreeLabel {
    if level == 1 {
        return TreeLabel::leaf(rng.gen_range(1..=leaves));
    }
    let left = rng.gen_range(1..level);
    let b = random_label(rng, left, leaves);
    TreeLabel::pair(b, random_label(rng, level - left, leaves))
}

fn tree_duality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut done = 0;
    let mut largest = 0;
    while done < 200 {
        let terms = rng.gen_range(1..=80);
        let max_level = rng.gen_range(2..=24);
        let leaves = rng.gen_range(2..=20);
        let mut x = TreeVector::zero();
        for _ in 0..terms {
            let lvl = rng.gen_range(1..=max_level);
            x.add_at(random_label(&mut rng, lvl, leaves), rng.gen_range(-2.0..2.0));
        }
        let closure = downward_closure(x.support()).len();
        if x.is_zero() || closure > 500 {
            continue;
        }
        largest = largest.max(closure);
        let m = (1 + done % 3) as f64;
        done += 1;
        let r = ok(tree_norm(&x, m, 1e-8))?;
        ensure!((r.primal - r.dual).abs() <= 1e-7, "gap {} at closure {closure}", r.primal - r.dual);
        let l1: f64 = x.iter().map(|(_, v)| v.abs()).sum();
        ensure!(0.5 * l1 <= r.primal + 1e-9 && r.primal <= m * l1 + 1e-9, "sandwich fails: {} vs l1 {l1}", r.primal);
    }
    ensure!(largest > 300, "random closures too small to be representative ({largest})");
    Ok(())
}

fn worst_possible_set() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let (lb, lc) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let b = random_label(&mut rng, lb, 6);
        let c = random_label(&mut rng, lc, 6);
        let d = ok(jensen_defect(b, c, 2.0))?;
        ensure!(d <= 1.0 + 1e-9, "jensen defect {d} for {b}, {c}");
    }
    let mut last = f64::NEG_INFINITY;
    for n in [32u64, 64, 128, 256, 512] {
        let r = ok(haus_experiment(2, n, &[]))?;
        ensure!(r.value >= 4.0 - 64.0 / n as f64 - 1e-9, "N={n}: {} < {}", r.value, 4.0 - 64.0 / n as f64);
        ensure!(r.value > last && r.value <= 4.0 + 1e-9, "N={n}: sequence not increasing toward 4");
        last = r.value;
    }
    Ok(())
}

fn type_p_evaluator() -> Check {
    let v = ok(typep_bound(2.0, 1.0, 2.0))?;
    ensure!((v - 0.5f64.sqrt() / 2.0).abs() <= 1e-9, "typep_bound(2, 1, 2) = {v}");
    ensure!(typep_bound(2.0, 1.0, 1.5).is_err(), "d < 2 accepted");
    let n = 16;
    let spec = ok(ConstructionSpec::new(NormSpec::Lp(2.0), n, extremal_m(n), 2))?;
    let set = ok(build_entropy_set(&spec))?;
    let d = ok(diameter(&set, &NormSpec::Lp(2.0)))?;
    let b = ok(typep_bound(2.0, 1.0, 4.0))?;
    ensure!(d >= b, "measured diameter {d} < type-2 bound {b}");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("kappa table", Duration::from_secs(1), kappa_table),
        ("approximate affineness of entropy", Duration::from_secs(5), approximate_affineness),
        ("Euclidean extremal set", Duration::from_secs(30), euclidean_extremal_set),
        ("variational problem", Duration::from_secs(10), variational_problem),
        ("simplex geometry", Duration::from_secs(60), simplex_geometry),
        ("diameter lower bound", Duration::from_secs(5), diameter_lower_bound),
        ("l1 and general bounds", Duration::from_secs(1), l1_and_general_bounds),
        ("tree space duality", Duration::from_secs(120), tree_duality),
        ("worst-possible set", Duration::from_secs(120), worst_possible_set),
        ("type-p evaluator", Duration::from_secs(1), type_p_evaluator),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            if elapsed <= *limit {
                Ok(())
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
