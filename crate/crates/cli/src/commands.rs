//! One function per subcommand. Each returns its echoed parameters, results
//! and the pass flag of the bound it reproduces.

use approxconvex::constructions::{
    euclid_witness_distance, euclid_witness_distance_numeric, extremal_m, general_bound, l1_bound, lowbound3,
    lp_distance_to_l1, measure_set, typep_bound, BoundReport, ConstructionSpec, DistanceMode,
};
use approxconvex::entropy::{affine_defect, kappa};
use approxconvex::entropy_opt::{critical_m_squared, i_eval, minimize_i, StepFunction};
use approxconvex::hulls::diameter;
use approxconvex::simplexgeo::{alpha, best_subset, near_face};
use approxconvex::treespace::{
    default_candidates, downward_closure, haus_experiment, jensen_defect, tree_norm, TreeVector,
};
use approxconvex::{NormSpec, SimplexPoint, TreeLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Cmd, Settings};

pub struct Outcome {
    pub params: Value,
    pub results: Value,
    pub pass: bool,
}

pub enum Failure {
    /// A violated precondition: exit code 1 with the message.
    Usage(String),
    /// The computation itself failed.
    Runtime(String),
}

impl From<approxconvex::Error> for Failure {
    fn from(e: approxconvex::Error) -> Self {
        use approxconvex::Error as E;
        match e {
            E::InvalidArgument(_)
            | E::DimensionMismatch { .. }
            | E::Hypothesis(_)
            | E::MissingLabel(_)
            | E::UnsupportedNorm(_)
            | E::WitnessOutsideHull { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Run = Result<Outcome, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn sweep(from: u64, to: Option<u64>) -> Result<std::ops::RangeInclusive<u64>, Failure> {
    let to = to.unwrap_or(from);
    if to < from {
        return Err(usage(format!("--to ({to}) must not be below --n ({from})")));
    }
    Ok(from..=to)
}

/// A single row stays an object; sweeps become arrays.
fn rows(mut v: Vec<Value>) -> Value {
    if v.len() == 1 {
        v.pop().unwrap()
    } else {
        Value::Array(v)
    }
}

pub fn run(cmd: &Cmd, s: &Settings) -> Run {
    match cmd {
        Cmd::Kappa { n, to } => run_kappa(*n, *to),
        Cmd::EntropyDefect { n, samples } => run_entropy_defect(*n, *samples, s),
        Cmd::EuclidSet { n, m, grid, numeric } => run_euclid_set(*n, *m, *grid, *numeric, s),
        Cmd::L1Bound { n, eps, to } => run_l1_bound(*n, *eps, *to),
        Cmd::GeneralBound { n, eps, d, p, to } => run_general_bound(*n, *eps, *d, *p, *to),
        Cmd::LpSet { n, p, m, grid, t_grid } => run_lp_set(*n, *p, *m, *grid, *t_grid, s),
        Cmd::SimplexFace { n, k, regular } => run_simplex_face(*n, *k, *regular, s),
        Cmd::BestSubset { n, j } => run_best_subset(*n, *j, s),
        Cmd::OptEntropy { n, m } => run_opt_entropy(*n, *m, s),
        Cmd::Lowbound3 { n, to } => run_lowbound3(*n, *to),
        Cmd::TypepBound { p, tp, d, diameter } => run_typep(*p, *tp, *d, *diameter),
        Cmd::TreeNorm { terms, m } => run_tree_norm(terms, *m, s),
        Cmd::TreeHaus { m, n } => run_tree_haus(*m, *n, s),
        Cmd::TreeJensen { b, c, m } => run_tree_jensen(b, c, *m, s),
    }
}

fn run_kappa(n: u64, to: Option<u64>) -> Run {
    let mut out = Vec::new();
    let mut pass = true;
    for n in sweep(n, to)? {
        let k = kappa(n)?;
        pass &= k.is_consistent();
        out.push(json!({
            "n": n, "lower": k.lower, "upper": k.upper, "formula": k.formula, "consistent": k.is_consistent(),
        }));
    }
    Ok(Outcome { params: json!({ "n": n, "to": to }), results: rows(out), pass })
}

fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize) -> SimplexPoint {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    SimplexPoint::project(&w.iter().map(|x| x / total).collect::<Vec<_>>())
}

fn run_entropy_defect(n: usize, samples: usize, s: &Settings) -> Run {
    if n < 2 {
        return Err(usage(format!("n must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut max = 0.0f64;
    for _ in 0..samples {
        let x = random_simplex_point(&mut rng, n);
        let y = random_simplex_point(&mut rng, n);
        max = max.max(affine_defect(&x, &y, rng.gen())?);
    }
    let at_vertices = affine_defect(&SimplexPoint::vertex(n, 0), &SimplexPoint::vertex(n, 1), 0.5)?;
    let pass = max <= 1.0 + 1e-12 && (at_vertices - 1.0).abs() <= 1e-12;
    Ok(Outcome {
        params: json!({ "n": n, "samples": samples, "seed": s.seed }),
        results: json!({ "max_defect": max, "defect_at_vertices": at_vertices, "bound": 1.0 }),
        pass,
    })
}

fn run_euclid_set(n: usize, m: Option<f64>, grid: Option<usize>, numeric: bool, s: &Settings) -> Run {
    let m = m.unwrap_or_else(|| extremal_m(n));
    let wd = if numeric { euclid_witness_distance_numeric(n, m, s.tol)? } else { euclid_witness_distance(n, m)? };
    let l = (n as f64).log2();
    let at_extremal_m = ((m - extremal_m(n)) / extremal_m(n)).abs() <= 1e-12;
    let mut results = json!({
        "M": m,
        "witness_distance": wd.value,
        "mode": match wd.mode { DistanceMode::Analytic => "analytic", DistanceMode::Numeric => "numeric" },
        "log2n": l,
        "g_min": wd.g_min,
    });
    let mut pass = !at_extremal_m || (wd.value - l).abs() <= if numeric { 1e-3 } else { 1e-6 };
    if let Some(grid) = grid {
        let spec = ConstructionSpec::new(NormSpec::Lp(2.0), n, m, grid)?;
        let set = approxconvex::constructions::build_entropy_set(&spec)?;
        let d = diameter(&set, &NormSpec::Lp(2.0))?;
        // any two points differ by at most √2·M horizontally and log₂n in height
        let bound = 2f64.sqrt() * m + l;
        pass &= d <= bound + s.tol;
        results["points"] = json!(set.len());
        results["diameter"] = json!(d);
        results["diameter_bound"] = json!(bound);
    }
    Ok(Outcome { params: json!({ "n": n, "M": m, "grid": grid, "numeric": numeric }), results, pass })
}

fn bound_row(n: usize, eps: f64, r: &BoundReport) -> Value {
    json!({
        "n": n, "eps": eps, "M": r.m_used, "hausdorff_lb": r.hausdorff_lb, "diam_ub": r.diam_ub,
        "valid": r.valid, "consistent": r.is_consistent(),
    })
}

fn run_l1_bound(n: usize, eps: f64, to: Option<u64>) -> Run {
    let mut out = Vec::new();
    let mut pass = true;
    for n in sweep(n as u64, to)? {
        let r = l1_bound(n as usize, eps)?;
        pass &= r.is_consistent();
        out.push(bound_row(n as usize, eps, &r));
    }
    Ok(Outcome { params: json!({ "n": n, "eps": eps, "to": to }), results: rows(out), pass })
}

fn run_general_bound(n: usize, eps: f64, d: Option<f64>, p: Option<f64>, to: Option<u64>) -> Run {
    let mut out = Vec::new();
    let mut pass = true;
    for n in sweep(n as u64, to)? {
        let n = n as usize;
        let dist = match (d, p) {
            (Some(_), Some(_)) => return Err(usage("give at most one of --d and --p")),
            (Some(d), None) => d,
            (None, Some(p)) => lp_distance_to_l1(n, p)?,
            (None, None) => 1.0,
        };
        let r = general_bound(n, eps, dist)?;
        pass &= r.is_consistent();
        let mut row = bound_row(n, eps, &r);
        row["dist_to_l1"] = json!(dist);
        out.push(row);
    }
    Ok(Outcome { params: json!({ "n": n, "eps": eps, "d": d, "p": p, "to": to }), results: rows(out), pass })
}

fn run_lp_set(n: usize, p: f64, m: Option<f64>, grid: usize, t_grid: usize, s: &Settings) -> Run {
    let m = m.unwrap_or_else(|| extremal_m(n));
    let spec = ConstructionSpec::new(NormSpec::Lp(p), n, m, grid)?;
    let r = measure_set(&spec, t_grid)?;
    let pass = r.defect.is_none_or(|d| d <= r.defect_bound + s.tol);
    Ok(Outcome {
        params: json!({ "n": n, "p": p, "M": m, "grid": grid, "t_grid": t_grid }),
        results: json!({
            "points": r.points, "witness_distance": r.witness_distance, "diameter": r.diameter,
            "defect": r.defect, "defect_bound": r.defect_bound,
        }),
        pass,
    })
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / r).collect()
}

fn run_simplex_face(n: usize, k: usize, regular: bool, s: &Settings) -> Run {
    if n < 1 {
        return Err(usage("n must be at least 1"));
    }
    let a = alpha(n, k)?;
    let pts: Vec<Vec<f64>> = if regular {
        let c = 1.0 / (n + 1) as f64;
        (0..=n).map(|i| unit((0..=n).map(|j| if i == j { 1.0 - c } else { -c }).collect())).collect()
    } else {
        // rejection-sample unit vectors until the origin is interior
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        loop {
            let pts: Vec<Vec<f64>> =
                (0..=n).map(|_| unit((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())).collect();
            if near_face(&pts, 0).is_ok() {
                break pts;
            }
        }
    };
    let f = near_face(&pts, k)?;
    let mut pass = f.distance <= a + s.tol;
    if regular {
        pass &= (f.distance - a).abs() <= s.tol;
    }
    Ok(Outcome {
        params: json!({ "n": n, "k": k, "regular": regular, "seed": s.seed }),
        results: json!({ "vertices": f.vertices, "distance": f.distance, "alpha": a, "levels": f.trace.len() }),
        pass,
    })
}

fn run_best_subset(n: usize, j: usize, s: &Settings) -> Run {
    if n < 1 {
        return Err(usage("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    // random points, shifted so a random convex combination is the origin,
    // then scaled into the unit ball
    let raw: Vec<Vec<f64>> = (0..=n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let w = random_simplex_point(&mut rng, n + 1);
    let c: Vec<f64> = (0..n).map(|r| (0..=n).map(|i| w.coords()[i] * raw[i][r]).sum()).collect();
    let shifted: Vec<Vec<f64>> = raw.iter().map(|p| p.iter().zip(&c).map(|(a, b)| a - b).collect()).collect();
    let scale = shifted.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let pts: Vec<Vec<f64>> = shifted.iter().map(|p| p.iter().map(|x| x / scale).collect()).collect();
    let f = best_subset(&pts, j)?;
    let slack = if f.jittered { 1e-7 } else { s.tol };
    Ok(Outcome {
        params: json!({ "n": n, "j": j, "seed": s.seed }),
        results: json!({ "vertices": f.vertices, "distance": f.distance, "bound": f.bound, "jittered": f.jittered }),
        pass: f.distance <= f.bound + slack,
    })
}

fn run_opt_entropy(n: u64, m: Option<f64>, s: &Settings) -> Run {
    let at_extremal_m = m.is_none();
    let m = m.unwrap_or_else(|| critical_m_squared(n).sqrt());
    let r = minimize_i(n, m, s.tol.max(1e-12))?;
    let uniform = i_eval(&StepFunction::uniform(n)?, m);
    let is_uniform = r.x == 0.0 && (r.k - 1.0 / n as f64).abs() <= 1e-6;
    let pass = if at_extremal_m { is_uniform && (r.value - uniform).abs() <= 1e-9 } else { r.value <= uniform + s.tol };
    Ok(Outcome {
        params: json!({ "n": n, "M": m }),
        results: json!({
            "k": r.k, "x": r.x, "value": r.value, "pieces": r.y.pieces(),
            "uniform_value": uniform, "minimiser_is_uniform": is_uniform,
        }),
        pass,
    })
}

fn run_lowbound3(n: u64, to: Option<u64>) -> Run {
    let mut out = Vec::new();
    let mut pass = true;
    for n in sweep(n, to)? {
        let r = lowbound3(n)?;
        if n >= 20 {
            pass &= r.ratio >= 0.7525;
        }
        out.push(json!({ "n": n, "best_j": r.best_j, "ratio": r.ratio, "bound": r.bound }));
    }
    Ok(Outcome { params: json!({ "n": n, "to": to }), results: rows(out), pass })
}

fn run_typep(p: f64, tp: f64, d: f64, measured: Option<f64>) -> Run {
    let b = typep_bound(p, tp, d)?;
    Ok(Outcome {
        params: json!({ "p": p, "tp": tp, "d": d, "diameter": measured }),
        results: json!({ "bound": b }),
        pass: measured.is_none_or(|dm| dm >= b),
    })
}

fn parse_terms(terms: &[String]) -> Result<TreeVector, Failure> {
    let mut x = TreeVector::zero();
    for t in terms {
        let (label, coef) = t.rsplit_once('=').ok_or_else(|| usage(format!("term {t:?} is not LABEL=COEF")))?;
        let a: TreeLabel = label.parse()?;
        let c: f64 = coef.trim().parse().map_err(|_| usage(format!("bad coefficient in {t:?}")))?;
        x.add_at(a, c);
    }
    Ok(x)
}

fn run_tree_norm(terms: &[String], m: f64, s: &Settings) -> Run {
    let x = parse_terms(terms)?;
    let r = tree_norm(&x, m, s.tol.max(1e-10))?;
    let l1: f64 = x.iter().map(|(_, v)| v.abs()).sum();
    let gap = r.primal - r.dual;
    let sandwich = 0.5 * l1 <= r.primal + s.tol && r.primal <= m * l1 + s.tol;
    Ok(Outcome {
        params: json!({ "terms": terms, "M": m }),
        results: json!({
            "primal": r.primal, "dual": r.dual, "gap": gap, "l1": l1,
            "closure": downward_closure(x.support()).len(), "sandwich": sandwich,
        }),
        pass: gap.abs() <= 1e-7 && sandwich,
    })
}

fn run_tree_haus(m: u32, n: u64, s: &Settings) -> Run {
    let r = haus_experiment(m, n, &default_candidates(n))?;
    let values: Vec<Value> = r.values.iter().map(|(a, v)| json!({ "label": a.to_string(), "value": v })).collect();
    Ok(Outcome {
        params: json!({ "M": m, "N": n }),
        results: json!({
            "value": r.value, "bound": r.bound, "limit": 2.0 * m as f64,
            "certified": true, "candidates": values,
        }),
        pass: r.value >= r.bound - s.tol,
    })
}

fn run_tree_jensen(b: &str, c: &str, m: f64, s: &Settings) -> Run {
    let (lb, lc): (TreeLabel, TreeLabel) = (b.parse()?, c.parse()?);
    let d = jensen_defect(lb, lc, m)?;
    Ok(Outcome {
        params: json!({ "b": lb.to_string(), "c": lc.to_string(), "M": m }),
        results: json!({ "defect": d, "bound": 1.0 }),
        pass: d <= 1.0 + s.tol,
    })
}
