//! End-to-end acceptance checks. Runs without the test harness so that the
//! PASS/FAIL line of every criterion is always printed.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};

use hypergeo::development::{canonical_sequence, develop, GeodesicClass};
use hypergeo::euclid::{check_midpoint_lemma, midline, quarter_symmetry, survey_pairs, trace, Q};
use hypergeo::hyperbolic::classify;
use hypergeo::solver::{
    check_theorem1_with_tol, check_theorem2, construct_midpoint, max_t_deviation, perturbation_uniqueness,
    solve_class, ClosedGeodesic, Verdict,
};
use hypergeo::tetra::{edge_length, TetraMetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

fn solved(class: GeodesicClass, alpha: f64) -> Result<ClosedGeodesic, String> {
    let m = TetraMetric::new(alpha).map_err(|e| e.to_string())?;
    solve_class(&canonical_sequence(class), &m)
        .map_err(|e| e.to_string())?
        .closed()
        .ok_or_else(|| format!("{class} not realizable at {alpha}"))
}

fn hypergeo(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_hypergeo"))
        .args(args)
        .env_remove("HYPERGEO_TOL")
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn hypergeo_json(args: &[&str]) -> Result<Value, String> {
    let (out, code) = hypergeo(args);
    if code != 0 {
        return Err(format!("`hypergeo {}` exited with {code}", args.join(" ")));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn edge_length_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.gen_range(0.01..PI / 3.0 - 0.01);
        let a = edge_length(alpha).map_err(|e| e.to_string())?;
        let c = alpha.cos();
        let e1 = (a.cosh() * (1.0 - c) - c).abs();
        let e2 = (a.tanh() - (2.0 * c - 1.0).sqrt() / c).abs();
        worst = worst.max(e1).max(e2);
    }
    ensure(worst < 1e-12, || format!("worst residual {worst:e}"))?;
    Ok(format!("100 samples, worst residual {worst:.1e}"))
}

fn existence_and_simplicity() -> Check {
    let (mut dev, mut res): (f64, f64) = (0.0, 0.0);
    for alpha in grid() {
        let m = TetraMetric::new(alpha).unwrap();
        for class in GeodesicClass::ALL {
            let g = solved(class, alpha)?;
            ensure(g.simple, || format!("{class} at {alpha} is not simple"))?;
            let built = construct_midpoint(class, &m).map_err(|e| e.to_string())?;
            dev = dev.max(max_t_deviation(&built, &g));
            res = res.max(g.max_angle_residual().map_err(|e| e.to_string())?);
        }
    }
    ensure(dev < 1e-8, || format!("construction deviation {dev:e}"))?;
    ensure(res < 1e-9, || format!("angle residual {res:e}"))?;
    Ok(format!("30 geodesics simple; deviation {dev:.1e}, angle residual {res:.1e}"))
}

fn midpoint_theorem() -> Check {
    for alpha in grid() {
        for class in GeodesicClass::ALL {
            let g = solved(class, alpha)?;
            let mids: Vec<_> = g.crossings.iter().filter(|c| (c.t - 0.5).abs() < 1e-8).map(|c| c.edge).collect();
            ensure(mids.len() == 4, || format!("{class} at {alpha}: {} midpoints", mids.len()))?;
            let paired = mids.iter().all(|e| mids.contains(&e.opposite()));
            let mut distinct = mids.clone();
            distinct.sort();
            distinct.dedup();
            ensure(paired && distinct.len() == 4, || format!("{class} at {alpha}: {mids:?}"))?;
            let r = check_theorem1_with_tol(&g, 1e-8);
            ensure(r.verdict == Verdict::Holds, || format!("{class} at {alpha}: {:?}", r.verdict))?;
        }
    }
    Ok("4 midpoints on 2 opposite pairs for all 30".into())
}

fn vertex_bound() -> Check {
    let mut least = f64::INFINITY;
    let mut at = String::new();
    for alpha in grid() {
        for class in GeodesicClass::ALL {
            let r = check_theorem2(&solved(class, alpha)?);
            if r.margin < least {
                least = r.margin;
                at = format!("{class} at {alpha}");
            }
        }
    }
    ensure(least > 0.0, || format!("margin {least:e} ({at})"))?;
    Ok(format!("least margin {least:.4e} ({at})"))
}

fn g2_length() -> Check {
    let mut worst: f64 = 0.0;
    for alpha in grid() {
        let c = alpha.cos();
        let a = (c / (1.0 - c)).acosh();
        let (ch, sh) = ((a / 2.0).cosh(), (a / 2.0).sinh());
        let want = 4.0 * (ch * ch - sh * sh * c).acosh();
        worst = worst.max((solved(GeodesicClass::G2, alpha)?.total_length - want).abs());
    }
    ensure(worst < 1e-10, || format!("worst {worst:e}"))?;
    Ok(format!("worst length error {worst:.1e}"))
}

fn uniqueness() -> Check {
    let mut summary = Vec::new();
    let mut dev: f64 = 0.0;
    for alpha in [0.3, 0.7] {
        let m = TetraMetric::new(alpha).unwrap();
        for class in GeodesicClass::ALL {
            let r = perturbation_uniqueness(&canonical_sequence(class), &m, 20, 17, 1e-8).map_err(|e| e.to_string())?;
            ensure(r.distinct == 0, || format!("{class} at {alpha}: {} distinct solutions", r.distinct))?;
            ensure(r.converged > 0, || format!("{class} at {alpha}: no run converged"))?;
            dev = dev.max(r.max_deviation);
            summary.push(format!("{class}@{alpha} {}/20", r.converged));
        }
    }
    ensure(dev < 1e-8, || format!("deviation {dev:e}"))?;
    Ok(format!("no distinct solutions, deviation {dev:.1e}; converged {}", summary.join(", ")))
}

fn cone_lemma() -> Check {
    let hyp = hypergeo_json(&["cone", "sweep", "--samples", "200", "--seed", "2024"])?;
    let agree = hyp["agreement"].as_u64().unwrap_or(0);
    ensure(agree == 200, || format!("hyperbolic agreement {agree}/200"))?;
    let euc = hypergeo_json(&["cone", "sweep", "--samples", "50", "--seed", "2024", "--geometry", "euc"])?;
    let rows = euc["rows"].as_array().cloned().unwrap_or_default();
    let n_ok = rows.iter().filter(|r| r["count_brute_force"] == r["n"] && r["count_closed_form"] == r["n"]).count();
    ensure(n_ok == 50, || format!("euclidean {n_ok}/50"))?;
    Ok("hyperbolic 200/200, euclidean 50/50".into())
}

fn euclidean_reference() -> Check {
    let pairs = survey_pairs(21);
    for &(p, q) in &pairs {
        let lemma = check_midpoint_lemma(p, q).map_err(|e| e.to_string())?;
        let fractions: Vec<Q> = lemma.midpoints.iter().map(|m| m.0).collect();
        let want: Vec<Q> = (0..4).map(|k| Q::new(k, 4)).collect();
        ensure(lemma.holds && fractions == want, || format!("({p}, {q}): {lemma:?}"))?;
        let quarters = quarter_symmetry(p, q).map_err(|e| e.to_string())?;
        ensure(quarters.holds, || format!("({p}, {q}): {quarters:?}"))?;
    }
    let survey = hypergeo_json(&["euclid", "survey", "--max", "21"])?;
    ensure(survey["all_hold"] == Value::Bool(true), || "survey reports a failure".into())?;
    Ok(format!("{} coprime pairs", pairs.len()))
}

fn cross_module() -> Check {
    let tr = trace(&midline(0, 1).unwrap(), 1).map_err(|e| e.to_string())?;
    let tokens = tr.sequence.to_tokens();
    let from_trace = hypergeo_json(&["geodesic", "solve", "--alpha", "0.5", "--sequence", &tokens])?;
    let g2 = hypergeo_json(&["geodesic", "construct", "--class", "g2", "--alpha", "0.5"])?;
    let (a, b) = (from_trace["crossings"].as_array().unwrap(), g2["crossings"].as_array().unwrap());
    ensure(a.len() == b.len(), || "crossing counts differ".into())?;
    for (x, y) in a.iter().zip(b) {
        let dt = (x["t"].as_f64().unwrap() - y["t"].as_f64().unwrap()).abs();
        ensure(x["edge"] == y["edge"] && dt < 1e-9, || format!("{x} vs {y}"))?;
    }
    let mut worst: f64 = 0.0;
    for alpha in grid() {
        let m = TetraMetric::new(alpha).unwrap();
        for class in GeodesicClass::ALL {
            let h = develop(&canonical_sequence(class), &m).unwrap().holonomy.unwrap();
            let l = classify(&h).map_err(|e| e.to_string())?.translation_length.ok_or("not hyperbolic")?;
            worst = worst.max((l - solved(class, alpha)?.total_length).abs());
        }
    }
    ensure(worst < 1e-9, || format!("length mismatch {worst:e}"))?;
    Ok(format!("lattice G2 matches; translation vs total length {worst:.1e}"))
}

fn determinism() -> Check {
    let runs: [&[&str]; 5] = [
        &["tetra", "info", "--alpha", "0.5"],
        &["geodesic", "construct", "--class", "g32", "--alpha", "0.7"],
        &["geodesic", "solve", "--alpha", "0.3", "--sequence", "12:123,13:134,14:124"],
        &["cone", "sweep", "--samples", "40", "--seed", "9"],
        &["euclid", "survey", "--max", "11"],
    ];
    for args in runs {
        let first = hypergeo(args);
        let second = hypergeo(args);
        ensure(first == second && !first.0.is_empty(), || format!("`{}` differs", args.join(" ")))?;
    }
    Ok("5 commands byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("edge-length identity", edge_length_identity),
        ("existence and simplicity", existence_and_simplicity),
        ("midpoint theorem", midpoint_theorem),
        ("vertex-distance bound", vertex_bound),
        ("G2 length formula", g2_length),
        ("uniqueness by shooting", uniqueness),
        ("cone lemma", cone_lemma),
        ("euclidean reference", euclidean_reference),
        ("cross-module consistency", cross_module),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{}/10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
