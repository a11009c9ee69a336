use std::path::Path;

use hypergeo::cone::{
    brute_force_count, count, n_of, thresholds, Cone, ConeGeodesicQuery, ConeGeometry,
};
use hypergeo::development::{canonical_sequence, CrossingSequence, GeodesicClass};
use hypergeo::euclid::{check_midpoint_lemma, quarter_symmetry, survey_pairs};
use hypergeo::solver::{
    construct_midpoint, max_t_deviation, solve_class, ClosedGeodesic, Realization, Verdict,
};
use hypergeo::tetra::TetraMetric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::record::{edge_pair, GeodesicRecord};
use crate::{svg, CliError, GeometryArg, Outcome, SCHEMA};

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn metric(alpha: f64) -> Result<TetraMetric, CliError> {
    TetraMetric::new(alpha).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn tetra_info(alpha: f64) -> Result<Outcome, CliError> {
    let m = metric(alpha)?;
    let bound = m.theorem2_bound();
    Ok(Outcome::ok(json!({
        "schema": SCHEMA,
        "alpha": alpha,
        "edge_length": m.edge_length(),
        "tanh_edge": hypergeo::tetra::tanh_edge(alpha)?,
        "vertex_cone_angle": m.vertex_cone_angle(),
        "theorem2_rhs": bound.rhs,
        "critical_distance": bound.critical_distance,
    })))
}

fn emit_geodesic(
    g: &ClosedGeodesic,
    tol: f64,
    svg_path: Option<&Path>,
    json_path: Option<&Path>,
) -> Result<Value, CliError> {
    let record = GeodesicRecord::new(g, tol)?;
    let value = serde_json::to_value(&record).expect("records serialize");
    if let Some(path) = svg_path {
        let title = record.class.clone().unwrap_or_else(|| record.sequence.clone());
        write_file(path, &svg::render(&svg::scene(g, tol)?, &title))?;
    }
    if let Some(path) = json_path {
        write_file(path, &format!("{value}\n"))?;
    }
    Ok(value)
}

/// Failed checks for a canonical class: the midpoint construction must agree
/// with the axis, the angles must sum to pi and both necessary conditions hold.
pub fn construction_failures(built: &ClosedGeodesic, solved: &ClosedGeodesic, tol: f64) -> hypergeo::Result<Vec<String>> {
    let mut failures = Vec::new();
    let dev = max_t_deviation(built, solved);
    if dev.is_nan() || dev >= tol {
        failures.push(format!("construction and axis differ by {dev:e}"));
    }
    let res = solved.max_angle_residual()?;
    if res.is_nan() || res >= tol {
        failures.push(format!("angle residual {res:e}"));
    }
    if !solved.simple {
        failures.push("geodesic is not simple".into());
    }
    let rec = GeodesicRecord::new(solved, tol)?;
    if rec.midpoint_check != crate::record::verdict_name(Verdict::Holds) {
        failures.push(format!("midpoint check: {}", rec.midpoint_check));
    }
    if rec.theorem2_margin.is_nan() || rec.theorem2_margin <= 0.0 {
        failures.push(format!("vertex bound margin {:e}", rec.theorem2_margin));
    }
    Ok(failures)
}

pub fn construct(
    class: GeodesicClass,
    alpha: f64,
    tol: f64,
    svg_path: Option<&Path>,
    json_path: Option<&Path>,
) -> Result<Outcome, CliError> {
    let m = metric(alpha)?;
    let seq = canonical_sequence(class);
    let solved = match solve_class(&seq, &m)? {
        Realization::Closed(g) => g,
        Realization::NotRealizable(reason) => {
            eprintln!("{class} is not realizable at alpha = {alpha}: {reason}");
            return Ok(Outcome {
                value: json!({"schema": SCHEMA, "realizable": false, "reason": reason.code()}),
                falsified: true,
            });
        }
    };
    let failures = match construct_midpoint(class, &m) {
        Ok(built) => construction_failures(&built, &solved, tol)?,
        Err(e) => vec![e.to_string()],
    };
    for f in &failures {
        eprintln!("check failed: {f}");
    }
    Ok(Outcome {
        value: emit_geodesic(&solved, tol, svg_path, json_path)?,
        falsified: !failures.is_empty(),
    })
}

pub fn solve(
    tokens: &str,
    alpha: f64,
    tol: f64,
    svg_path: Option<&Path>,
    json_path: Option<&Path>,
) -> Result<Outcome, CliError> {
    let m = metric(alpha)?;
    let seq = CrossingSequence::parse_tokens(tokens)
        .map_err(|v| CliError::Usage(format!("invalid sequence at token {}: {}", v.index, v.kind)))?;
    match solve_class(&seq, &m)? {
        Realization::Closed(g) => Ok(Outcome::ok(emit_geodesic(&g, tol, svg_path, json_path)?)),
        Realization::NotRealizable(reason) => {
            let value = json!({"schema": SCHEMA, "realizable": false, "reason": reason.code(), "detail": reason.to_string()});
            if let Some(path) = json_path {
                write_file(path, &format!("{value}\n"))?;
            }
            Ok(Outcome::ok(value))
        }
    }
}

fn geometry_name(g: GeometryArg) -> &'static str {
    match g {
        GeometryArg::Hyp => "hyp",
        GeometryArg::Euc => "euc",
    }
}

fn cone_row(q: &ConeGeodesicQuery) -> Result<(Value, bool), CliError> {
    let closed = count(q)?;
    let brute = (q.d > 0.0).then(|| brute_force_count(q)).transpose()?;
    let row = json!({
        "alpha": q.cone.full_angle,
        "d": q.d,
        "n": n_of(q.cone.full_angle),
        "count_closed_form": closed,
        "count_brute_force": brute,
    });
    Ok((row, brute.is_none_or(|b| b == closed)))
}

pub fn cone_count(full_angle: f64, distance: Option<f64>, geometry: GeometryArg) -> Result<Outcome, CliError> {
    let d = match (distance, geometry) {
        (Some(d), _) => d,
        (None, GeometryArg::Euc) => 1.0,
        (None, GeometryArg::Hyp) => {
            return Err(CliError::Usage("--distance is required for hyperbolic cones".into()))
        }
    };
    let geo = match geometry {
        GeometryArg::Hyp => ConeGeometry::Hyperbolic,
        GeometryArg::Euc => ConeGeometry::Euclidean,
    };
    let cone = Cone::new(full_angle, geo).map_err(|e| CliError::Usage(e.to_string()))?;
    let q = ConeGeodesicQuery::new(cone, d).map_err(|e| CliError::Usage(e.to_string()))?;
    let (row, agree) = cone_row(&q)?;
    let mut value = json!({"schema": SCHEMA, "geometry": geometry_name(geometry)});
    value.as_object_mut().unwrap().extend(row.as_object().unwrap().clone());
    value["agree"] = json!(agree);
    Ok(Outcome::ok(value))
}

/// Minimum gap between a sampled distance and every count threshold.
pub const SWEEP_BOUNDARY_GAP: f64 = 1e-6;

pub fn cone_sweep(samples: usize, seed: u64, geometry: GeometryArg) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(samples);
    let mut agreement = 0;
    while rows.len() < samples {
        let (alpha, d) = match geometry {
            GeometryArg::Hyp => (rng.gen_range(0.05..3.2), rng.gen_range(0.01..3.0)),
            GeometryArg::Euc => (rng.gen_range(0.05..7.0), rng.gen_range(0.01..3.0)),
        };
        if geometry == GeometryArg::Hyp && thresholds(alpha).iter().any(|t| (d - t).abs() <= SWEEP_BOUNDARY_GAP) {
            continue;
        }
        let cone = match geometry {
            GeometryArg::Hyp => Cone::hyperbolic(alpha)?,
            GeometryArg::Euc => Cone::euclidean(alpha)?,
        };
        let (row, agree) = cone_row(&ConeGeodesicQuery::new(cone, d)?)?;
        agreement += usize::from(agree);
        rows.push(row);
    }
    Ok(Outcome {
        value: json!({
            "schema": SCHEMA,
            "geometry": geometry_name(geometry),
            "seed": seed,
            "samples": samples,
            "agreement": agreement,
            "rows": rows,
        }),
        falsified: agreement != samples,
    })
}

pub fn euclid_survey(max: i64) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut all_hold = true;
    for (p, q) in survey_pairs(max) {
        let lemma = check_midpoint_lemma(p, q)?;
        let quarters = quarter_symmetry(p, q)?;
        all_hold &= lemma.holds && quarters.holds;
        rows.push(json!({
            "p": p,
            "q": q,
            "crossings": lemma.crossing_count,
            "midpoint_edges": lemma.midpoints.iter().map(|m| edge_pair(&m.1)).collect::<Vec<_>>(),
            "quarter_counts": quarters.counts,
            "midpoint_lemma": lemma.holds,
            "quarter_symmetry": quarters.holds,
        }));
    }
    Ok(Outcome {
        value: json!({
            "schema": SCHEMA,
            "max": max,
            "pairs": rows.len(),
            "all_hold": all_hold,
            "rows": rows,
        }),
        falsified: !all_hold,
    })
}
