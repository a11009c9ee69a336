use hypergeo::development::{canonical_sequence, GeodesicClass};
use hypergeo::solver::{check_theorem1_with_tol, check_theorem2, ClosedGeodesic, Verdict};
use hypergeo::tetra::Edge;
use serde::Serialize;

use crate::SCHEMA;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingRecord {
    pub edge: [u8; 2],
    pub t: f64,
}

/// Everything reported about one closed geodesic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicRecord {
    pub schema: u32,
    pub realizable: bool,
    pub alpha: f64,
    pub class: Option<String>,
    pub sequence: String,
    pub edge_length: f64,
    pub crossings: Vec<CrossingRecord>,
    pub segment_lengths: Vec<f64>,
    pub total_length: f64,
    pub min_vertex_distance: f64,
    pub theorem2_rhs: f64,
    pub theorem2_margin: f64,
    pub simple: bool,
    pub midpoint_pairs: Vec<[[u8; 2]; 2]>,
    pub midpoint_check: &'static str,
    pub vertex_bound_check: &'static str,
    pub max_angle_residual: f64,
}

pub fn edge_pair(e: &Edge) -> [u8; 2] {
    [e.lower(), e.upper()]
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Violated => "violated",
        Verdict::Inconclusive => "inconclusive",
        Verdict::NotApplicable => "not-applicable",
    }
}

/// The canonical class whose sequence is exactly `g`'s, if any.
pub fn class_of(g: &ClosedGeodesic) -> Option<GeodesicClass> {
    GeodesicClass::ALL.into_iter().find(|c| canonical_sequence(*c) == g.sequence)
}

impl GeodesicRecord {
    pub fn new(g: &ClosedGeodesic, tol: f64) -> hypergeo::Result<Self> {
        let t1 = check_theorem1_with_tol(g, tol);
        let t2 = check_theorem2(g);
        Ok(GeodesicRecord {
            schema: SCHEMA,
            realizable: true,
            alpha: g.metric.alpha(),
            class: class_of(g).map(|c| c.name().to_string()),
            sequence: g.sequence.to_tokens(),
            edge_length: g.metric.edge_length(),
            crossings: g
                .crossings
                .iter()
                .map(|c| CrossingRecord {
                    edge: edge_pair(&c.edge),
                    t: c.t,
                })
                .collect(),
            segment_lengths: g.segment_lengths.clone(),
            total_length: g.total_length,
            min_vertex_distance: g.min_vertex_distance,
            theorem2_rhs: t2.rhs,
            theorem2_margin: t2.margin,
            simple: g.simple,
            midpoint_pairs: t1.pairs.iter().map(|(a, b)| [edge_pair(a), edge_pair(b)]).collect(),
            midpoint_check: verdict_name(t1.verdict),
            vertex_bound_check: verdict_name(t2.verdict),
            max_angle_residual: g.max_angle_residual()?,
        })
    }
}
