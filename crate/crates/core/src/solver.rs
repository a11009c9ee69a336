//! Closed geodesics realizing a crossing sequence.
//!
//! [`solve_class`] finds the geodesic as the axis of the holonomy,
//! [`construct_midpoint`] rebuilds the three canonical classes from their
//! edge midpoints, and [`perturbation_uniqueness`] runs an independent
//! shooting solver against the axis solution. The remaining functions check
//! a finished geodesic: straightness, simplicity, vertex distances and the
//! midpoint and vertex-distance theorems.
//!
//! All geometry of a finished geodesic is evaluated chart by chart from its
//! `(edge, t)` crossings, so nothing depends on far-away developed
//! coordinates.

use crate::development::{
    canonical_sequence, develop, gluing, CrossingSequence, GeodesicClass,
};
use crate::error::{Error, Result};
use crate::hyperbolic::{
    angle_at, classify, minkowski_dot, tangent_angle, GeodesicLine, IsometryKind, PlaneIsometry,
    PlanePoint,
};
use crate::tetra::{Edge, Face, FaceChart, TetraMetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;

/// Crossings closer than this to a vertex, in edge fraction, do not count.
pub const INTERIOR_EPS: f64 = 1e-9;
/// Default tolerance of the straightness check.
pub const ANGLE_TOL: f64 = 1e-9;
/// A crossing is at a midpoint when `|t - 1/2|` is below this.
pub const MIDPOINT_TOL: f64 = 1e-8;
/// Margins this close to zero leave the vertex-distance bound undecided.
pub const MARGIN_TOL: f64 = 1e-12;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-11;
const NEWTON_MAX_HALVINGS: usize = 40;
const COARSE_TOL: f64 = 1e-8;
const FD_STEP: f64 = 1e-7;

fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Damped Newton iteration on a two-dimensional residual with a
/// central-difference Jacobian; steps are halved while they fail to reduce
/// the residual norm.
fn damped_newton<F>(f: F, x0: [f64; 2], tol: f64) -> Option<[f64; 2]>
where
    F: Fn([f64; 2]) -> Option<[f64; 2]>,
{
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut x = x0;
    let mut r = f(x)?;
    for _ in 0..NEWTON_MAX_ITER {
        if norm(r) < tol {
            return Some(x);
        }
        let mut jac = [[0.0; 2]; 2];
        for c in 0..2 {
            let mut hi = x;
            let mut lo = x;
            hi[c] += FD_STEP;
            lo[c] -= FD_STEP;
            let (rh, rl) = (f(hi)?, f(lo)?);
            for row in 0..2 {
                jac[row][c] = (rh[row] - rl[row]) / (2.0 * FD_STEP);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !det.is_finite() || det == 0.0 {
            return None;
        }
        let step = [
            (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            (jac[0][0] * r[1] - jac[1][0] * r[0]) / det,
        ];
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let trial = [x[0] - scale * step[0], x[1] - scale * step[1]];
            if let Some(rt) = f(trial) {
                if norm(rt) < norm(r) {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (norm(r) < tol).then_some(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub edge: Edge,
    /// Arclength fraction from the lower-labeled vertex.
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedGeodesic {
    pub metric: TetraMetric,
    pub sequence: CrossingSequence,
    pub crossings: Vec<Crossing>,
    /// `segment_lengths[i]` runs from crossing `i` to crossing `i + 1`.
    pub segment_lengths: Vec<f64>,
    pub total_length: f64,
    pub min_vertex_distance: f64,
    pub simple: bool,
}

/// Why a cyclic sequence has no closed geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotRealizable {
    HolonomyNotHyperbolic(IsometryKind),
    /// The axis misses the interior of the exit edge of step `k`.
    AxisMissesEdge(usize),
    /// The axis leaves the face of step `k` before entering it.
    OrderViolation(usize),
}

impl NotRealizable {
    pub fn code(&self) -> &'static str {
        match self {
            NotRealizable::HolonomyNotHyperbolic(_) => "holonomy-not-hyperbolic",
            NotRealizable::AxisMissesEdge(_) => "axis-misses-edge",
            NotRealizable::OrderViolation(_) => "order-violation",
        }
    }
}

impl fmt::Display for NotRealizable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotRealizable::HolonomyNotHyperbolic(kind) => {
                write!(f, "holonomy-not-hyperbolic ({kind:?})")
            }
            NotRealizable::AxisMissesEdge(k) => write!(f, "axis-misses-edge-{k}"),
            NotRealizable::OrderViolation(k) => write!(f, "order-violation at step {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    Closed(ClosedGeodesic),
    NotRealizable(NotRealizable),
}

impl Realization {
    pub fn closed(self) -> Option<ClosedGeodesic> {
        match self {
            Realization::Closed(g) => Some(g),
            Realization::NotRealizable(_) => None,
        }
    }
}

/// Where a line meets an edge of a chart: edge fraction `t` and the signed
/// arclength of the meeting point along `line` measured from `base`.
fn meet(
    chart: &FaceChart,
    e: &Edge,
    a: f64,
    line: &GeodesicLine,
    base: &PlanePoint,
) -> Option<(f64, f64)> {
    let u = chart.position(e.lower())?;
    let w = chart.position(e.upper())?;
    let x = line.intersection(&GeodesicLine::through(&u, &w).ok()?)?;
    let along_edge = u.direction_to(&w).ok()?;
    let t = minkowski_dot(x.coords(), &along_edge).asinh() / a;
    let s = minkowski_dot(x.coords(), &line.direction_at(base)).asinh();
    Some((t, s))
}

fn interior(t: f64) -> bool {
    t > INTERIOR_EPS && t < 1.0 - INTERIOR_EPS
}

/// Solves for the closed geodesic of a cyclic sequence as the axis of its
/// holonomy.
///
/// The holonomy is recomputed with each face as root, and the axis is
/// intersected with that face's entry and exit edges in its own chart.
pub fn solve_class(seq: &CrossingSequence, metric: &TetraMetric) -> Result<Realization> {
    seq.validate()?;
    if !seq.cyclic {
        return Err(Error::InvalidSequence {
            index: 0,
            kind: "sequence must be cyclic".into(),
        });
    }
    let n = seq.len();
    let edges = seq.edges();
    let faces = seq.faces();
    let a = metric.edge_length();
    let mut ts = vec![0.0; n];
    for i in 0..n {
        let dev = develop(&seq.rotated(i), metric)?;
        let class = classify(dev.holonomy.as_ref().expect("cyclic development"))?;
        let axis = match (class.kind, class.axis) {
            (IsometryKind::Hyperbolic, Some(axis)) => axis,
            (kind, _) => {
                return Ok(Realization::NotRealizable(NotRealizable::HolonomyNotHyperbolic(kind)))
            }
        };
        let chart = metric.face_chart(faces[i]);
        let base = axis.foot(&PlanePoint::ORIGIN);
        let prev = (i + n - 1) % n;
        let entry = meet(&chart, &edges[prev], a, &axis, &base).filter(|(t, _)| interior(*t));
        let exit = meet(&chart, &edges[i], a, &axis, &base).filter(|(t, _)| interior(*t));
        let ((_, s_in), (t_out, s_out)) = match (entry, exit) {
            (None, _) => return Ok(Realization::NotRealizable(NotRealizable::AxisMissesEdge(prev))),
            (_, None) => return Ok(Realization::NotRealizable(NotRealizable::AxisMissesEdge(i))),
            (Some(p), Some(q)) => (p, q),
        };
        if s_out <= s_in {
            return Ok(Realization::NotRealizable(NotRealizable::OrderViolation(i)));
        }
        ts[i] = t_out;
    }
    Ok(Realization::Closed(ClosedGeodesic::from_crossings(metric, seq, &ts)?))
}

/// Builds a canonical class from its four edge midpoints: consecutive
/// midpoints are joined by chords across the developed arc between them,
/// then straightness is checked at every crossing with tolerance `tol`.
pub fn construct_midpoint_with_tol(
    class: GeodesicClass,
    metric: &TetraMetric,
    tol: f64,
) -> Result<ClosedGeodesic> {
    let seq = canonical_sequence(class);
    let n = seq.len();
    let edges = seq.edges();
    let faces = seq.faces();
    let a = metric.edge_length();
    let anchors = class.anchor_positions();
    let mut ts = vec![f64::NAN; n];
    for w in 0..anchors.len() {
        let k = anchors[w];
        let mut k2 = anchors[(w + 1) % anchors.len()];
        if k2 <= k {
            k2 += n;
        }
        ts[k] = 0.5;
        let arc = CrossingSequence::new((k + 1..=k2).map(|j| seq.steps[j % n]).collect(), false);
        let dev = develop(&arc, metric)?;
        let start = metric
            .face_chart(faces[(k + 1) % n])
            .edge_point(&edges[k], 0.5)
            .ok_or_else(|| Error::ConstructionFailed(format!("edge {} not on arc start", edges[k])))?;
        let end = dev.developed_edges[arc.len() - 1].point_at(0.5)?;
        let chord = GeodesicLine::through(&start, &end)?;
        for (j, de) in dev.developed_edges[..arc.len() - 1].iter().enumerate() {
            let idx = (k + 1 + j) % n;
            let hit = GeodesicLine::through(&de.lower, &de.upper)
                .ok()
                .and_then(|l| chord.intersection(&l));
            let t = hit
                .and_then(|x| {
                    let along = de.lower.direction_to(&de.upper).ok()?;
                    Some(minkowski_dot(x.coords(), &along).asinh() / a)
                })
                .filter(|t| interior(*t))
                .ok_or_else(|| {
                    Error::ConstructionFailed(format!(
                        "chord from {} to {} misses edge {} at step {idx}",
                        edges[k],
                        edges[k2 % n],
                        edges[idx]
                    ))
                })?;
            ts[idx] = t;
        }
    }
    let g = ClosedGeodesic::from_crossings(metric, &seq, &ts)?;
    for (i, r) in g.angle_residuals()?.iter().enumerate() {
        if r.abs() > tol {
            return Err(Error::ConstructionFailed(format!(
                "angle sum at crossing {i} ({}) is off by {r:e}",
                edges[i]
            )));
        }
    }
    Ok(g)
}

pub fn construct_midpoint(class: GeodesicClass, metric: &TetraMetric) -> Result<ClosedGeodesic> {
    construct_midpoint_with_tol(class, metric, ANGLE_TOL)
}

/// Two segments of one face meeting away from their endpoints, or two
/// crossings at the same edge point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfIntersection {
    pub face: Face,
    pub segments: (usize, usize),
    /// Position in the canonical chart of `face`.
    pub point: PlanePoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexDistances {
    pub per_vertex: [f64; 4],
    pub min: f64,
}

impl ClosedGeodesic {
    /// Assembles a geodesic from its crossing fractions, one per step of
    /// `seq`; segment lengths, vertex distances and simplicity follow.
    pub fn from_crossings(metric: &TetraMetric, seq: &CrossingSequence, ts: &[f64]) -> Result<Self> {
        if ts.len() != seq.len() || !seq.cyclic {
            return Err(Error::InvalidSequence {
                index: ts.len().min(seq.len()),
                kind: "crossing count must match a cyclic sequence".into(),
            });
        }
        let crossings: Vec<Crossing> = seq
            .edges()
            .iter()
            .zip(ts)
            .map(|(&edge, &t)| Crossing { edge, t })
            .collect();
        let mut g = ClosedGeodesic {
            metric: *metric,
            sequence: seq.clone(),
            crossings,
            segment_lengths: Vec::new(),
            total_length: 0.0,
            min_vertex_distance: f64::INFINITY,
            simple: true,
        };
        g.segment_lengths = (0..g.len())
            .map(|j| g.segment(j).map(|(_, p, q)| p.distance(&q)))
            .collect::<Result<_>>()?;
        g.total_length = g.segment_lengths.iter().sum();
        g.min_vertex_distance = vertex_distances(&g)?.min;
        g.simple = is_simple(&g)?.0;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    fn point(&self, chart: &FaceChart, i: usize) -> Result<PlanePoint> {
        let c = self.crossings[i % self.len()];
        chart.edge_point(&c.edge, c.t).ok_or_else(|| {
            Error::UnknownLabel(format!("edge {} not on face {}", c.edge, chart.face))
        })
    }

    /// Segment `j` in the chart of its face: from crossing `j` to `j + 1`.
    pub fn segment(&self, j: usize) -> Result<(Face, PlanePoint, PlanePoint)> {
        let n = self.len();
        let face = self.sequence.steps[(j + 1) % n].face;
        let chart = self.metric.face_chart(face);
        Ok((face, self.point(&chart, j)?, self.point(&chart, j + 1)?))
    }

    /// At each crossing, the angles the two adjacent segments make with
    /// the edge toward its lower vertex, summed, minus `pi`.
    pub fn angle_residuals(&self) -> Result<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let e = self.crossings[i].edge;
                let before = self.metric.face_chart(self.sequence.steps[i].face);
                let after = self.metric.face_chart(self.sequence.steps[(i + 1) % n].face);
                let x0 = self.point(&before, i)?;
                let x1 = self.point(&after, i)?;
                let theta0 = angle_at(
                    &x0,
                    &self.point(&before, i + n - 1)?,
                    &before.position(e.lower()).expect("edge on face"),
                )?;
                let theta1 = angle_at(
                    &x1,
                    &self.point(&after, i + 1)?,
                    &after.position(e.lower()).expect("edge on face"),
                )?;
                Ok(theta0 + theta1 - PI)
            })
            .collect()
    }

    pub fn max_angle_residual(&self) -> Result<f64> {
        Ok(self
            .angle_residuals()?
            .iter()
            .fold(0.0_f64, |m, r| m.max(r.abs())))
    }

    pub fn ts(&self) -> Vec<f64> {
        self.crossings.iter().map(|c| c.t).collect()
    }
}

/// Largest crossing-wise difference in `t`; infinite if the edge lists differ.
pub fn max_t_deviation(g: &ClosedGeodesic, h: &ClosedGeodesic) -> f64 {
    if g.len() != h.len() {
        return f64::INFINITY;
    }
    g.crossings
        .iter()
        .zip(&h.crossings)
        .map(|(c, d)| if c.edge == d.edge { (c.t - d.t).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

/// Interior crossing of the segments `[a0, a1]` and `[b0, b1]`, found on
/// their Klein chords. Contacts within `INTERIOR_EPS` of an endpoint (in
/// chord fraction) do not count.
pub fn segment_crossing(
    a0: &PlanePoint,
    a1: &PlanePoint,
    b0: &PlanePoint,
    b1: &PlanePoint,
) -> Option<PlanePoint> {
    let (x, y) = klein_crossing(a0.klein(), a1.klein(), b0.klein(), b1.klein())?;
    PlanePoint::from_klein(x, y).ok()
}

fn klein_crossing(
    p: (f64, f64),
    p2: (f64, f64),
    q: (f64, f64),
    q2: (f64, f64),
) -> Option<(f64, f64)> {
    let r = (p2.0 - p.0, p2.1 - p.1);
    let s = (q2.0 - q.0, q2.1 - q.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den.abs() < 1e-300 {
        return None;
    }
    let d = (q.0 - p.0, q.1 - p.1);
    let u = (d.0 * s.1 - d.1 * s.0) / den;
    let v = (d.0 * r.1 - d.1 * r.0) / den;
    let inside = |x: f64| x > INTERIOR_EPS && x < 1.0 - INTERIOR_EPS;
    (inside(u) && inside(v)).then_some((p.0 + u * r.0, p.1 + u * r.1))
}

/// Self-intersections of `g`: pairs of segments of the same face crossing
/// in their interiors (tested on Klein chords), plus repeated edge points.
pub fn is_simple(g: &ClosedGeodesic) -> Result<(bool, Vec<SelfIntersection>)> {
    let n = g.len();
    let segs: Vec<_> = (0..n).map(|j| g.segment(j)).collect::<Result<_>>()?;
    let mut found = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let (fj, a0, a1) = segs[j];
            let (fk, b0, b1) = segs[k];
            if fj != fk {
                continue;
            }
            if let Some(point) = segment_crossing(&a0, &a1, &b0, &b1) {
                found.push(SelfIntersection {
                    face: fj,
                    segments: (j, k),
                    point,
                });
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            let (ci, ck) = (g.crossings[i], g.crossings[k]);
            if ci.edge == ck.edge && (ci.t - ck.t).abs() < INTERIOR_EPS {
                let face = g.sequence.steps[(i + 1) % n].face;
                let point = g.metric.face_chart(face).edge_point(&ci.edge, ci.t).expect("edge on face");
                found.push(SelfIntersection {
                    face,
                    segments: (i, k),
                    point,
                });
            }
        }
    }
    Ok((found.is_empty(), found))
}

/// Hyperbolic distance from `v` to the segment `[p, q]`.
pub fn point_segment_distance(v: &PlanePoint, p: &PlanePoint, q: &PlanePoint) -> Result<f64> {
    let line = GeodesicLine::through(p, q)?;
    let foot = line.foot(v);
    let s = minkowski_dot(foot.coords(), &p.direction_to(q)?).asinh();
    if s > 0.0 && s < p.distance(q) {
        Ok(line.distance_to(v))
    } else {
        Ok(v.distance(p).min(v.distance(q)))
    }
}

/// For each vertex the least distance to a segment in one of its faces.
pub fn vertex_distances(g: &ClosedGeodesic) -> Result<VertexDistances> {
    let mut per_vertex = [f64::INFINITY; 4];
    for j in 0..g.len() {
        let (face, p, q) = g.segment(j)?;
        let chart = g.metric.face_chart(face);
        for v in face.vertices() {
            let d = point_segment_distance(&chart.position(v).expect("vertex of face"), &p, &q)?;
            let slot = &mut per_vertex[(v - 1) as usize];
            *slot = slot.min(d);
        }
    }
    let min = per_vertex.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(VertexDistances { per_vertex, min })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidpointReport {
    pub verdict: Verdict,
    /// Crossing indices with `t` at the edge midpoint.
    pub midpoints: Vec<(usize, Edge)>,
    /// The opposite pairs formed by the midpoint edges, when they pair up.
    pub pairs: Vec<(Edge, Edge)>,
}

/// A simple closed geodesic crosses two pairs of opposite edges at their
/// midpoints, and no other edge there.
pub fn check_theorem1(g: &ClosedGeodesic) -> MidpointReport {
    check_theorem1_with_tol(g, MIDPOINT_TOL)
}

pub fn check_theorem1_with_tol(g: &ClosedGeodesic, tol: f64) -> MidpointReport {
    let midpoints: Vec<(usize, Edge)> = g
        .crossings
        .iter()
        .enumerate()
        .filter(|(_, c)| (c.t - 0.5).abs() < tol)
        .map(|(i, c)| (i, c.edge))
        .collect();
    if !g.simple {
        return MidpointReport {
            verdict: Verdict::NotApplicable,
            midpoints,
            pairs: Vec::new(),
        };
    }
    let mut edges: Vec<Edge> = midpoints.iter().map(|m| m.1).collect();
    edges.sort();
    edges.dedup();
    let pairs: Vec<(Edge, Edge)> = edges
        .iter()
        .filter(|e| **e < e.opposite() && edges.contains(&e.opposite()))
        .map(|e| (*e, e.opposite()))
        .collect();
    let holds = midpoints.len() == 4 && edges.len() == 4 && pairs.len() == 2;
    MidpointReport {
        verdict: if holds { Verdict::Holds } else { Verdict::Violated },
        midpoints,
        pairs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexBoundReport {
    pub verdict: Verdict,
    /// `tanh d` for the least vertex distance `d`.
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// A simple closed geodesic keeps `tanh d > cos(3 alpha / 2) tanh a`.
pub fn check_theorem2(g: &ClosedGeodesic) -> VertexBoundReport {
    let lhs = g.min_vertex_distance.tanh();
    let rhs = g.metric.theorem2_bound().rhs;
    let margin = lhs - rhs;
    let verdict = if !g.simple {
        Verdict::NotApplicable
    } else if margin.abs() <= MARGIN_TOL {
        Verdict::Inconclusive
    } else if margin > 0.0 {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    VertexBoundReport {
        verdict,
        lhs,
        rhs,
        margin,
    }
}

/// Shooting along a cyclic sequence: the unknown line starts on the first
/// crossed edge at fraction `t0` and angle `phi` to the edge, and must be
/// carried onto itself by the holonomy.
///
/// The line lives in the chart of the face entered through the first edge.
/// It is compared with its holonomy image in the chart of the middle face,
/// reached forward by the first half of the gluings and backward by the
/// second half, so rounding grows with half the period only.
pub struct Shooter {
    metric: TetraMetric,
    seq: CrossingSequence,
    gluings: Vec<PlaneIsometry>,
    start: (PlanePoint, PlanePoint),
    /// `+1` if the root face lies left of the start edge.
    inward: f64,
    /// Index of the middle face in the sequence.
    mid: usize,
    /// Root chart to middle chart, and root chart through one period to
    /// the middle chart.
    to_middle: PlaneIsometry,
    around: PlaneIsometry,
    /// Exit edge of the middle face in its own chart.
    middle: (PlanePoint, PlanePoint),
}

impl Shooter {
    pub fn new(seq: &CrossingSequence, metric: &TetraMetric) -> Result<Self> {
        seq.validate()?;
        let n = seq.len();
        if !seq.cyclic || n < 2 {
            return Err(Error::InvalidSequence {
                index: 0,
                kind: "shooting needs a cyclic sequence of two or more steps".into(),
            });
        }
        let faces = seq.faces();
        let edges = seq.edges();
        let gluings = (0..n)
            .map(|i| gluing(metric, faces[i], faces[(i + 1) % n], &edges[i]))
            .collect::<Result<Vec<_>>>()?;
        let mid = (1 + n / 2) % n;
        let (forward, around) = Self::split(&gluings, mid);
        let chart = metric.face_chart(faces[mid]);
        let e = edges[mid];
        let middle = (
            chart.position(e.lower()).expect("edge on face"),
            chart.position(e.upper()).expect("edge on face"),
        );
        let root = metric.face_chart(faces[1 % n]);
        let e0 = edges[0];
        let start = (
            root.position(e0.lower()).expect("edge on face"),
            root.position(e0.upper()).expect("edge on face"),
        );
        let apex = root.position(faces[1 % n].apex(&e0).expect("edge on face")).expect("apex");
        let inward = GeodesicLine::through(&start.0, &start.1)?.side(&apex).signum();
        Ok(Shooter {
            metric: *metric,
            seq: seq.clone(),
            gluings,
            start,
            inward,
            mid,
            to_middle: forward.inverse(),
            around,
            middle,
        })
    }

    /// For the face at index `j`: the placement of its chart in the root
    /// chart, and the map from the root chart one period on into its chart.
    fn split(gluings: &[PlaneIsometry], j: usize) -> (PlaneIsometry, PlaneIsometry) {
        let n = gluings.len();
        let steps = (j + n - 1) % n;
        let mut forward = PlaneIsometry::identity();
        for k in 0..steps {
            forward = forward.compose(&gluings[(1 + k) % n]);
        }
        let mut backward = PlaneIsometry::identity();
        for k in (steps..n).rev() {
            backward = gluings[(1 + k) % n].compose(&backward);
        }
        (forward, backward)
    }

    /// The line leaving the start edge at fraction `t0`, angle `phi`.
    pub fn ray(&self, t0: f64, phi: f64) -> Result<GeodesicLine> {
        let (u, w) = self.start;
        let edge = GeodesicLine::through(&u, &w)?;
        let x = u.travel(&u.direction_to(&w)?, t0 * self.metric.edge_length());
        let along = edge.direction_at(&x);
        let normal = edge.pole() * self.inward;
        let dir = phi.cos() * along + phi.sin() * normal;
        GeodesicLine::from_point_direction(&x, &dir)
    }

    /// The angle at the start point `t0` that aims the line at fraction
    /// `tm` of the middle edge.
    pub fn aim(&self, t0: f64, tm: f64) -> Result<f64> {
        let (u, w) = self.start;
        let x = u.lerp(&w, t0)?;
        let target = self
            .to_middle
            .inverse()
            .apply(&self.middle.0.lerp(&self.middle.1, tm)?);
        let edge = GeodesicLine::through(&u, &w)?;
        let along = edge.direction_at(&x);
        let normal = edge.pole() * self.inward;
        let dir = x.direction_to(&target)?;
        Ok(minkowski_dot(&dir, &normal).atan2(minkowski_dot(&dir, &along)))
    }

    /// The line and its holonomy image, both in the middle chart.
    fn pair(&self, t0: f64, phi: f64) -> Option<(GeodesicLine, GeodesicLine)> {
        let line = self.ray(t0, phi).ok()?;
        Some((
            self.to_middle.apply_line(&line).ok()?,
            self.around.apply_line(&line).ok()?,
        ))
    }

    fn probe(&self, line: &GeodesicLine) -> Option<(f64, f64)> {
        let (u, w) = self.middle;
        let m = GeodesicLine::through(&u, &w).ok()?;
        let p = line.intersection(&m)?;
        let pos = minkowski_dot(p.coords(), &u.direction_to(&w).ok()?).asinh();
        let ang = tangent_angle(&p, &m.direction_at(&p), &line.direction_at(&p));
        Some((pos, ang))
    }

    /// Mismatch between the line and its holonomy image on the middle edge:
    /// (arclength offset, angle offset).
    pub fn residual(&self, t0: f64, phi: f64) -> Option<[f64; 2]> {
        let (line, image) = self.pair(t0, phi)?;
        let (p0, a0) = self.probe(&line)?;
        let (p1, a1) = self.probe(&image)?;
        Some([p0 - p1, wrap_angle(a0 - a1)])
    }

    /// Mismatch between the ideal endpoints of the line and of its holonomy
    /// image, seen from the middle face. Defined for every line, so it
    /// steers starts whose line misses the middle edge.
    pub fn endpoint_residual(&self, t0: f64, phi: f64) -> Option<[f64; 2]> {
        let (line, image) = self.pair(t0, phi)?;
        let ends = |l: &GeodesicLine| {
            let ((x0, y0), (x1, y1)) = l.klein_chord();
            (y0.atan2(x0), y1.atan2(x1))
        };
        let (b0, f0) = ends(&line);
        let (b1, f1) = ends(&image);
        Some([wrap_angle(b0 - b1), wrap_angle(f0 - f1)])
    }

    /// Newton from `(t0, phi)`: first on the endpoint residual to get near
    /// an invariant line, then on the middle-edge residual to convergence.
    pub fn solve(&self, t0: f64, phi: f64) -> Option<(f64, f64)> {
        let coarse = damped_newton(|x| self.endpoint_residual(x[0], x[1]), [t0, phi], COARSE_TOL)?;
        let fine = damped_newton(|x| self.residual(x[0], x[1]), coarse, NEWTON_TOL)?;
        Some((fine[0], fine[1]))
    }

    /// Crossing fractions of the line through `(t0, phi)`, each computed in
    /// the chart of the face it leaves. Faces up to the middle are reached
    /// forward from the root, the rest backward from the next period.
    /// `None` unless the line crosses every edge inside and in order.
    pub fn crossings(&self, t0: f64, phi: f64) -> Option<Vec<f64>> {
        let n = self.seq.len();
        let faces = self.seq.faces();
        let edges = self.seq.edges();
        let a = self.metric.edge_length();
        let line = self.ray(t0, phi).ok()?;
        let half = (self.mid + n - 1) % n;
        let mut ts = vec![0.0; n];
        for k in 0..n {
            let j = (1 + k) % n;
            let (forward, backward) = Self::split(&self.gluings, j);
            let local = if k <= half {
                forward.inverse().apply_line(&line).ok()?
            } else {
                backward.apply_line(&line).ok()?
            };
            let chart = self.metric.face_chart(faces[j]);
            let base = local.foot(&PlanePoint::ORIGIN);
            let (t_in, s_in) = meet(&chart, &edges[(j + n - 1) % n], a, &local, &base)?;
            let (t, s_out) = meet(&chart, &edges[j], a, &local, &base)?;
            if !interior(t) || !interior(t_in) || s_out <= s_in {
                return None;
            }
            ts[j] = t;
        }
        Some(ts)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub trials: usize,
    pub converged: usize,
    pub non_convergent: usize,
    /// Largest crossing-wise deviation of a converged run from the axis
    /// solution; zero when nothing converged.
    pub max_deviation: f64,
    /// Converged runs whose crossings differ from the axis solution by
    /// more than the given tolerance.
    pub distinct: usize,
}

/// Runs `trials` shooting solves from seeded random starts and compares
/// every converged solution with the axis solution.
pub fn perturbation_uniqueness(
    seq: &CrossingSequence,
    metric: &TetraMetric,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<UniquenessReport> {
    let mut report = UniquenessReport {
        trials,
        converged: 0,
        non_convergent: 0,
        max_deviation: 0.0,
        distinct: 0,
    };
    if trials == 0 {
        return Ok(report);
    }
    let axis = match solve_class(seq, metric)? {
        Realization::Closed(g) => g,
        Realization::NotRealizable(why) => return Err(Error::NotRealizable(why.to_string())),
    };
    let shooter = Shooter::new(seq, metric)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let t0 = rng.gen_range(0.05..0.95);
        let tm = rng.gen_range(0.05..0.95);
        let ts = shooter
            .aim(t0, tm)
            .ok()
            .and_then(|phi| shooter
            .solve(t0, phi))
            .and_then(|(t, p)| shooter.crossings(t, p));
        match ts {
            Some(ts) => {
                report.converged += 1;
                let dev = ts
                    .iter()
                    .zip(&axis.crossings)
                    .map(|(t, c)| (t - c.t).abs())
                    .fold(0.0, f64::max);
                report.max_deviation = report.max_deviation.max(dev);
                if dev >= tol {
                    report.distinct += 1;
                }
            }
            None => report.non_convergent += 1,
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::development::develop;
    use crate::hyperbolic::classify;
    use crate::tetra::{rotation_group, OPPOSITE_PAIRS};

    fn metric(alpha: f64) -> TetraMetric {
        TetraMetric::new(alpha).unwrap()
    }

    fn solve(class: GeodesicClass, alpha: f64) -> ClosedGeodesic {
        solve_class(&canonical_sequence(class), &metric(alpha))
            .unwrap()
            .closed()
            .unwrap()
    }

    fn cyclic(edges: &str) -> CrossingSequence {
        let edges: Vec<Edge> = edges.split(',').map(|e| e.parse().unwrap()).collect();
        CrossingSequence::cyclic_from_edges(&edges).unwrap()
    }

    #[test]
    fn g2_crosses_midpoints() {
        let g = solve(GeodesicClass::G2, 0.5);
        assert_eq!(g.len(), 4);
        for c in &g.crossings {
            assert!((c.t - 0.5).abs() < 1e-9, "{c:?}");
        }
        assert!(g.simple);
    }

    #[test]
    fn canonical_classes_are_simple_closed_geodesics() {
        for class in GeodesicClass::ALL {
            let g = solve(class, 0.5);
            assert!(g.simple, "{class}");
            assert!(g.max_angle_residual().unwrap() < 1e-9, "{class}");
            let total: f64 = g.segment_lengths.iter().sum();
            assert!((total - g.total_length).abs() < 1e-9);
        }
    }

    #[test]
    fn total_length_is_the_translation_length() {
        for alpha in [0.2, 0.6, 1.0] {
            let m = metric(alpha);
            for class in GeodesicClass::ALL {
                let seq = canonical_sequence(class);
                let h = develop(&seq, &m).unwrap().holonomy.unwrap();
                let l = classify(&h).unwrap().translation_length.unwrap();
                let g = solve(class, alpha);
                assert!((g.total_length - l).abs() < 1e-9, "{class} {alpha}");
            }
        }
    }

    #[test]
    fn midpoint_construction_matches_axis() {
        for alpha in [0.1, 0.5, 1.0] {
            for class in GeodesicClass::ALL {
                let built = construct_midpoint(class, &metric(alpha)).unwrap();
                let solved = solve(class, alpha);
                assert!(max_t_deviation(&built, &solved) < 1e-8, "{class} {alpha}");
            }
        }
    }

    #[test]
    fn g2_segments_follow_the_law_of_cosines() {
        for alpha in [0.15, 0.55, 0.95] {
            let g = construct_midpoint(GeodesicClass::G2, &metric(alpha)).unwrap();
            // triangle with legs a/2, a/2 and included angle alpha
            let a = metric(alpha).edge_length();
            let (c, s) = ((a / 2.0).cosh(), (a / 2.0).sinh());
            let len = (c * c - s * s * alpha.cos()).acosh();
            for l in &g.segment_lengths {
                assert!((l - len).abs() < 1e-10);
            }
            assert!((g.total_length - 4.0 * len).abs() < 1e-10);
        }
    }

    #[test]
    fn segments_come_in_symmetric_quadruples() {
        for class in GeodesicClass::ALL {
            let g = construct_midpoint(class, &metric(0.5)).unwrap();
            let mut l = g.segment_lengths.clone();
            l.sort_by(f64::total_cmp);
            for group in l.chunks(4) {
                assert!(group[3] - group[0] < 1e-9, "{class}: {group:?}");
            }
        }
    }

    #[test]
    fn elliptic_holonomy_is_not_realizable() {
        // a loop around vertex 1 turns by the cone angle 3 alpha
        let r = solve_class(&cyclic("12,13,14"), &metric(0.5)).unwrap();
        assert_eq!(
            r,
            Realization::NotRealizable(NotRealizable::HolonomyNotHyperbolic(IsometryKind::Elliptic))
        );
    }

    #[test]
    fn axis_missing_an_edge_is_reported() {
        let r = solve_class(&cyclic("12,13,14,12,13,14,12,23,24"), &metric(0.5)).unwrap();
        match r {
            Realization::NotRealizable(NotRealizable::AxisMissesEdge(k)) => assert!(k < 9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn open_sequences_are_rejected() {
        let mut seq = canonical_sequence(GeodesicClass::G2);
        seq.cyclic = false;
        assert!(solve_class(&seq, &metric(0.5)).is_err());
    }

    #[test]
    fn three_edges_around_a_vertex_self_intersect() {
        // three edges at one vertex in a row
        for seq in ["12,13,14,24,34,14", "12,23,34,14,24,34,14", "12,13,14,12,23,24"] {
            let g = solve_class(&cyclic(seq), &metric(0.5)).unwrap().closed().unwrap();
            let (simple, points) = is_simple(&g).unwrap();
            assert!(!simple && !points.is_empty(), "{seq}");
            assert!(!g.simple);
        }
    }

    #[test]
    fn crossing_chords_intersect_once() {
        let p = |r: f64, th: f64| PlanePoint::from_polar(r, th);
        let x = segment_crossing(&p(1.0, 0.0), &p(1.0, PI), &p(1.0, PI / 2.0), &p(1.0, -PI / 2.0));
        assert!(x.unwrap().distance(&PlanePoint::ORIGIN) < 1e-12);
        // shared endpoint only
        assert!(segment_crossing(&p(1.0, 0.0), &p(1.0, 2.0), &p(1.0, 2.0), &p(1.0, 4.0)).is_none());
        // disjoint
        assert!(segment_crossing(&p(1.0, 0.0), &p(1.0, 0.5), &p(1.0, 2.0), &p(1.0, 4.0)).is_none());
    }

    #[test]
    fn point_segment_distance_construction() {
        let a = PlanePoint::from_polar(1.5, PI);
        let b = PlanePoint::from_polar(1.5, 0.0);
        for r in [0.01, 0.4, 2.0] {
            let v = PlanePoint::from_polar(r, PI / 2.0);
            assert!((point_segment_distance(&v, &a, &b).unwrap() - r).abs() < 1e-10);
        }
        // foot outside the segment: nearest endpoint
        let c = PlanePoint::from_polar(0.5, 0.0);
        let v = PlanePoint::from_polar(3.0, 0.1);
        let d = point_segment_distance(&v, &a, &c).unwrap();
        assert!((d - v.distance(&c)).abs() < 1e-12);
    }

    #[test]
    fn g2_is_equidistant_from_all_vertices() {
        let d = vertex_distances(&solve(GeodesicClass::G2, 0.4)).unwrap();
        for x in d.per_vertex {
            assert!((x - d.min).abs() < 1e-9);
        }
    }

    #[test]
    fn midpoint_pairs_are_opposite() {
        for class in [GeodesicClass::G2, GeodesicClass::G3] {
            let r = check_theorem1(&solve(class, 0.5));
            assert_eq!(r.verdict, Verdict::Holds);
            let want: Vec<(Edge, Edge)> = ["12", "13"]
                .iter()
                .map(|e| {
                    let e: Edge = e.parse().unwrap();
                    (e, e.opposite())
                })
                .collect();
            assert_eq!(r.pairs, want, "{class}");
        }
        let r = check_theorem1(&solve(GeodesicClass::G32, 0.5));
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.pairs.iter().all(|p| OPPOSITE_PAIRS.contains(&(p.0, p.1))));
    }

    #[test]
    fn midpoint_check_needs_a_simple_geodesic() {
        let g = solve_class(&cyclic("12,13,14,24,34,14"), &metric(0.5))
            .unwrap()
            .closed()
            .unwrap();
        assert_eq!(check_theorem1(&g).verdict, Verdict::NotApplicable);
        assert_eq!(check_theorem2(&g).verdict, Verdict::NotApplicable);
    }

    #[test]
    fn vertex_bound_margins() {
        for k in 1..=10 {
            let alpha = 0.1 * k as f64;
            let r = check_theorem2(&solve(GeodesicClass::G2, alpha.min(1.04)));
            assert_eq!(r.verdict, Verdict::Holds, "{alpha}: {r:?}");
            assert!(r.margin > 0.0);
        }
        let near = check_theorem2(&solve(GeodesicClass::G2, PI / 3.0 - 1e-4));
        assert!(near.rhs < 1e-3 && near.margin > 0.0);

        let mut g = solve(GeodesicClass::G3, 0.5);
        let bound = g.metric.theorem2_bound();
        g.min_vertex_distance = 0.9 * bound.critical_distance;
        assert_eq!(check_theorem2(&g).verdict, Verdict::Violated);
        g.min_vertex_distance = bound.critical_distance;
        assert_eq!(check_theorem2(&g).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn shooting_finds_only_the_axis() {
        let m = metric(0.7);
        let seq = canonical_sequence(GeodesicClass::G2);
        let r = perturbation_uniqueness(&seq, &m, 20, 11, 1e-8).unwrap();
        assert!(r.converged > 0);
        assert_eq!(r.converged + r.non_convergent, 20);
        assert_eq!(r.distinct, 0);
        assert!(r.max_deviation < 1e-8);

        let r = perturbation_uniqueness(&canonical_sequence(GeodesicClass::G32), &metric(0.3), 20, 5, 1e-8)
            .unwrap();
        assert!(r.converged > 0);
        assert_eq!(r.distinct, 0);
    }

    #[test]
    fn zero_trials_give_an_empty_report() {
        let r = perturbation_uniqueness(&cyclic("12,13,14"), &metric(0.5), 0, 1, 1e-8).unwrap();
        assert_eq!((r.trials, r.converged, r.non_convergent), (0, 0, 0));
    }

    #[test]
    fn shooting_residual_vanishes_on_the_axis() {
        let m = metric(0.5);
        for class in GeodesicClass::ALL {
            let seq = canonical_sequence(class);
            let g = solve(class, 0.5);
            let sh = Shooter::new(&seq, &m).unwrap();
            let t0 = g.crossings[0].t;
            let mid = g.crossings[(1 + seq.len() / 2) % seq.len()].t;
            let phi = sh.aim(t0, mid).unwrap();
            let r = sh.residual(t0, phi).unwrap();
            assert!(r[0].hypot(r[1]) < 1e-10, "{class}: {r:?}");
            let ts = sh.crossings(t0, phi).unwrap();
            assert!(ts.iter().zip(g.ts()).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn relabeling_is_equivariant() {
        for class in GeodesicClass::ALL {
            let g = solve(class, 0.45);
            for perm in rotation_group() {
                let seq = canonical_sequence(class).relabeled(&perm);
                let h = solve_class(&seq, &g.metric).unwrap().closed().unwrap();
                assert!((h.total_length - g.total_length).abs() < 1e-9);
                for (c, d) in g.crossings.iter().zip(&h.crossings) {
                    assert_eq!(c.edge.relabel(&perm), d.edge);
                    let flipped = perm[(c.edge.lower() - 1) as usize] > perm[(c.edge.upper() - 1) as usize];
                    let t = if flipped { 1.0 - c.t } else { c.t };
                    assert!((t - d.t).abs() < 1e-9, "{class} {perm:?}");
                }
            }
        }
    }
}
