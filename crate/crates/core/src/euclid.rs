//! Closed geodesics on the flat regular tetrahedron, via the triangular lattice.
//!
//! The development of the flat tetrahedron is the unit triangular lattice.
//! In oblique coordinates `(u, v)` (basis `(1, 0)` and `(1/2, sqrt(3)/2)`)
//! lattice vertices are the integer points and the tetrahedron label of a
//! vertex depends only on the parities of `u` and `v`:
//!
//! | `v` \ `u` | even | odd |
//! |-----------|------|-----|
//! | even      | 2    | 1   |
//! | odd       | 3    | 4   |
//!
//! Equivalently, row `2k` carries labels 2 and 1 at integer `x`, row `2k+1`
//! carries 3 and 4 at half-integer `x`. The line of slope
//! `q sqrt(3) / (q + 2p)` through `(x0, 0)` is `u = x0 + (p/q) v`; one period
//! runs from `(x0, 0)` to `(x0 + 2p, 2q)`. All positions are exact rationals.

use num_integer::Integer;
use num_rational::Ratio;

use crate::development::CrossingSequence;
use crate::tetra::{Edge, Vertex};
use crate::{Error, Result};

pub type Q = Ratio<i64>;

/// Tetrahedron label of the lattice vertex `(u, v)`.
pub fn vertex_label(u: i64, v: i64) -> Vertex {
    match (u.rem_euclid(2), v.rem_euclid(2)) {
        (0, 0) => 2,
        (1, 0) => 1,
        (0, _) => 3,
        _ => 4,
    }
}

/// A line `y = q sqrt(3) / (q + 2p) (x - x0)` on the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeLine {
    pub p: i64,
    pub q: i64,
    pub x0: Q,
}

impl LatticeLine {
    pub fn slope(&self) -> f64 {
        self.q as f64 * 3f64.sqrt() / (self.q + 2 * self.p) as f64
    }
}

fn check_pair(p: i64, q: i64) -> Result<()> {
    if q < 1 || p < 0 || p.gcd(&q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    Ok(())
}

/// Builds the line for a coprime pair; `x0` is converted to the nearest
/// small rational.
pub fn line_for(p: i64, q: i64, x0: f64) -> Result<LatticeLine> {
    check_pair(p, q)?;
    let x0r = (x0 > 0.0 && x0 < 1.0)
        .then(|| Q::approximate_float(x0))
        .flatten()
        .ok_or(Error::Domain {
            what: "x0",
            value: x0,
            domain: "(0, 1)",
        })?;
    Ok(LatticeLine { p, q, x0: x0r })
}

/// The midline representative `x0 = 1/2`.
pub fn midline(p: i64, q: i64) -> Result<LatticeLine> {
    check_pair(p, q)?;
    Ok(LatticeLine { p, q, x0: Q::new(1, 2) })
}

/// Whether the midline of `(p, q)` misses every lattice vertex, by scanning
/// rows `|v| <= 4q(q + 2p)`.
pub fn vertex_avoidance(p: i64, q: i64) -> Result<bool> {
    check_pair(p, q)?;
    let rows = 4 * q * (q + 2 * p);
    // vertex (u, v) on the midline iff 2qu = 2pv + q
    Ok((-rows..=rows).all(|v| (2 * p * v + q) % (2 * q) != 0))
}

/// One crossing of a lattice edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeCrossing {
    pub edge: Edge,
    /// Position along the edge from its lower label.
    pub t: Q,
    /// Fraction of the period at which the crossing occurs.
    pub lambda: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub line: LatticeLine,
    pub periods: usize,
    pub crossings: Vec<LatticeCrossing>,
    pub sequence: CrossingSequence,
}

impl Trace {
    pub fn ts(&self) -> Vec<f64> {
        self.crossings.iter().map(|c| to_f64(c.t)).collect()
    }
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn floor(x: Q) -> i64 {
    x.floor().to_integer()
}

fn edge_between(a: (i64, i64), b: (i64, i64), frac: Q) -> LatticeCrossing {
    let (la, lb) = (vertex_label(a.0, a.1), vertex_label(b.0, b.1));
    let edge = Edge::new(la, lb).expect("adjacent lattice vertices carry distinct labels");
    let t = if la < lb { frac } else { Q::from_integer(1) - frac };
    LatticeCrossing { edge, t, lambda: Q::from_integer(0) }
}

/// Lattice edge crossed at period fraction `lambda`; errors on a vertex.
fn crossing_at(line: &LatticeLine, lambda: Q) -> Result<LatticeCrossing> {
    let u = line.x0 + lambda * (2 * line.p);
    let v = lambda * (2 * line.q);
    let hit = || Error::VertexHit {
        x: to_f64(u + v / 2),
        row: floor(v),
    };
    let mut c = if v.is_integer() {
        if u.is_integer() {
            return Err(hit());
        }
        let (i, j) = (floor(u), v.to_integer());
        edge_between((i, j), (i + 1, j), u.fract())
    } else if u.is_integer() {
        let (i, j) = (u.to_integer(), floor(v));
        edge_between((i, j), (i, j + 1), v.fract())
    } else if (u + v).is_integer() {
        let (m, j) = ((u + v).to_integer(), floor(v));
        edge_between((m - j, j), (m - j - 1, j + 1), v.fract())
    } else {
        return Err(Error::Degenerate("no lattice edge at this parameter"));
    };
    c.lambda = lambda;
    Ok(c)
}

/// Period fractions in `[0, 1)` at which the line meets a lattice line.
fn events(line: &LatticeLine) -> Vec<Q> {
    let (p, q, x0) = (line.p, line.q, line.x0);
    let mut out: Vec<Q> = (0..2 * q).map(|j| Q::new(j, 2 * q)).collect();
    let unit = |lo: Q, span: i64| -> Vec<Q> {
        // integers m in (lo, lo + span] give lambda = (m - lo) / span
        (floor(lo) + 1..=floor(lo) + span)
            .map(|m| (Q::from_integer(m) - lo) / span)
            .filter(|l| *l < Q::from_integer(1))
            .collect()
    };
    if p > 0 {
        out.extend(unit(x0, 2 * p));
    }
    out.extend(unit(x0, 2 * (p + q)));
    out.sort();
    out.dedup();
    out
}

/// Walks `periods` periods of the line and records every edge crossing.
pub fn trace(line: &LatticeLine, periods: usize) -> Result<Trace> {
    if periods == 0 {
        return Err(Error::Degenerate("trace needs at least one period"));
    }
    let one: Vec<LatticeCrossing> = events(line)
        .into_iter()
        .map(|l| crossing_at(line, l))
        .collect::<Result<_>>()?;
    let mut crossings = Vec::with_capacity(one.len() * periods);
    for k in 0..periods {
        crossings.extend(one.iter().map(|c| LatticeCrossing {
            lambda: c.lambda + k as i64,
            ..*c
        }));
    }
    let edges: Vec<Edge> = crossings.iter().map(|c| c.edge).collect();
    let sequence = CrossingSequence::cyclic_from_edges(&edges).map_err(|v| Error::InvalidSequence {
        index: v.index,
        kind: v.kind.to_string(),
    })?;
    Ok(Trace {
        line: *line,
        periods,
        crossings,
        sequence,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidpointLemmaReport {
    pub p: i64,
    pub q: i64,
    pub crossing_count: usize,
    /// Crossings at `t = 1/2`, with their period fractions.
    pub midpoints: Vec<(Q, Edge)>,
    pub at_quarters: bool,
    pub opposite_pairs: bool,
    pub holds: bool,
}

/// Traces the midline and checks that it crosses exactly four edge
/// midpoints, at period fractions 0, 1/4, 1/2, 3/4, on two distinct pairs of
/// opposite edges.
pub fn check_midpoint_lemma(p: i64, q: i64) -> Result<MidpointLemmaReport> {
    let tr = trace(&midline(p, q)?, 1)?;
    let half = Q::new(1, 2);
    let midpoints: Vec<(Q, Edge)> = tr
        .crossings
        .iter()
        .filter(|c| c.t == half)
        .map(|c| (c.lambda, c.edge))
        .collect();
    let at_quarters = midpoints.len() == 4 && midpoints.iter().enumerate().all(|(k, m)| m.0 == Q::new(k as i64, 4));
    let opposite_pairs = midpoints.len() == 4
        && midpoints[2].1 == midpoints[0].1.opposite()
        && midpoints[3].1 == midpoints[1].1.opposite()
        && midpoints[1].1 != midpoints[0].1
        && midpoints[1].1 != midpoints[2].1;
    Ok(MidpointLemmaReport {
        p,
        q,
        crossing_count: tr.crossings.len(),
        midpoints,
        at_quarters,
        opposite_pairs,
        holds: at_quarters && opposite_pairs,
    })
}

/// Label swap of the half-turn about the midpoint of `e`: the endpoints of
/// `e` are exchanged, and so are the endpoints of the opposite edge.
pub fn half_turn_labels(e: &Edge) -> [Vertex; 4] {
    let mut perm = [1, 2, 3, 4];
    for pair in [*e, e.opposite()] {
        let [a, b] = pair.vertices();
        perm[a as usize - 1] = b;
        perm[b as usize - 1] = a;
    }
    perm
}

fn relabel_crossing(c: &LatticeCrossing, perm: &[Vertex; 4]) -> (Edge, Q) {
    let [a, b] = c.edge.vertices();
    let e = c.edge.relabel(perm);
    let flipped = perm[a as usize - 1] > perm[b as usize - 1];
    (e, if flipped { Q::from_integer(1) - c.t } else { c.t })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuarterReport {
    pub p: i64,
    pub q: i64,
    /// Crossings in each quarter, the starting midpoint included.
    pub counts: [usize; 4],
    pub equal_counts: bool,
    /// Each quarter is the previous one reversed and relabeled by the
    /// half-turn about the midpoint between them.
    pub relabel_matches: bool,
    pub holds: bool,
}

/// Splits the midline period into quarters at its four midpoint crossings.
pub fn quarter_symmetry(p: i64, q: i64) -> Result<QuarterReport> {
    let tr = trace(&midline(p, q)?, 1)?;
    let quarter_of = |c: &LatticeCrossing| floor(c.lambda * 4) as usize;
    let mut quarters: [Vec<LatticeCrossing>; 4] = Default::default();
    for c in &tr.crossings {
        quarters[quarter_of(c).min(3)].push(*c);
    }
    let counts = [0, 1, 2, 3].map(|k| quarters[k].len());
    let equal_counts = counts.iter().all(|&c| c == counts[0]);
    let starts_at_midpoint = quarters
        .iter()
        .enumerate()
        .all(|(k, qu)| qu.first().is_some_and(|c| c.lambda == Q::new(k as i64, 4) && c.t == Q::new(1, 2)));
    let relabel_matches = equal_counts
        && starts_at_midpoint
        && (0..4).all(|k| {
            let next = &quarters[(k + 1) % 4];
            let perm = half_turn_labels(&next[0].edge);
            // interior of quarter k, reversed, maps onto the interior of quarter k+1
            let image: Vec<(Edge, Q)> = quarters[k][1..].iter().rev().map(|c| relabel_crossing(c, &perm)).collect();
            let target: Vec<(Edge, Q)> = next[1..].iter().map(|c| (c.edge, c.t)).collect();
            let start = relabel_crossing(&quarters[k][0], &perm);
            image == target && start == (quarters[(k + 2) % 4][0].edge, quarters[(k + 2) % 4][0].t)
        });
    Ok(QuarterReport {
        p,
        q,
        counts,
        equal_counts,
        relabel_matches,
        holds: equal_counts && relabel_matches,
    })
}

/// Coprime pairs `(p, q)` with `q` odd and `q + 2p <= max`, by increasing
/// `q + 2p`, then `p`.
pub fn survey_pairs(max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for n in 1..=max {
        for p in 0..=(n - 1) / 2 {
            let q = n - 2 * p;
            if q % 2 == 1 && p.gcd(&q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}
