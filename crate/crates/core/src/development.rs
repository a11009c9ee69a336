//! Unfolding strips of tetrahedron faces into the hyperbolic plane.
//!
//! A [`CrossingSequence`] lists, step by step, the face a geodesic runs
//! through and the edge it leaves by. Developing it chains the edge-gluing
//! isometries between face charts. For a cyclic sequence the placement of
//! the repeated first face, relative to the first placement, is the
//! holonomy of the strip.

use crate::error::{Error, Result};
use crate::hyperbolic::{boost, spin, PlaneIsometry, PlanePoint};
use crate::tetra::{common_face, other_face, Edge, Face, TetraMetric, Vertex};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub face: Face,
    pub exit: Edge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    Empty,
    ExitNotInFace,
    /// The next face is not the face across the previous exit edge.
    FaceMismatch,
    /// The step leaves through the edge it entered by.
    Backtrack,
    /// Token that failed to parse.
    Parse(String),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::Empty => write!(f, "empty"),
            ViolationKind::ExitNotInFace => write!(f, "exit edge is not an edge of the face"),
            ViolationKind::FaceMismatch => write!(f, "face is not across the previous exit edge"),
            ViolationKind::Backtrack => write!(f, "leaves through the edge it entered by"),
            ViolationKind::Parse(tok) => write!(f, "cannot parse token {tok:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::InvalidSequence {
            index: v.index,
            kind: v.kind.to_string(),
        }
    }
}

/// Faces and exit edges met by a geodesic, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingSequence {
    pub steps: Vec<Step>,
    pub cyclic: bool,
}

impl CrossingSequence {
    pub fn new(steps: Vec<Step>, cyclic: bool) -> Self {
        CrossingSequence { steps, cyclic }
    }

    /// Cyclic sequence from its crossed edges; the face of step `i` is the
    /// face spanned by edges `i - 1` and `i`.
    pub fn cyclic_from_edges(edges: &[Edge]) -> std::result::Result<Self, Violation> {
        let n = edges.len();
        if n == 0 {
            return Err(Violation {
                index: 0,
                kind: ViolationKind::Empty,
            });
        }
        let steps = (0..n)
            .map(|i| {
                let prev = edges[(i + n - 1) % n];
                let face = common_face(&prev, &edges[i]).ok_or(Violation {
                    index: i,
                    kind: if prev == edges[i] {
                        ViolationKind::Backtrack
                    } else {
                        ViolationKind::FaceMismatch
                    },
                })?;
                Ok(Step {
                    face,
                    exit: edges[i],
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let seq = CrossingSequence::new(steps, true);
        seq.validate()?;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.steps.iter().map(|s| s.exit).collect()
    }

    pub fn faces(&self) -> Vec<Face> {
        self.steps.iter().map(|s| s.face).collect()
    }

    /// Checks that each exit edge lies on its face, that the next face is
    /// across that edge, and that no step backtracks.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.steps.len();
        if n == 0 {
            return Err(Violation {
                index: 0,
                kind: ViolationKind::Empty,
            });
        }
        for (i, step) in self.steps.iter().enumerate() {
            if !step.face.contains_edge(&step.exit) {
                return Err(Violation {
                    index: i,
                    kind: ViolationKind::ExitNotInFace,
                });
            }
        }
        let links = if self.cyclic { n } else { n - 1 };
        for i in 0..links {
            let cur = &self.steps[i];
            let next = &self.steps[(i + 1) % n];
            if other_face(&cur.face, &cur.exit) != Some(next.face) {
                return Err(Violation {
                    index: (i + 1) % n,
                    kind: ViolationKind::FaceMismatch,
                });
            }
            if next.exit == cur.exit {
                return Err(Violation {
                    index: (i + 1) % n,
                    kind: ViolationKind::Backtrack,
                });
            }
        }
        Ok(())
    }

    /// The same cycle started at step `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut steps = self.steps.clone();
        steps.rotate_left(k % self.steps.len().max(1));
        CrossingSequence::new(steps, self.cyclic)
    }

    pub fn relabeled(&self, perm: &[Vertex; 4]) -> Self {
        let steps = self
            .steps
            .iter()
            .map(|s| Step {
                face: s.face.relabel(perm),
                exit: s.exit.relabel(perm),
            })
            .collect();
        CrossingSequence::new(steps, self.cyclic)
    }

    /// Token form `exit:entered_face,...`, each token naming a crossed edge
    /// and the face entered through it.
    pub fn to_tokens(&self) -> String {
        let n = self.steps.len();
        (0..n)
            .map(|i| format!("{}:{}", self.steps[i].exit, self.steps[(i + 1) % n].face))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the token form of a cyclic sequence.
    pub fn parse_tokens(s: &str) -> std::result::Result<Self, Violation> {
        let mut edges = Vec::new();
        let mut entered = Vec::new();
        for (i, tok) in s.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
            let bad = || Violation {
                index: i,
                kind: ViolationKind::Parse(tok.to_string()),
            };
            let (e, f) = tok.split_once(':').ok_or_else(bad)?;
            edges.push(Edge::from_str(e).map_err(|_| bad())?);
            entered.push(Face::from_str(f).map_err(|_| bad())?);
        }
        let n = edges.len();
        if n == 0 {
            return Err(Violation {
                index: 0,
                kind: ViolationKind::Empty,
            });
        }
        let steps = (0..n)
            .map(|i| Step {
                face: entered[(i + n - 1) % n],
                exit: edges[i],
            })
            .collect();
        let seq = CrossingSequence::new(steps, true);
        seq.validate()?;
        Ok(seq)
    }
}

impl fmt::Display for CrossingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tokens())
    }
}

/// The three combinatorial classes with explicit constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeodesicClass {
    G2,
    G3,
    G32,
}

impl GeodesicClass {
    pub const ALL: [GeodesicClass; 3] = [GeodesicClass::G2, GeodesicClass::G3, GeodesicClass::G32];

    pub fn name(&self) -> &'static str {
        match self {
            GeodesicClass::G2 => "g2",
            GeodesicClass::G3 => "g3",
            GeodesicClass::G32 => "g32",
        }
    }

    /// Crossed edges of one period. The midpoint-carrying edges 12, 13, 34,
    /// 24 come at [`Self::anchor_positions`].
    pub fn edge_cycle(&self) -> Vec<Edge> {
        let labels: &[&str] = match self {
            GeodesicClass::G2 => &["12", "13", "34", "24"],
            GeodesicClass::G3 => &["12", "14", "13", "23", "34", "14", "24", "23"],
            GeodesicClass::G32 => &[
                "12", "24", "23", "13", "14", "24", "34", "13", "23", "24", "14", "13",
            ],
        };
        labels.iter().map(|s| s.parse().unwrap()).collect()
    }

    /// Indices of the crossings through edge midpoints.
    pub fn anchor_positions(&self) -> [usize; 4] {
        match self {
            GeodesicClass::G2 => [0, 1, 2, 3],
            GeodesicClass::G3 => [0, 2, 4, 6],
            GeodesicClass::G32 => [0, 3, 6, 9],
        }
    }
}

impl FromStr for GeodesicClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g2" => Ok(GeodesicClass::G2),
            "g3" => Ok(GeodesicClass::G3),
            "g32" => Ok(GeodesicClass::G32),
            _ => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}

impl fmt::Display for GeodesicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn canonical_sequence(class: GeodesicClass) -> CrossingSequence {
    CrossingSequence::cyclic_from_edges(&class.edge_cycle()).expect("canonical cycles are valid")
}

/// An exit edge as placed in the development.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevelopedEdge {
    pub edge: Edge,
    /// Image of the lower-labeled endpoint.
    pub lower: PlanePoint,
    pub upper: PlanePoint,
}

impl DevelopedEdge {
    pub fn point_at(&self, t: f64) -> Result<PlanePoint> {
        self.lower.lerp(&self.upper, t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Development {
    pub metric: TetraMetric,
    pub faces: Vec<Face>,
    /// Maps the canonical chart of step `i`'s face to its developed place.
    pub placements: Vec<PlaneIsometry>,
    /// Exit edge of step `i` in developed position.
    pub developed_edges: Vec<DevelopedEdge>,
    /// Placement of the repeated first face; only for cyclic sequences.
    pub holonomy: Option<PlaneIsometry>,
}

/// The orientation-preserving isometry carrying the chart of `to` onto the
/// chart of `from` so that the shared edge `e` matches label by label.
pub fn gluing(metric: &TetraMetric, from: Face, to: Face, e: &Edge) -> Result<PlaneIsometry> {
    let src = metric.face_chart(to);
    let dst = metric.face_chart(from);
    let slot = |c: &crate::tetra::FaceChart, v| {
        c.slot(v)
            .ok_or_else(|| Error::UnknownLabel(format!("{v} not on face {}", c.face)))
    };
    let (au, aw) = (slot(&dst, e.lower())?, slot(&dst, e.upper())?);
    let (bu, bw) = (slot(&src, e.lower())?, slot(&src, e.upper())?);
    if (bw + 3 - bu) % 3 != (au + 3 - aw) % 3 {
        return Err(Error::Degenerate("faces induce the same orientation on their edge"));
    }
    // side from slot s to slot s + 1 has its midpoint at angle (2s + 1) pi / 3
    let s = if (aw + 3 - au) % 3 == 1 { au } else { aw };
    let phi = (2 * s + 1) as f64 * PI / 3.0;
    let half_turn = spin(phi)
        .compose(&boost(2.0 * metric.inradius()))
        .compose(&spin(PI - phi));
    let turn = (aw + 3 - bu) % 3;
    Ok(half_turn.compose(&spin(turn as f64 * 2.0 * PI / 3.0)))
}

/// Beyond this many steps placements are renormalized every 8 compositions.
pub const LONG_DEVELOPMENT: usize = 64;

/// Develops the faces of `seq` in order, starting from the identity chart.
pub fn develop(seq: &CrossingSequence, metric: &TetraMetric) -> Result<Development> {
    seq.validate()?;
    let n = seq.len();
    let mut placements = Vec::with_capacity(n);
    let mut developed_edges = Vec::with_capacity(n);
    let mut g = PlaneIsometry::identity();
    let mut holonomy = None;
    for i in 0..n {
        let step = seq.steps[i];
        let chart = metric.face_chart(step.face);
        developed_edges.push(DevelopedEdge {
            edge: step.exit,
            lower: g.apply(&chart.position(step.exit.lower()).unwrap()),
            upper: g.apply(&chart.position(step.exit.upper()).unwrap()),
        });
        placements.push(g);
        if i + 1 < n || seq.cyclic {
            let next = seq.steps[(i + 1) % n].face;
            g = g.compose(&gluing(metric, step.face, next, &step.exit)?);
            if n > LONG_DEVELOPMENT && (i + 1) % 8 == 0 {
                g.renormalize();
            }
        }
    }
    if seq.cyclic {
        holonomy = Some(g.compose(&placements[0].inverse()));
    }
    Ok(Development {
        metric: *metric,
        faces: seq.faces(),
        placements,
        developed_edges,
        holonomy,
    })
}

impl Development {
    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// Developed position of vertex `v` of step `i`'s face.
    pub fn vertex(&self, i: usize, v: Vertex) -> Option<PlanePoint> {
        let chart = self.metric.face_chart(self.faces[i]);
        chart.position(v).map(|p| self.placements[i].apply(&p))
    }

    /// Developed corners of step `i`'s face, in chart slot order.
    pub fn triangle(&self, i: usize) -> [PlanePoint; 3] {
        self.metric
            .canonical_triangle()
            .map(|p| self.placements[i].apply(&p))
    }

    /// Largest endpoint mismatch of shared exit edges between consecutive
    /// placed faces, and whether every pair lies on opposite sides.
    pub fn seam_report(&self) -> (f64, bool) {
        let mut mismatch: f64 = 0.0;
        let mut opposite = true;
        for i in 0..self.len().saturating_sub(1) {
            let e = self.developed_edges[i];
            for v in e.edge.vertices() {
                let here = self.vertex(i, v).unwrap();
                let there = self.vertex(i + 1, v).unwrap();
                mismatch = mismatch.max(here.distance(&there));
            }
            let a = self.vertex(i, self.faces[i].apex(&e.edge).unwrap()).unwrap();
            let b = self.vertex(i + 1, self.faces[i + 1].apex(&e.edge).unwrap()).unwrap();
            opposite &= crate::hyperbolic::GeodesicLine::through(&e.lower, &e.upper)
                .is_ok_and(|line| line.side(&a) * line.side(&b) < 0.0);
        }
        (mismatch, opposite)
    }
}
