//! The regular tetrahedron `A1 A2 A3 A4`: labels, incidences and metric.
//!
//! Faces are congruent equilateral hyperbolic triangles with angle `alpha`
//! in `(0, pi/3)`. Their common side is `a = arcosh(cos alpha / (1 - cos alpha))`.

use crate::error::{Error, Result};
use crate::hyperbolic::PlanePoint;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub type Vertex = u8;

pub const VERTICES: [Vertex; 4] = [1, 2, 3, 4];

/// An edge as a sorted pair of distinct vertex labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Vertex, Vertex);

/// A face as a sorted triple of distinct vertex labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face([Vertex; 3]);

fn check_label(v: Vertex) -> Result<Vertex> {
    if (1..=4).contains(&v) {
        Ok(v)
    } else {
        Err(Error::UnknownLabel(v.to_string()))
    }
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex) -> Result<Self> {
        let (u, v) = (check_label(u)?, check_label(v)?);
        if u == v {
            return Err(Error::UnknownLabel(format!("{u}{v}")));
        }
        Ok(Edge(u.min(v), u.max(v)))
    }

    pub const fn lower(&self) -> Vertex {
        self.0
    }

    pub const fn upper(&self) -> Vertex {
        self.1
    }

    pub fn vertices(&self) -> [Vertex; 2] {
        [self.0, self.1]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn shares_vertex(&self, other: &Edge) -> bool {
        self.contains(other.0) || self.contains(other.1)
    }

    /// The edge with no common vertex.
    pub fn opposite(&self) -> Edge {
        let mut rest = VERTICES.into_iter().filter(|v| !self.contains(*v));
        Edge(rest.next().unwrap(), rest.next().unwrap())
    }

    /// The two faces containing the edge, in label order.
    pub fn faces(&self) -> [Face; 2] {
        let [w, z] = self.opposite().vertices();
        [
            Face::new(self.0, self.1, w).unwrap(),
            Face::new(self.0, self.1, z).unwrap(),
        ]
    }

    /// Applies a relabeling `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[Vertex; 4]) -> Edge {
        Edge::new(perm[self.0 as usize - 1], perm[self.1 as usize - 1]).unwrap()
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

fn parse_labels<const N: usize>(s: &str) -> Result<[Vertex; N]> {
    let digits: Vec<Vertex> = s
        .trim()
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as Vertex))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::UnknownLabel(s.to_string()))?;
    digits
        .try_into()
        .map_err(|_| Error::UnknownLabel(s.to_string()))
}

impl FromStr for Edge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let [u, v] = parse_labels::<2>(s)?;
        Edge::new(u, v)
    }
}

impl Face {
    pub fn new(u: Vertex, v: Vertex, w: Vertex) -> Result<Self> {
        let mut l = [check_label(u)?, check_label(v)?, check_label(w)?];
        l.sort_unstable();
        if l[0] == l[1] || l[1] == l[2] {
            return Err(Error::UnknownLabel(format!("{u}{v}{w}")));
        }
        Ok(Face(l))
    }

    /// The face opposite a vertex.
    pub fn opposite_vertex(v: Vertex) -> Result<Self> {
        check_label(v)?;
        let mut rest = VERTICES.into_iter().filter(|x| *x != v);
        Face::new(rest.next().unwrap(), rest.next().unwrap(), rest.next().unwrap())
    }

    pub fn vertices(&self) -> [Vertex; 3] {
        self.0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.contains(e.0) && self.contains(e.1)
    }

    pub fn edges(&self) -> [Edge; 3] {
        let [a, b, c] = self.0;
        [Edge(a, b), Edge(a, c), Edge(b, c)]
    }

    /// The vertex of the face not on `e`.
    pub fn apex(&self, e: &Edge) -> Option<Vertex> {
        if !self.contains_edge(e) {
            return None;
        }
        self.0.into_iter().find(|v| !e.contains(*v))
    }

    /// The vertex labels in counter-clockwise order as seen from outside,
    /// starting at the smallest label. Orientation is that of the boundary
    /// of the simplex `[1 2 3 4]`: `(1 2 4)`, `(1 3 2)`, `(1 4 3)`, `(2 3 4)`.
    pub fn oriented(&self) -> [Vertex; 3] {
        let [a, b, c] = self.0;
        match self.0 {
            [1, 2, 3] => [1, 3, 2],
            [1, 3, 4] => [1, 4, 3],
            _ => [a, b, c],
        }
    }

    pub fn relabel(&self, perm: &[Vertex; 4]) -> Face {
        let [a, b, c] = self.0.map(|v| perm[v as usize - 1]);
        Face::new(a, b, c).unwrap()
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for Face {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let [u, v, w] = parse_labels::<3>(s)?;
        Face::new(u, v, w)
    }
}

pub const EDGES: [Edge; 6] = [
    Edge(1, 2),
    Edge(1, 3),
    Edge(1, 4),
    Edge(2, 3),
    Edge(2, 4),
    Edge(3, 4),
];

pub const FACES: [Face; 4] = [Face([1, 2, 3]), Face([1, 2, 4]), Face([1, 3, 4]), Face([2, 3, 4])];

/// The three pairs of opposite edges.
pub const OPPOSITE_PAIRS: [(Edge, Edge); 3] = [
    (Edge(1, 2), Edge(3, 4)),
    (Edge(1, 3), Edge(2, 4)),
    (Edge(1, 4), Edge(2, 3)),
];

pub fn opposite_edge(e: &Edge) -> Edge {
    e.opposite()
}

pub fn faces_of_edge(e: &Edge) -> [Face; 2] {
    e.faces()
}

/// The face containing both edges, if any. Distinct edges sharing a vertex
/// span exactly one face; opposite edges span none.
pub fn common_face(e1: &Edge, e2: &Edge) -> Option<Face> {
    if e1 == e2 || !e1.shares_vertex(e2) {
        return None;
    }
    let mut l = [e1.0, e1.1, e2.0, e2.1];
    l.sort_unstable();
    let mut v: Vec<Vertex> = l.to_vec();
    v.dedup();
    Face::new(v[0], v[1], v[2]).ok()
}

/// The other face across `e`.
pub fn other_face(face: &Face, e: &Edge) -> Option<Face> {
    if !face.contains_edge(e) {
        return None;
    }
    e.faces().into_iter().find(|f| f != face)
}

/// The twelve orientation-preserving symmetries of the tetrahedron as
/// relabelings `v -> perm[v - 1]` (the even permutations).
pub fn rotation_group() -> Vec<[Vertex; 4]> {
    let mut out = Vec::with_capacity(12);
    for a in 1..=4u8 {
        for b in 1..=4u8 {
            for c in 1..=4u8 {
                for d in 1..=4u8 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if distinct && permutation_is_even(&p) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn permutation_is_even(p: &[Vertex; 4]) -> bool {
    let inversions = (0..4)
        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    inversions % 2 == 0
}

/// `arcosh(cos alpha / (1 - cos alpha))`.
pub fn edge_length(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let c = alpha.cos();
    Ok((c / (1.0 - c)).acosh())
}

/// `tanh a` in closed form, `sqrt(2 cos alpha - 1) / cos alpha`.
pub fn tanh_edge(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let c = alpha.cos();
    Ok((2.0 * c - 1.0).sqrt() / c)
}

/// Lower bound on vertex distances of simple closed geodesics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexDistanceBound {
    /// `cos(3 alpha / 2) tanh a`; `tanh d` must exceed it.
    pub rhs: f64,
    /// `artanh(rhs)`, the critical distance itself.
    pub critical_distance: f64,
}

pub fn theorem2_bound(alpha: f64) -> Result<VertexDistanceBound> {
    let rhs = (1.5 * alpha).cos() * tanh_edge(alpha)?;
    Ok(VertexDistanceBound {
        rhs,
        critical_distance: rhs.atanh(),
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < PI / 3.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "face angle",
            value: alpha,
            domain: "(0, pi/3)",
        })
    }
}

/// Face angle and edge length of a regular tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetraMetric {
    alpha: f64,
    a: f64,
}

impl TetraMetric {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(TetraMetric {
            alpha,
            a: edge_length(alpha)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn edge_length(&self) -> f64 {
        self.a
    }

    /// Total angle around a vertex, `3 alpha`.
    pub fn vertex_cone_angle(&self) -> f64 {
        3.0 * self.alpha
    }

    pub fn theorem2_bound(&self) -> VertexDistanceBound {
        theorem2_bound(self.alpha).unwrap()
    }

    /// Distance from the centre of a face to its corners,
    /// `arcosh(cot(pi/3) cot(alpha/2))`.
    pub fn circumradius(&self) -> f64 {
        ((1.0 / 3f64.sqrt()) / (self.alpha / 2.0).tan()).acosh()
    }

    /// Distance from the centre of a face to the midpoints of its sides.
    pub fn inradius(&self) -> f64 {
        (self.circumradius().tanh() / 2.0).atanh()
    }

    /// The canonical equilateral triangle, centred at the origin with slot 0
    /// on the positive x-axis and slots 1, 2 following counter-clockwise.
    pub fn canonical_triangle(&self) -> [PlanePoint; 3] {
        let r = self.circumradius();
        [0.0, 1.0, 2.0].map(|k| PlanePoint::from_polar(r, k * 2.0 * PI / 3.0))
    }

    pub fn face_chart(&self, face: Face) -> FaceChart {
        FaceChart {
            face,
            labels: face.oriented(),
            points: self.canonical_triangle(),
        }
    }
}

/// A face placed on the canonical triangle, its oriented labels matching
/// the counter-clockwise slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceChart {
    pub face: Face,
    pub labels: [Vertex; 3],
    pub points: [PlanePoint; 3],
}

impl FaceChart {
    pub fn slot(&self, v: Vertex) -> Option<usize> {
        self.labels.iter().position(|&l| l == v)
    }

    pub fn position(&self, v: Vertex) -> Option<PlanePoint> {
        self.slot(v).map(|i| self.points[i])
    }

    /// Point at fraction `t` along `e`, measured from its lower label.
    pub fn edge_point(&self, e: &Edge, t: f64) -> Option<PlanePoint> {
        let u = self.position(e.lower())?;
        let v = self.position(e.upper())?;
        u.lerp(&v, t).ok()
    }
}
