//! Hyperbolic plane in the hyperboloid model.
//!
//! Points live on the upper sheet of `<p,p> = -1` in Minkowski 3-space with
//! the form `<u,v> = u.x v.x + u.y v.y - u.z v.z`. Geodesic lines are stored
//! by their unit spacelike pole `n`, the line being `{p : <p,n> = 0}`.
//! Isometries are 3x3 matrices preserving the form.
//!
//! The Beltrami-Klein disk is reached through `PlanePoint::klein`, where
//! geodesics become straight chords of the unit disk.

use crate::error::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

pub type Vec3 = Vector3<f64>;

/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for invariants of composed isometries.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Tolerance used when classifying isometries by eigenvalue gaps.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Trace gaps below this are treated as exactly parabolic.
const PARABOLIC_TRACE_GAP: f64 = 1e-13;

#[inline]
pub fn minkowski_dot(u: &Vec3, v: &Vec3) -> f64 {
    u.x * v.x + u.y * v.y - u.z * v.z
}

#[inline]
fn flip_time(v: Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, -v.z)
}

/// `J (u x v)`: the vector Minkowski-orthogonal to both `u` and `v`.
#[inline]
pub fn minkowski_cross(u: &Vec3, v: &Vec3) -> Vec3 {
    flip_time(u.cross(v))
}

fn gram() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))
}

/// A point of the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint(Vec3);

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint(Vector3::new(0.0, 0.0, 1.0));

    /// Lifts a point of the open Klein disk onto the hyperboloid.
    pub fn from_klein(kx: f64, ky: f64) -> Result<Self> {
        let r2 = kx * kx + ky * ky;
        if r2.is_nan() || r2 >= 1.0 {
            return Err(Error::Domain {
                what: "Klein radius squared",
                value: r2,
                domain: "[0, 1)",
            });
        }
        let z = 1.0 / (1.0 - r2).sqrt();
        Ok(PlanePoint(Vec3::new(kx * z, ky * z, z)))
    }

    /// Point at hyperbolic distance `r` from the origin in direction `theta`.
    pub fn from_polar(r: f64, theta: f64) -> Self {
        let s = r.sinh();
        PlanePoint(Vec3::new(s * theta.cos(), s * theta.sin(), r.cosh()))
    }

    /// Rescales a timelike vector onto the upper sheet.
    pub fn from_timelike(v: Vec3) -> Option<Self> {
        let q = minkowski_dot(&v, &v);
        if q.is_nan() || q >= 0.0 {
            return None;
        }
        let s = (-q).sqrt() * v.z.signum();
        Some(PlanePoint(v / s))
    }

    #[inline]
    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn klein(&self) -> (f64, f64) {
        (self.0.x / self.0.z, self.0.y / self.0.z)
    }

    /// `<p,p> + 1`, which is zero for a valid point.
    pub fn norm_defect(&self) -> f64 {
        minkowski_dot(&self.0, &self.0) + 1.0
    }

    /// `arcosh(-<p,q>)`, evaluated as `2 arsinh(|p - q| / 2)` which stays
    /// accurate for nearby points.
    pub fn distance(&self, other: &PlanePoint) -> f64 {
        let d = self.0 - other.0;
        2.0 * (minkowski_dot(&d, &d).max(0.0).sqrt() / 2.0).asinh()
    }

    /// Unit tangent at `self` pointing toward `other`.
    pub fn direction_to(&self, other: &PlanePoint) -> Result<Vec3> {
        let mut u = other.0 + minkowski_dot(&self.0, &other.0) * self.0;
        u += minkowski_dot(&self.0, &u) * self.0;
        let n2 = minkowski_dot(&u, &u);
        if self.distance(other) < ALGEBRAIC_TOL || n2.is_nan() || n2 <= 0.0 {
            return Err(Error::Degenerate("coincident points have no direction"));
        }
        Ok(u / n2.sqrt())
    }

    /// Moves along the geodesic leaving `self` with unit tangent `dir`.
    pub fn travel(&self, dir: &Vec3, s: f64) -> PlanePoint {
        PlanePoint(s.cosh() * self.0 + s.sinh() * dir)
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(&self, other: &PlanePoint, t: f64) -> Result<PlanePoint> {
        let dir = self.direction_to(other)?;
        Ok(self.travel(&dir, t * self.distance(other)))
    }
}

/// Hyperbolic distance; `arcosh(-<p,q>)` with the argument clamped to `>= 1`.
pub fn distance(p: &PlanePoint, q: &PlanePoint) -> f64 {
    p.distance(q)
}

/// A geodesic line `{p : <p,n> = 0}` with unit spacelike pole `n`.
///
/// The pole also orients the line: walking along `direction_at`, positive
/// `<p,n>` lies on the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicLine {
    pole: Vec3,
}

impl GeodesicLine {
    pub fn from_pole(pole: Vec3) -> Result<Self> {
        let q = minkowski_dot(&pole, &pole);
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::Degenerate("pole must be spacelike"));
        }
        Ok(GeodesicLine {
            pole: pole / q.sqrt(),
        })
    }

    /// The line through `p` and `q`, oriented from `p` to `q`.
    pub fn through(p: &PlanePoint, q: &PlanePoint) -> Result<Self> {
        if p.distance(q) < ALGEBRAIC_TOL {
            return Err(Error::Degenerate("line through coincident points"));
        }
        Self::from_pole(minkowski_cross(p.coords(), q.coords()))
    }

    /// The line through `p` with unit tangent `dir`.
    pub fn from_point_direction(p: &PlanePoint, dir: &Vec3) -> Result<Self> {
        Self::from_pole(minkowski_cross(p.coords(), dir))
    }

    #[inline]
    pub fn pole(&self) -> &Vec3 {
        &self.pole
    }

    pub fn reversed(&self) -> Self {
        GeodesicLine { pole: -self.pole }
    }

    /// `<p,n>`; its sign tells the side of the line, its arsinh the distance.
    pub fn side(&self, p: &PlanePoint) -> f64 {
        minkowski_dot(p.coords(), &self.pole)
    }

    pub fn distance_to(&self, p: &PlanePoint) -> f64 {
        self.side(p).abs().asinh()
    }

    /// Forward unit tangent of the oriented line at a point on it.
    pub fn direction_at(&self, p: &PlanePoint) -> Vec3 {
        minkowski_cross(&self.pole, p.coords())
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn foot(&self, p: &PlanePoint) -> PlanePoint {
        let v = p.coords() - self.side(p) * self.pole;
        PlanePoint::from_timelike(v).expect("projection onto a line is timelike")
    }

    /// Intersection point with another line, if the lines cross.
    pub fn intersection(&self, other: &GeodesicLine) -> Option<PlanePoint> {
        PlanePoint::from_timelike(minkowski_cross(&self.pole, &other.pole))
    }

    /// The Klein chord `n.x kx + n.y ky = n.z` as its two endpoints on the
    /// unit circle, ordered along the line's orientation.
    pub fn klein_chord(&self) -> ((f64, f64), (f64, f64)) {
        let n = self.pole;
        let h = (n.x * n.x + n.y * n.y).sqrt();
        let (ux, uy) = (n.x / h, n.y / h);
        let c = n.z / h;
        let half = (1.0 - c * c).max(0.0).sqrt();
        // the positive side of the pole is on the left of the direction
        let (tx, ty) = (uy, -ux);
        let (mx, my) = (c * ux, c * uy);
        (
            (mx - half * tx, my - half * ty),
            (mx + half * tx, my + half * ty),
        )
    }
}

/// An isometry of the hyperbolic plane, a matrix with `m^T J m = J` that
/// keeps the upper sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneIsometry {
    m: Matrix3<f64>,
}

impl PlaneIsometry {
    pub fn identity() -> Self {
        PlaneIsometry {
            m: Matrix3::identity(),
        }
    }

    /// Wraps a matrix after checking the Lorentz condition.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let g = PlaneIsometry { m };
        if g.lorentz_defect() > ISOMETRY_TOL || m[(2, 2)].is_nan() || m[(2, 2)] <= 0.0 {
            return Err(Error::Degenerate("matrix is not an isometry of the upper sheet"));
        }
        Ok(g)
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    /// The orientation-preserving isometry taking the origin to `p` and the
    /// x-axis direction at the origin to `dir`.
    pub fn frame(p: &PlanePoint, dir: &Vec3) -> Self {
        let perp = minkowski_cross(p.coords(), dir);
        PlaneIsometry {
            m: Matrix3::from_columns(&[*dir, perp, *p.coords()]),
        }
    }

    /// The orientation-preserving isometry with `g(a0) = a1` and `g(b0)` on
    /// the ray from `a1` toward `b1`. Exact when `|a0 b0| = |a1 b1|`.
    pub fn matching(
        a0: &PlanePoint,
        b0: &PlanePoint,
        a1: &PlanePoint,
        b1: &PlanePoint,
    ) -> Result<Self> {
        let src = Self::frame(a0, &a0.direction_to(b0)?);
        let dst = Self::frame(a1, &a1.direction_to(b1)?);
        Ok(dst.compose(&src.inverse()))
    }

    pub fn apply(&self, p: &PlanePoint) -> PlanePoint {
        PlanePoint(self.m * p.0)
    }

    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.m * v
    }

    /// Lines transform through their poles; reflections flip the orientation.
    pub fn apply_line(&self, l: &GeodesicLine) -> Result<GeodesicLine> {
        GeodesicLine::from_pole(self.m * l.pole * self.m.determinant().signum())
    }

    /// `J m^T J`.
    pub fn inverse(&self) -> Self {
        let j = gram();
        PlaneIsometry {
            m: j * self.m.transpose() * j,
        }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &PlaneIsometry) -> Self {
        let mut g = PlaneIsometry {
            m: self.m * other.m,
        };
        let scale = g.m.abs().max().max(1.0);
        if g.lorentz_defect() > ALGEBRAIC_TOL * scale * scale {
            g.renormalize();
        }
        g
    }

    /// Largest entry of `m^T J m - J`.
    pub fn lorentz_defect(&self) -> f64 {
        let j = gram();
        (self.m.transpose() * j * self.m - j).abs().max()
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    /// Sign of the determinant, read off the spatial minor: for a Lorentz
    /// matrix `det m * m22` equals that minor, which stays well conditioned
    /// when the entries are large.
    pub fn is_orientation_preserving(&self) -> bool {
        let m = &self.m;
        let minor = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        minor * m[(2, 2)] > 0.0
    }

    /// Gram-Schmidt with respect to `J`, starting from the timelike column.
    pub fn renormalize(&mut self) {
        let c2 = self.m.column(2).into_owned();
        let c2 = c2 / (-minkowski_dot(&c2, &c2)).sqrt();
        let mut c0 = self.m.column(0).into_owned();
        c0 += minkowski_dot(&c0, &c2) * c2;
        c0 /= minkowski_dot(&c0, &c0).sqrt();
        let mut c1 = self.m.column(1).into_owned();
        c1 += minkowski_dot(&c1, &c2) * c2;
        c1 -= minkowski_dot(&c1, &c0) * c0;
        c1 /= minkowski_dot(&c1, &c1).sqrt();
        self.m = Matrix3::from_columns(&[c0, c1, c2]);
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn distance_from_identity(&self) -> f64 {
        (self.m - Matrix3::identity()).abs().max()
    }
}

/// Translation by `t` along the x-axis through the origin.
pub fn boost(t: f64) -> PlaneIsometry {
    let (sh, ch) = (t.sinh(), t.cosh());
    PlaneIsometry {
        m: Matrix3::new(ch, 0.0, sh, 0.0, 1.0, 0.0, sh, 0.0, ch),
    }
}

/// Rotation by `theta` about the origin.
pub fn spin(theta: f64) -> PlaneIsometry {
    let (s, c) = theta.sin_cos();
    PlaneIsometry {
        m: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    }
}

/// Rotation by `theta` (counter-clockwise) about `center`.
pub fn rotation(center: &PlanePoint, theta: f64) -> PlaneIsometry {
    // any unit tangent works since rotations about a point commute
    let c = center.coords();
    let u = Vec3::new(1.0, 0.0, 0.0) + c.x * c;
    let f = PlaneIsometry::frame(center, &(u / (1.0 + c.x * c.x).sqrt()));
    let (s, c) = theta.sin_cos();
    let r = PlaneIsometry {
        m: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    };
    f.compose(&r).compose(&f.inverse())
}

/// Reflection in a line, `v -> v - 2<v,n>n`. Orientation-reversing.
pub fn reflection(line: &GeodesicLine) -> PlaneIsometry {
    let n = line.pole;
    let jn = flip_time(n);
    PlaneIsometry {
        m: Matrix3::identity() - 2.0 * n * jn.transpose(),
    }
}

pub fn compose(g: &PlaneIsometry, h: &PlaneIsometry) -> PlaneIsometry {
    g.compose(h)
}

/// Distance from the origin of the chord with angle of parallelism `beta`:
/// `ln cot(beta / 2)`.
pub fn parallelism_distance(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= PI / 2.0) {
        return Err(Error::Domain {
            what: "angle of parallelism",
            value: beta,
            domain: "(0, pi/2]",
        });
    }
    Ok((1.0 / (beta / 2.0).tan()).ln())
}

/// Angle at `p` of the hyperbolic triangle `q p r`, in `[0, pi]`.
pub fn angle_at(p: &PlanePoint, q: &PlanePoint, r: &PlanePoint) -> Result<f64> {
    Ok(signed_angle_at(p, q, r)?.abs())
}

/// Counter-clockwise angle at `p` from the direction of `q` to the direction
/// of `r`, in `(-pi, pi]`.
pub fn signed_angle_at(p: &PlanePoint, q: &PlanePoint, r: &PlanePoint) -> Result<f64> {
    let u = p.direction_to(q)?;
    let w = p.direction_to(r)?;
    Ok(tangent_angle(p, &u, &w))
}

/// Counter-clockwise angle between two unit tangents at `p`.
pub fn tangent_angle(p: &PlanePoint, u: &Vec3, w: &Vec3) -> f64 {
    let sin = Matrix3::from_columns(&[*u, *w, *p.coords()]).determinant();
    sin.atan2(minkowski_dot(u, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Conjugacy type of an orientation-preserving isometry. For hyperbolic
/// isometries `axis` is oriented along the translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub axis: Option<GeodesicLine>,
    pub translation_length: Option<f64>,
}

/// Classifies an orientation-preserving isometry by its trace.
///
/// `tr m = 1 + 2 cosh L` for a translation of length `L` and
/// `1 + 2 cos theta` for a rotation by `theta`.
pub fn classify(g: &PlaneIsometry) -> Result<IsometryClass> {
    if !g.is_orientation_preserving() {
        return Err(Error::Degenerate("classification needs an orientation-preserving isometry"));
    }
    if g.distance_from_identity() < ISOMETRY_TOL {
        return Ok(IsometryClass {
            kind: IsometryKind::Identity,
            axis: None,
            translation_length: None,
        });
    }
    let gap = g.trace() - 3.0;
    if gap.abs() <= PARABOLIC_TRACE_GAP {
        return Ok(IsometryClass {
            kind: IsometryKind::Parabolic,
            axis: None,
            translation_length: None,
        });
    }
    if gap.abs() <= CLASSIFY_TOL {
        return Err(Error::AmbiguousClassification { gap });
    }
    if gap < 0.0 {
        return Ok(IsometryClass {
            kind: IsometryKind::Elliptic,
            axis: None,
            translation_length: None,
        });
    }
    let length = ((g.trace() - 1.0) / 2.0).acosh();
    let lambda = length.exp();
    let m = g.m;
    let id = Matrix3::identity();
    let attracting = dominant_column(&((m - id) * (m - id / lambda)));
    let repelling = dominant_column(&((m - id) * (m - id * lambda)));
    let pole = minkowski_cross(&repelling, &attracting);
    let axis = GeodesicLine::from_pole(pole)?;
    Ok(IsometryClass {
        kind: IsometryKind::Hyperbolic,
        axis: Some(axis),
        translation_length: Some(length),
    })
}

/// Largest column of a rank-one matrix, scaled to point to the future.
fn dominant_column(m: &Matrix3<f64>) -> Vec3 {
    let c = (0..3)
        .map(|i| m.column(i).into_owned())
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let c = c / c.norm();
    if c.z < 0.0 {
        -c
    } else {
        c
    }
}
