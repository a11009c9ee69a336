//! Self-intersections of geodesics on cones.
//!
//! A cone of full angle `alpha` is a plane sector of angle `alpha` with its
//! boundary rays identified. A geodesic at distance `d` from the apex, cut
//! along the generator opposite its foot, develops to a straight line.

use std::f64::consts::PI;

use crate::hyperbolic::PlanePoint;
use crate::{Error, Result};

/// Tolerance for deciding that `pi / alpha` is an integer.
pub const INTEGRALITY_TOL: f64 = 1e-12;

const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeGeometry {
    Hyperbolic,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub full_angle: f64,
    pub geometry: ConeGeometry,
}

impl Cone {
    pub fn new(full_angle: f64, geometry: ConeGeometry) -> Result<Self> {
        if !(full_angle > 0.0 && full_angle.is_finite()) {
            return Err(Error::Domain {
                what: "full_angle",
                value: full_angle,
                domain: "(0, inf)",
            });
        }
        Ok(Cone { full_angle, geometry })
    }

    pub fn hyperbolic(full_angle: f64) -> Result<Self> {
        Self::new(full_angle, ConeGeometry::Hyperbolic)
    }

    pub fn euclidean(full_angle: f64) -> Result<Self> {
        Self::new(full_angle, ConeGeometry::Euclidean)
    }
}

/// A geodesic on a cone, given by its distance from the apex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeGeodesicQuery {
    pub cone: Cone,
    pub d: f64,
}

impl ConeGeodesicQuery {
    pub fn new(cone: Cone, d: f64) -> Result<Self> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::Domain {
                what: "d",
                value: d,
                domain: "[0, inf)",
            });
        }
        Ok(ConeGeodesicQuery { cone, d })
    }
}

/// Number of self-intersections of a Euclidean cone geodesic:
/// `pi/alpha - 1` when `pi/alpha` is an integer, `floor(pi/alpha)` otherwise.
///
/// `full_angle` must be positive; other inputs give 0.
pub fn n_of(full_angle: f64) -> u64 {
    if full_angle.is_nan() || full_angle <= 0.0 {
        return 0;
    }
    let ratio = PI / full_angle;
    let nearest = ratio.round();
    if (ratio - nearest).abs() < INTEGRALITY_TOL {
        (nearest as u64).saturating_sub(1)
    } else {
        ratio.floor() as u64
    }
}

/// Apex distance `ln cot(m alpha / 4)` below which a hyperbolic cone geodesic
/// has at least `m` self-intersections.
pub fn threshold(full_angle: f64, m: u64) -> f64 {
    (1.0 / (m as f64 * full_angle / 4.0).tan()).ln()
}

/// Thresholds for `m = 1..=n_of(full_angle)`, strictly decreasing.
pub fn thresholds(full_angle: f64) -> Vec<f64> {
    if full_angle >= PI {
        return Vec::new();
    }
    (1..=n_of(full_angle)).map(|m| threshold(full_angle, m)).collect()
}

/// Closed-form self-intersection count on a hyperbolic cone.
pub fn count_hyperbolic(q: &ConeGeodesicQuery) -> Result<u64> {
    if q.cone.geometry != ConeGeometry::Hyperbolic {
        return Err(Error::Degenerate("count_hyperbolic needs a hyperbolic cone"));
    }
    let alpha = q.cone.full_angle;
    if alpha >= PI {
        return Ok(0);
    }
    let n = n_of(alpha);
    if n == 0 {
        return Ok(0);
    }
    if q.d < threshold(alpha, n) {
        return Ok(n);
    }
    for m in (1..n).rev() {
        if threshold(alpha, m + 1) <= q.d && q.d < threshold(alpha, m) {
            return Ok(m);
        }
    }
    Ok(0)
}

/// Closed-form self-intersection count on a Euclidean cone (independent of `d`).
pub fn count_euclidean(full_angle: f64) -> u64 {
    n_of(full_angle)
}

/// Dispatches on the cone geometry.
pub fn count(q: &ConeGeodesicQuery) -> Result<u64> {
    match q.cone.geometry {
        ConeGeometry::Hyperbolic => count_hyperbolic(q),
        ConeGeometry::Euclidean => Ok(count_euclidean(q.cone.full_angle)),
    }
}

/// The geodesic developed into the plane: the line `x = c` (Klein chord for
/// the hyperbolic plane), seen from the apex at polar angle `theta`.
struct DevelopedLine {
    geometry: ConeGeometry,
    d: f64,
    half_width: f64,
}

impl DevelopedLine {
    fn new(q: &ConeGeodesicQuery) -> Self {
        let half_width = match q.cone.geometry {
            ConeGeometry::Hyperbolic => q.d.tanh().acos(),
            ConeGeometry::Euclidean => PI / 2.0,
        };
        DevelopedLine {
            geometry: q.cone.geometry,
            d: q.d,
            half_width,
        }
    }

    /// Distance from the apex to the line point at polar angle `theta`.
    fn radius(&self, theta: f64) -> Option<f64> {
        if theta.abs() >= self.half_width {
            return None;
        }
        match self.geometry {
            ConeGeometry::Hyperbolic => {
                let c = self.d.tanh();
                let p = PlanePoint::from_klein(c, c * theta.tan()).ok()?;
                Some(p.distance(&PlanePoint::ORIGIN))
            }
            ConeGeometry::Euclidean => Some(self.d.hypot(self.d * theta.tan())),
        }
    }
}

/// Counts self-intersections by development.
///
/// Two points of the developed line glue to the same cone point when they
/// lie at equal distance from the apex and their polar angles differ by a
/// nonzero multiple of the full angle. Each multiple `k` is searched by
/// bisection on the radius mismatch.
pub fn brute_force_count(q: &ConeGeodesicQuery) -> Result<u64> {
    if q.d.is_nan() || q.d <= 0.0 {
        return Err(Error::Domain {
            what: "d",
            value: q.d,
            domain: "(0, inf)",
        });
    }
    let line = DevelopedLine::new(q);
    let beta = line.half_width;
    let alpha = q.cone.full_angle;
    let mut pairs = 0;
    let mut k = 1u64;
    while (k as f64) * alpha < 2.0 * PI {
        let shift = k as f64 * alpha;
        k += 1;
        // theta and theta - shift both inside (-beta, beta)
        let (lo, hi) = (shift - beta, beta);
        if lo >= hi {
            continue;
        }
        let mismatch = |theta: f64| -> Option<f64> {
            Some(line.radius(theta)? - line.radius(theta - shift)?)
        };
        let w = hi - lo;
        let (mut a, mut b) = (lo + 1e-3 * w, hi - 1e-3 * w);
        let (Some(fa), Some(fb)) = (mismatch(a), mismatch(b)) else {
            continue;
        };
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..BISECTION_STEPS {
            let m = 0.5 * (a + b);
            match mismatch(m) {
                Some(fm) if fm.signum() == fa.signum() => a = m,
                Some(_) => b = m,
                None => break,
            }
            if b - a <= f64::EPSILON * m.abs().max(1.0) {
                break;
            }
        }
        let theta = 0.5 * (a + b);
        if let (Some(r1), Some(r2)) = (line.radius(theta), line.radius(theta - shift)) {
            if (r1 - r2).abs() <= 1e-9 * r1.max(1.0) {
                pairs += 1;
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hyp(alpha: f64, d: f64) -> ConeGeodesicQuery {
        ConeGeodesicQuery::new(Cone::hyperbolic(alpha).unwrap(), d).unwrap()
    }

    #[test]
    fn n_of_cases() {
        assert_eq!(n_of(PI / 2.0), 1);
        assert_eq!(n_of(PI), 0);
        assert_eq!(n_of(2.0), 1);
        assert_eq!(n_of(4.0), 0);
        assert_eq!(n_of(0.9 * PI / 3.0), 3);
        assert_eq!(n_of(PI / 7.0), 6);
        assert_eq!(n_of(2.0 * PI), 0);
    }

    #[test]
    fn hyperbolic_counts() {
        assert_eq!(count_hyperbolic(&hyp(3.0 * PI / 2.0, 0.3)).unwrap(), 0);
        assert_eq!(count_hyperbolic(&hyp(PI / 2.0, 1.0)).unwrap(), 0);
        assert_eq!(count_hyperbolic(&hyp(PI / 2.0, 0.5)).unwrap(), 1);
        assert!((threshold(PI / 2.0, 1) - 0.881373587019543).abs() < 1e-12);
        let q = ConeGeodesicQuery::new(Cone::euclidean(1.0).unwrap(), 1.0).unwrap();
        assert!(count_hyperbolic(&q).is_err());
    }

    #[test]
    fn thresholds_decrease() {
        for alpha in [0.07, 0.3, 1.0, PI / 3.0, 3.0] {
            let t = thresholds(alpha);
            assert!(t.windows(2).all(|w| w[0] > w[1]), "{alpha}");
            assert!(t.iter().all(|x| x.is_finite() && *x > 0.0));
        }
    }

    #[test]
    fn brute_force_cases() {
        assert_eq!(brute_force_count(&hyp(1.0, threshold(1.0, 1) + 1e-6)).unwrap(), 0);
        assert_eq!(brute_force_count(&hyp(PI / 2.0, 0.5)).unwrap(), 1);
        for d in [0.01, 1.0, 30.0] {
            let q = ConeGeodesicQuery::new(Cone::euclidean(PI / 2.0).unwrap(), d).unwrap();
            assert_eq!(brute_force_count(&q).unwrap(), 1);
        }
        assert!(brute_force_count(&hyp(1.0, 0.0)).is_err());
    }

    #[test]
    fn closed_form_matches_development() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 200 {
            let alpha = rng.gen_range(0.05..3.2);
            let d = rng.gen_range(0.01..3.0);
            if thresholds(alpha).iter().any(|t| (d - t).abs() < 1e-6) {
                continue;
            }
            let q = hyp(alpha, d);
            assert_eq!(count_hyperbolic(&q).unwrap(), brute_force_count(&q).unwrap(), "{alpha} {d}");
            checked += 1;
        }
    }

    #[test]
    fn euclidean_brute_force_matches_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let alpha = rng.gen_range(0.05..7.0);
            let q = ConeGeodesicQuery::new(Cone::euclidean(alpha).unwrap(), rng.gen_range(0.01..3.0)).unwrap();
            assert_eq!(brute_force_count(&q).unwrap(), count_euclidean(alpha), "{alpha}");
        }
    }
}
