//! 2D primitives shared by the scene model and the constraint builder:
//! points, rotations, convex-quad overlap tests and separating planes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }
}

/// Rotation by angle theta, stored as (cos, sin) so poses can carry the
/// same representation the solver uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub cos: f64,
    pub sin: f64,
}

impl Rotation {
    pub fn from_angle(theta: f64) -> Self {
        Rotation {
            cos: theta.cos(),
            sin: theta.sin(),
        }
    }

    pub fn angle(self) -> f64 {
        self.sin.atan2(self.cos)
    }

    pub fn apply(self, p: Point2) -> Point2 {
        Point2::new(self.cos * p.x - self.sin * p.y, self.sin * p.x + self.cos * p.y)
    }
}

/// Convex polygon given by vertices in arbitrary (but consistent) order.
pub type Quad = [Point2; 4];

fn projection_range(poly: &[Point2], axis: Point2) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in poly {
        let d = p.dot(axis);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

fn candidate_axes(a: &[Point2], b: &[Point2]) -> Vec<Point2> {
    let mut axes = Vec::with_capacity(a.len() + b.len());
    for poly in [a, b] {
        for i in 0..poly.len() {
            let e = poly[(i + 1) % poly.len()].sub(poly[i]);
            let n = e.perp();
            let len = n.norm();
            if len > 1e-12 {
                axes.push(n.scale(1.0 / len));
            }
        }
    }
    axes
}

/// Separating-axis overlap test for convex polygons. Returns true when the
/// interiors overlap by more than `tol` along every candidate axis, i.e.
/// touching contact does not count as overlap.
pub fn polygons_overlap(a: &[Point2], b: &[Point2], tol: f64) -> bool {
    for axis in candidate_axes(a, b) {
        let (alo, ahi) = projection_range(a, axis);
        let (blo, bhi) = projection_range(b, axis);
        if ahi <= blo + tol || bhi <= alo + tol {
            return false;
        }
    }
    true
}

/// Signed clearance between two convex polygons: the largest separation
/// achievable over all edge-normal axes. Negative means overlap depth.
pub fn separation_gap(a: &[Point2], b: &[Point2]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for axis in candidate_axes(a, b) {
        let (alo, ahi) = projection_range(a, axis);
        let (blo, bhi) = projection_range(b, axis);
        let gap = (blo - ahi).max(alo - bhi);
        best = best.max(gap);
    }
    best
}

/// A separating (or supporting) plane `n . p = offset` with unit normal,
/// oriented so polygon `a` lies on the `<=` side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Point2,
    pub offset: f64,
}

impl Plane {
    pub fn eval(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Best separating plane between two disjoint (or touching) convex
/// polygons, found over the edge-normal axes. Returns None when the
/// polygons overlap by more than `tol`.
pub fn separating_plane(a: &[Point2], b: &[Point2], tol: f64) -> Option<Plane> {
    let mut best: Option<(f64, Point2, f64)> = None;
    for axis in candidate_axes(a, b) {
        let (alo, ahi) = projection_range(a, axis);
        let (blo, bhi) = projection_range(b, axis);
        // Orient the axis so `a` projects below `b`.
        let (gap, normal, offset) = if blo - ahi >= alo - bhi {
            (blo - ahi, axis, 0.5 * (ahi + blo))
        } else {
            (alo - bhi, axis.scale(-1.0), -0.5 * (bhi + alo))
        };
        if best.map_or(true, |(g, _, _)| gap > g) {
            best = Some((gap, normal, offset));
        }
    }
    let (gap, normal, offset) = best?;
    if gap < -tol {
        return None;
    }
    Some(Plane { normal, offset })
}

/// Plane through two points, unit normal, oriented so that `reference`
/// lies on the `<=` side. Used for lean contacts where the plane must
/// cross specific vertices. None if the points coincide.
pub fn plane_through(p: Point2, q: Point2, reference: Point2) -> Option<Plane> {
    let d = q.sub(p);
    let len = d.norm();
    if len < 1e-12 {
        return None;
    }
    let mut normal = d.perp().scale(1.0 / len);
    let mut offset = normal.dot(p);
    if normal.dot(reference) > offset {
        normal = normal.scale(-1.0);
        offset = -offset;
    }
    Some(Plane { normal, offset })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(cx: f64, cy: f64, half: f64) -> Vec<Point2> {
        vec![
            Point2::new(cx + half, cy + half),
            Point2::new(cx + half, cy - half),
            Point2::new(cx - half, cy - half),
            Point2::new(cx - half, cy + half),
        ]
    }

    #[test]
    fn disjoint_squares_do_not_overlap() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(3.0, 0.0, 1.0);
        assert!(!polygons_overlap(&a, &b, 1e-9));
        assert!(separation_gap(&a, &b) > 0.9);
    }

    #[test]
    fn coincident_squares_overlap() {
        let a = square(0.0, 0.0, 1.0);
        assert!(polygons_overlap(&a, &a, 1e-9));
    }

    #[test]
    fn touching_squares_do_not_overlap() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(2.0, 0.0, 1.0);
        assert!(!polygons_overlap(&a, &b, 1e-9));
        let plane = separating_plane(&a, &b, 1e-9).expect("touching squares separate");
        for p in &a {
            assert!(plane.eval(*p) <= 1e-9);
        }
        for p in &b {
            assert!(plane.eval(*p) >= -1e-9);
        }
    }

    #[test]
    fn separating_plane_is_unit_and_oriented() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(2.5, 1.0, 0.5);
        let plane = separating_plane(&a, &b, 1e-9).unwrap();
        assert!((plane.normal.norm() - 1.0).abs() < 1e-12);
        for p in &a {
            assert!(plane.eval(*p) <= 1e-9);
        }
        for p in &b {
            assert!(plane.eval(*p) >= -1e-9);
        }
    }

    #[test]
    fn rotation_roundtrip() {
        for k in 0..16 {
            let theta = -1.5 + 0.2 * k as f64;
            let r = Rotation::from_angle(theta);
            assert!((r.angle() - theta).abs() < 1e-12);
            let p = r.apply(Point2::new(1.0, 0.0));
            assert!((p.x - theta.cos()).abs() < 1e-12);
        }
    }
}
