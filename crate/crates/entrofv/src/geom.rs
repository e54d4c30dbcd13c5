//! Small 2D computational-geometry helpers shared by the mesh modules.

use nalgebra::{Matrix2, Vector2};

pub type Point = Vector2<f64>;
pub type Tensor = Matrix2<f64>;

/// Signed area of a polygon given in order (positive if counterclockwise).
pub fn polygon_signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

/// Centroid of a polygon (area-weighted).
pub fn polygon_centroid(pts: &[Point]) -> Point {
    let n = pts.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p.x * q.y - q.x * p.y;
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point::new(cx / (3.0 * a), cy / (3.0 * a))
}

/// Area of the triangle (a, b, c).
pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b - a).perp(&(c - a))).abs()
}

/// Circumcenter of the triangle (a, b, c); panics on degenerate triangles.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Point {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    assert!(d.abs() > f64::EPSILON, "degenerate triangle");
    let a2 = a.norm_squared();
    let b2 = b.norm_squared();
    let c2 = c.norm_squared();
    Point::new(
        (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
        (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
    )
}

/// Distance from `p` to the (infinite) line through `a`, `b`.
pub fn dist_point_line(p: Point, a: Point, b: Point) -> f64 {
    let t = b - a;
    (t.perp(&(p - a))).abs() / t.norm()
}

/// Whether `p` lies inside or on the boundary of the polygon (any orientation).
pub fn point_in_polygon(p: Point, pts: &[Point], tol: f64) -> bool {
    let orient = polygon_signed_area(pts).signum();
    let n = pts.len();
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let s = (b - a).perp(&(p - a)) * orient;
        if s < -tol * (b - a).norm() {
            return false;
        }
    }
    true
}

/// Intersection of segments (a1,a2) and (b1,b2); `None` if parallel.
pub fn segment_intersection(a1: Point, a2: Point, b1: Point, b2: Point) -> Option<Point> {
    let d1 = a2 - a1;
    let d2 = b2 - b1;
    let den = d1.perp(&d2);
    if den.abs() < 1e-300 {
        return None;
    }
    let t = (b1 - a1).perp(&d2) / den;
    Some(a1 + t * d1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_square_area_and_centroid() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_relative_eq!(polygon_signed_area(&sq), 1.0);
        let c = polygon_centroid(&sq);
        assert_relative_eq!(c.x, 0.5);
        assert_relative_eq!(c.y, 0.5);
    }

    #[test]
    fn circumcenter_equidistant() {
        let (a, b, c) = (
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.2),
            Point::new(0.3, 0.9),
        );
        let cc = circumcenter(a, b, c);
        let r = (cc - a).norm();
        assert_relative_eq!((cc - b).norm(), r, max_relative = 1e-12);
        assert_relative_eq!((cc - c).norm(), r, max_relative = 1e-12);
    }

    #[test]
    fn segment_intersection_basic() {
        let p = segment_intersection(
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        )
        .unwrap();
        assert_relative_eq!(p.x, 0.5);
        assert_relative_eq!(p.y, 0.5);
    }
}
