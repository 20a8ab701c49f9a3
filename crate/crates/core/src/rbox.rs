//! Rotated boxes, quadrilaterals and horizontal boxes.
//!
//! Boxes use the long-edge convention: `w >= h` and `theta` is the angle of
//! the long side measured counter-clockwise from the +x axis, in degrees,
//! wrapped into `[0, 180)`. One degree is one angle-label bin.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polygon;

/// Relative width/height gap under which a box is treated as a square.
pub const SQUARE_REL_EPS: f64 = 1e-9;

/// Area at or below which a quadrilateral is rejected as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Wraps an angle in degrees into `[0, 180)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(180.0);
    // rem_euclid rounds tiny negative inputs up to exactly 180.
    if r >= 180.0 {
        0.0
    } else {
        r
    }
}

/// Circular deviation between two angles under period 180, folded to `[0, 90]`.
pub fn angle_deviation(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(180.0);
    d.min(180.0 - d).max(0.0)
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90.
pub fn sin_cos_deg(theta: f64) -> (f64, f64) {
    let t = theta.rem_euclid(360.0);
    if t == 0.0 {
        (0.0, 1.0)
    } else if t == 90.0 {
        (1.0, 0.0)
    } else if t == 180.0 {
        (0.0, -1.0)
    } else if t == 270.0 {
        (-1.0, 0.0)
    } else {
        t.to_radians().sin_cos()
    }
}

/// Rotated rectangle in the long-edge convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RBox {
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
    theta: f64,
}

impl RBox {
    /// Builds a box from arbitrary side order and angle, normalizing to the
    /// long-edge convention. Squares have their angle reduced modulo 90.
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, theta: f64) -> Result<Self> {
        if ![cx, cy, w, h, theta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidBox(format!("non-finite field in ({cx}, {cy}, {w}, {h}, {theta})")));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::InvalidBox(format!("non-positive size {w} x {h}")));
        }
        let (w, h, theta) = if h > w { (h, w, theta + 90.0) } else { (w, h, theta) };
        let mut theta = wrap_angle(theta);
        if w - h <= SQUARE_REL_EPS * w {
            theta = theta.rem_euclid(90.0);
            if theta >= 90.0 {
                theta = 0.0;
            }
        }
        Ok(Self { cx, cy, w, h, theta })
    }

    pub fn cx(&self) -> f64 {
        self.cx
    }

    pub fn cy(&self) -> f64 {
        self.cy
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    /// Long side.
    pub fn w(&self) -> f64 {
        self.w
    }

    /// Short side.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Long-side angle in degrees, `[0, 180)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn diagonal(&self) -> f64 {
        self.w.hypot(self.h)
    }

    /// Aspect ratio `k = w / h >= 1`.
    pub fn aspect_ratio(&self) -> f64 {
        self.w / self.h
    }

    /// Same box with a different angle (re-normalized).
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.cx, self.cy, self.w, self.h, theta)
    }

    /// Corners rotated by `theta` about the center, counter-clockwise,
    /// starting from the local `(+w/2, +h/2)` corner.
    pub fn to_quad(&self) -> QuadPolygon {
        let (s, c) = sin_cos_deg(self.theta);
        let (hw, hh) = (self.w / 2.0, self.h / 2.0);
        let local = [(hw, hh), (-hw, hh), (-hw, -hh), (hw, -hh)];
        let vertices = local.map(|(lx, ly)| Point::new(self.cx + c * lx - s * ly, self.cy + s * lx + c * ly));
        QuadPolygon { vertices }
    }

    /// Minimum-area enclosing rectangle of `quad`, long-edge normalized.
    pub fn from_quad(quad: &QuadPolygon) -> Result<Self> {
        Self::from_points(&quad.vertices)
    }

    /// Minimum-area enclosing rectangle of arbitrary points (hull-based).
    pub fn from_points(points: &[Point]) -> Result<Self> {
        let hull = polygon::convex_hull(points);
        let area = polygon::shoelace_area(&hull).abs();
        if hull.len() < 3 || area <= DEGENERATE_AREA {
            return Err(Error::DegenerateQuad { area });
        }
        let rect = polygon::min_area_rect(&hull).ok_or(Error::DegenerateQuad { area })?;
        Self::new(rect.center.x, rect.center.y, rect.width, rect.height, rect.angle)
    }

    /// Smallest axis-aligned box containing all four corners.
    pub fn h_circumscribe(&self) -> HBox {
        let q = self.to_quad();
        let mut hb =
            HBox { xmin: f64::INFINITY, ymin: f64::INFINITY, xmax: f64::NEG_INFINITY, ymax: f64::NEG_INFINITY };
        for p in q.vertices {
            hb.xmin = hb.xmin.min(p.x);
            hb.ymin = hb.ymin.min(p.y);
            hb.xmax = hb.xmax.max(p.x);
            hb.ymax = hb.ymax.max(p.y);
        }
        hb
    }
}

/// Aspect ratio `k = w / h` of a box.
pub fn aspect_ratio(b: &RBox) -> f64 {
    b.aspect_ratio()
}

/// Convex quadrilateral with counter-clockwise vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadPolygon {
    vertices: [Point; 4],
}

impl QuadPolygon {
    /// Validates convexity, reordering clockwise input to counter-clockwise.
    /// Collinear consecutive edges are tolerated.
    pub fn new(vertices: [Point; 4]) -> Result<Self> {
        if !vertices.iter().all(|p| p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::InvalidBox("non-finite quad vertex".into()));
        }
        let area = polygon::shoelace_area(&vertices);
        if area.abs() <= DEGENERATE_AREA {
            return Err(Error::DegenerateQuad { area: area.abs() });
        }
        let mut v = vertices;
        if area < 0.0 {
            v.reverse();
        }
        let convex = (0..4).all(|i| {
            let e0 = v[(i + 1) % 4] - v[i];
            let e1 = v[(i + 2) % 4] - v[(i + 1) % 4];
            e0.cross(e1) >= 0.0
        });
        if !convex {
            return Err(Error::InvalidBox("quadrilateral is not convex".into()));
        }
        Ok(Self { vertices: v })
    }

    pub fn vertices(&self) -> &[Point; 4] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        polygon::shoelace_area(&self.vertices)
    }

    /// Point containment with tolerance `eps` (absolute distance to an edge).
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        polygon::convex_contains(&self.vertices, p, eps)
    }

    /// Flattened `x1 y1 x2 y2 x3 y3 x4 y4`.
    pub fn coords(&self) -> [f64; 8] {
        let v = &self.vertices;
        [v[0].x, v[0].y, v[1].x, v[1].y, v[2].x, v[2].y, v[3].x, v[3].y]
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl HBox {
    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin).max(0.0) * (self.ymax - self.ymin).max(0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn iou(&self, other: &HBox) -> f64 {
        let iw = self.xmax.min(other.xmax) - self.xmin.max(other.xmin);
        let ih = self.ymax.min(other.ymax) - self.ymin.max(other.ymin);
        if iw <= 0.0 || ih <= 0.0 {
            return 0.0;
        }
        let inter = iw * ih;
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            (inter / union).clamp(0.0, 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn same_vertex_set(got: &[Point; 4], want: &[(f64, f64)]) -> bool {
        want.iter().all(|&(x, y)| got.iter().any(|p| approx(p.x, x, 1e-12) && approx(p.y, y, 1e-12)))
    }

    #[test]
    fn to_quad_axis_aligned() {
        let q = RBox::new(0.0, 0.0, 4.0, 2.0, 0.0).unwrap().to_quad();
        assert_eq!(q.vertices()[0], Point::new(2.0, 1.0));
        assert!(same_vertex_set(q.vertices(), &[(2.0, 1.0), (-2.0, 1.0), (-2.0, -1.0), (2.0, -1.0)]));
        assert!(q.area() > 0.0);
    }

    #[test]
    fn to_quad_quarter_turn() {
        let q = RBox::new(0.0, 0.0, 4.0, 2.0, 90.0).unwrap().to_quad();
        assert!(same_vertex_set(q.vertices(), &[(-1.0, 2.0), (-1.0, -2.0), (1.0, -2.0), (1.0, 2.0)]));
    }

    #[test]
    fn to_quad_rotated_square_distances() {
        let b = RBox::new(1.0, 1.0, 2.0, 2.0, 45.0).unwrap();
        for p in b.to_quad().vertices() {
            assert!(approx((*p - b.center()).norm(), 2f64.sqrt(), 1e-12));
        }
    }

    #[test]
    fn new_normalizes_long_edge() {
        let b = RBox::new(0.0, 0.0, 2.0, 4.0, 10.0).unwrap();
        assert_eq!((b.w(), b.h(), b.theta()), (4.0, 2.0, 100.0));
        let b = RBox::new(0.0, 0.0, 4.0, 2.0, -30.0).unwrap();
        assert_eq!(b.theta(), 150.0);
        let sq = RBox::new(0.0, 0.0, 3.0, 3.0, 120.0).unwrap();
        assert_eq!(sq.theta(), 30.0);
    }

    #[test]
    fn new_rejects_bad_fields() {
        assert!(RBox::new(0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(RBox::new(0.0, 0.0, 1.0, -1.0, 0.0).is_err());
        assert!(RBox::new(f64::NAN, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(RBox::new(0.0, 0.0, 1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn from_quad_axis_aligned() {
        let q =
            QuadPolygon::new([Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(4.0, 2.0), Point::new(0.0, 2.0)])
                .unwrap();
        let b = RBox::from_quad(&q).unwrap();
        assert!(approx(b.cx(), 2.0, 1e-12) && approx(b.cy(), 1.0, 1e-12));
        assert!(approx(b.w(), 4.0, 1e-12) && approx(b.h(), 2.0, 1e-12));
        assert!(angle_deviation(b.theta(), 0.0) < 1e-9);
    }

    #[test]
    fn quad_clockwise_input_is_reordered() {
        let q =
            QuadPolygon::new([Point::new(0.0, 0.0), Point::new(0.0, 2.0), Point::new(4.0, 2.0), Point::new(4.0, 0.0)])
                .unwrap();
        assert!(q.area() > 0.0);
    }

    #[test]
    fn degenerate_quad_rejected() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0), Point::new(3.0, 3.0)];
        assert!(matches!(QuadPolygon::new(pts), Err(Error::DegenerateQuad { .. })));
        assert!(matches!(RBox::from_points(&pts), Err(Error::DegenerateQuad { .. })));
    }

    #[test]
    fn non_convex_quad_rejected() {
        let pts = [Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 4.0)];
        assert!(QuadPolygon::new(pts).is_err());
        // The hull-based route still yields a box.
        assert!(RBox::from_points(&pts).is_ok());
    }

    #[test]
    fn aspect_ratio_examples() {
        for (w, h, k) in [(4.0, 2.0, 2.0), (3.0, 3.0, 1.0), (7.0, 2.0, 3.5)] {
            assert_eq!(aspect_ratio(&RBox::new(0.0, 0.0, w, h, 0.0).unwrap()), k);
        }
    }

    #[test]
    fn h_circumscribe_examples() {
        let hb = RBox::new(0.0, 0.0, 4.0, 2.0, 0.0).unwrap().h_circumscribe();
        assert_eq!((hb.xmin, hb.ymin, hb.xmax, hb.ymax), (-2.0, -1.0, 2.0, 1.0));
        let hb = RBox::new(0.0, 0.0, 4.0, 2.0, 90.0).unwrap().h_circumscribe();
        assert_eq!((hb.xmin, hb.ymin, hb.xmax, hb.ymax), (-1.0, -2.0, 1.0, 2.0));
        let s = 2.0 * 2f64.sqrt();
        let hb = RBox::new(0.0, 0.0, s, s, 45.0).unwrap().h_circumscribe();
        for (got, want) in [(hb.xmin, -2.0), (hb.ymin, -2.0), (hb.xmax, 2.0), (hb.ymax, 2.0)] {
            assert!(approx(got, want, 1e-12));
        }
    }

    #[test]
    fn angle_deviation_examples() {
        assert_eq!(angle_deviation(10.0, 30.0), 20.0);
        assert_eq!(angle_deviation(175.0, 5.0), 10.0);
        assert_eq!(angle_deviation(0.0, 90.0), 90.0);
        assert_eq!(angle_deviation(-10.0, 370.0), 20.0);
    }

    #[test]
    fn wrap_angle_handles_tiny_negatives() {
        assert_eq!(wrap_angle(-1e-18), 0.0);
        assert_eq!(wrap_angle(190.0), 10.0);
        assert_eq!(wrap_angle(180.0), 0.0);
    }

    #[test]
    fn hbox_iou_basics() {
        let a = HBox { xmin: 0.0, ymin: 0.0, xmax: 2.0, ymax: 2.0 };
        let b = HBox { xmin: 1.0, ymin: 0.0, xmax: 3.0, ymax: 2.0 };
        assert!(approx(a.iou(&b), 1.0 / 3.0, 1e-15));
        let c = HBox { xmin: 5.0, ymin: 5.0, xmax: 6.0, ymax: 6.0 };
        assert_eq!(a.iou(&c), 0.0);
    }
}
