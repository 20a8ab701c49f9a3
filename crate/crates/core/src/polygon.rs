//! Planar convex-polygon primitives: shoelace area, Sutherland–Hodgman
//! clipping, monotone-chain hull, rotating-calipers minimum-area rectangle.
//!
//! All polygons are vertex slices in counter-clockwise order unless noted.

use crate::rbox::Point;

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub fn shoelace_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    acc / 2.0
}

/// Signed distance of `p` to the directed line `a -> b`; positive on the left.
fn side(a: Point, b: Point, p: Point) -> f64 {
    let e = b - a;
    let len = e.norm();
    if len == 0.0 {
        return 0.0;
    }
    e.cross(p - a) / len
}

/// Clips `subject` against the convex polygon `clip` (both CCW).
///
/// A vertex within `eps` of a clip edge counts as inside. The result is the
/// (possibly empty) convex intersection polygon.
pub fn clip_convex(subject: &[Point], clip: &[Point], eps: f64) -> Vec<Point> {
    let mut output: Vec<Point> = subject.to_vec();
    let m = clip.len();
    let mut input = Vec::with_capacity(subject.len() + m);
    for i in 0..m {
        if output.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % m]);
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let n = input.len();
        for j in 0..n {
            let cur = input[j];
            let prev = input[(j + n - 1) % n];
            let d_cur = side(a, b, cur);
            let d_prev = side(a, b, prev);
            let cur_in = d_cur >= -eps;
            let prev_in = d_prev >= -eps;
            if cur_in {
                if !prev_in {
                    output.push(crossing(prev, cur, d_prev, d_cur));
                }
                output.push(cur);
            } else if prev_in {
                output.push(crossing(prev, cur, d_prev, d_cur));
            }
        }
    }
    output
}

fn crossing(p: Point, q: Point, dp: f64, dq: f64) -> Point {
    let denom = dp - dq;
    if denom == 0.0 {
        return p;
    }
    let t = dp / denom;
    p + (q - p) * t
}

/// Area of the intersection of two convex CCW polygons.
pub fn convex_intersection_area(a: &[Point], b: &[Point], eps: f64) -> f64 {
    shoelace_area(&clip_convex(a, b, eps)).max(0.0)
}

/// Convex hull (Andrew's monotone chain), CCW, collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Rectangle produced by [`min_area_rect`]; `width` lies along `angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub center: Point,
    pub width: f64,
    pub height: f64,
    /// Degrees, direction of the `width` side.
    pub angle: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// Minimum-area enclosing rectangle of a convex CCW hull by rotating calipers.
///
/// One side of the optimum is collinear with a hull edge; the three support
/// points (max along the edge, max along its normal, min along the edge)
/// advance monotonically as the edge index increases.
pub fn min_area_rect(hull: &[Point]) -> Option<Rect> {
    let n = hull.len();
    if n < 3 {
        return None;
    }
    let dir = |i: usize| {
        let e = hull[(i + 1) % n] - hull[i];
        e * (1.0 / e.norm())
    };
    let e0 = dir(0);
    let n0 = Point::new(-e0.y, e0.x);
    let argbest = |f: &dyn Fn(Point) -> f64| (0..n).max_by(|&a, &b| f(hull[a]).total_cmp(&f(hull[b]))).unwrap();
    let mut right = argbest(&|p| p.dot(e0));
    let mut top = argbest(&|p| p.dot(n0));
    let mut left = argbest(&|p| -p.dot(e0));

    let mut best: Option<Rect> = None;
    for i in 0..n {
        let e = dir(i);
        let nrm = Point::new(-e.y, e.x);
        for _ in 0..n {
            let next = (right + 1) % n;
            if hull[next].dot(e) > hull[right].dot(e) {
                right = next;
            } else {
                break;
            }
        }
        for _ in 0..n {
            let next = (top + 1) % n;
            if hull[next].dot(nrm) > hull[top].dot(nrm) {
                top = next;
            } else {
                break;
            }
        }
        for _ in 0..n {
            let next = (left + 1) % n;
            if hull[next].dot(e) < hull[left].dot(e) {
                left = next;
            } else {
                break;
            }
        }
        let origin = hull[i];
        let a_max = (hull[right] - origin).dot(e);
        let a_min = (hull[left] - origin).dot(e);
        let b_max = (hull[top] - origin).dot(nrm);
        let rect = Rect {
            center: origin + e * ((a_min + a_max) / 2.0) + nrm * (b_max / 2.0),
            width: a_max - a_min,
            height: b_max,
            angle: e.y.atan2(e.x).to_degrees(),
        };
        if best.is_none_or(|b| rect.area() < b.area()) {
            best = Some(rect);
        }
    }
    best
}

/// Containment in a convex CCW polygon with absolute edge tolerance `eps`.
pub fn convex_contains(poly: &[Point], p: Point, eps: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| side(poly[i], poly[(i + 1) % n], p) >= -eps)
}
