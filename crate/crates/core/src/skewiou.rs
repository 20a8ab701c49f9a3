//! SkewIoU between rotated boxes.
//!
//! [`skewiou_polygon`] is exact for any pair of boxes (convex clipping plus
//! shoelace area) and is the ground truth used downstream. [`skewiou_closed`]
//! evaluates the two-branch closed form for two same-center, same-size boxes
//! of aspect ratio `k` whose angles differ by `delta_theta`.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::polygon;
use crate::rbox::RBox;

/// Relative (to the larger box diagonal) on-edge tolerance used when clipping.
pub const CLIP_REL_EPS: f64 = 1e-9;

fn field_order(a: &RBox, b: &RBox) -> std::cmp::Ordering {
    a.cx()
        .total_cmp(&b.cx())
        .then(a.cy().total_cmp(&b.cy()))
        .then(a.w().total_cmp(&b.w()))
        .then(a.h().total_cmp(&b.h()))
        .then(a.theta().total_cmp(&b.theta()))
}

/// Exact SkewIoU by convex polygon clipping. Symmetric bit-for-bit: the
/// arguments are put in a canonical order before clipping.
pub fn skewiou_polygon(a: &RBox, b: &RBox) -> f64 {
    let (a, b) = if field_order(a, b).is_gt() { (b, a) } else { (a, b) };
    if a == b {
        return 1.0;
    }
    let axis_aligned = |t: f64| t == 0.0 || t == 90.0;
    if axis_aligned(a.theta()) && axis_aligned(b.theta()) {
        return a.h_circumscribe().iou(&b.h_circumscribe());
    }
    let reach = (a.diagonal() + b.diagonal()) / 2.0;
    if (a.center() - b.center()).norm() > reach {
        return 0.0;
    }
    let eps = CLIP_REL_EPS * a.diagonal().max(b.diagonal());
    let qa = a.to_quad();
    let qb = b.to_quad();
    let inter = polygon::convex_intersection_area(qa.vertices(), qb.vertices(), eps);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Same-center, unit-height pair `(k x 1 at 0°, k x 1 at delta_theta)`.
pub fn same_center_pair(k: f64, delta_theta: f64) -> Result<(RBox, RBox)> {
    check_k(k)?;
    Ok((RBox::new(0.0, 0.0, k, 1.0, 0.0)?, RBox::new(0.0, 0.0, k, 1.0, delta_theta)?))
}

/// Polygon SkewIoU of the same-center pair for `(k, delta_theta)`.
pub fn skewiou_same_center(k: f64, delta_theta: f64) -> Result<f64> {
    let (a, b) = same_center_pair(k, delta_theta)?;
    Ok(skewiou_polygon(&a, &b))
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(domain(format!("aspect ratio must be finite and >= 1, got {k}")));
    }
    Ok(())
}

/// Critical angle `2 atan(1/k)` in degrees separating the closed-form branches.
pub fn critical_angle(k: f64) -> f64 {
    (2.0 * (1.0 / k).atan()).to_degrees()
}

/// Which branch of the closed form produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `delta_theta <= critical_angle(k)`.
    BelowCritical,
    /// `delta_theta > critical_angle(k)`.
    AboveCritical,
}

/// Closed-form same-center SkewIoU, clamped to `[0, 1]`.
pub fn skewiou_closed(k: f64, delta_theta: f64) -> Result<f64> {
    skewiou_closed_with_branch(k, delta_theta).map(|(v, _)| v)
}

/// Closed-form SkewIoU together with the branch that evaluated it.
///
/// At `delta_theta = 90` the first branch has `tan = inf`; that point is only
/// reachable on the first branch for `k = 1` where both branches equal 1, so it
/// is always evaluated by the second.
pub fn skewiou_closed_with_branch(k: f64, delta_theta: f64) -> Result<(f64, Branch)> {
    check_k(k)?;
    if !(0.0..=90.0).contains(&delta_theta) {
        return Err(domain(format!("angle deviation must lie in [0, 90], got {delta_theta}")));
    }
    if delta_theta == 0.0 {
        return Ok((1.0, Branch::BelowCritical));
    }
    let t = delta_theta.to_radians();
    if delta_theta <= critical_angle(k) && delta_theta < 90.0 {
        let tan_t = t.tan();
        let x = (1.0 - k * (t / 2.0).tan()).powi(2) * tan_t.powi(2);
        let y = ((-2.0 * (t / 2.0).sin().powi(2) + k * t.sin()) / t.cos()).powi(2);
        let v = (4.0 * k * tan_t - x - y) / (4.0 * k * tan_t + x + y);
        Ok((v.clamp(0.0, 1.0), Branch::BelowCritical))
    } else {
        let v = 4.0 / (8.0 * k * t.sin() - 4.0);
        Ok((v.clamp(0.0, 1.0), Branch::AboveCritical))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub delta_theta: f64,
    pub iou: f64,
}

/// Same-center SkewIoU sampled over `[0, 90]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IoUCurve {
    pub k: f64,
    pub samples: Vec<CurveSample>,
}

impl IoUCurve {
    pub fn min(&self) -> CurveSample {
        *self.samples.iter().min_by(|a, b| a.iou.total_cmp(&b.iou)).expect("curve has at least the 0° sample")
    }

    /// CSV with header `delta_theta,iou`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta_theta,iou\n");
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.delta_theta, s.iou));
        }
        out
    }
}

/// Samples the polygon SkewIoU at `0, step, 2 step, ...` and always at 90.
pub fn iou_curve(k: f64, step: f64) -> Result<IoUCurve> {
    check_k(k)?;
    if !(step > 0.0 && step <= 5.0) {
        return Err(domain(format!("step must lie in (0, 5], got {step}")));
    }
    let n = (90.0 / step + 1e-9).floor() as usize;
    let mut angles: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(90.0)).collect();
    if 90.0 - angles[n] > 1e-9 {
        angles.push(90.0);
    } else {
        angles[n] = 90.0;
    }
    let samples = angles
        .into_iter()
        .map(|d| Ok(CurveSample { delta_theta: d, iou: skewiou_same_center(k, d)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(IoUCurve { k, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinSkewIoU {
    pub min: f64,
    /// Degrees in `[0, 90]`.
    pub argmin: f64,
}

/// Minimum same-center SkewIoU over `[0, 90]`: 0.1° grid scan, then
/// golden-section refinement to 1e-4° around the best grid point.
pub fn min_skewiou(k: f64) -> Result<MinSkewIoU> {
    check_k(k)?;
    let f = |d: f64| skewiou_same_center(k, d).expect("k validated");
    let mut best = MinSkewIoU { min: f(0.0), argmin: 0.0 };
    for i in 1..=900 {
        let d = i as f64 / 10.0;
        let v = f(d);
        if v < best.min {
            best = MinSkewIoU { min: v, argmin: d };
        }
    }
    let (lo, hi) = ((best.argmin - 0.1).max(0.0), (best.argmin + 0.1).min(90.0));
    let refined = golden_section_min(&f, lo, hi, 1e-4);
    if refined.min < best.min {
        best = refined;
    }
    Ok(best)
}

fn golden_section_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> MinSkewIoU {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = (lo + hi) / 2.0;
    let candidates = [(f(mid), mid), (fc, c), (fd, d)];
    let (min, argmin) = candidates.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("non-empty");
    MinSkewIoU { min, argmin }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_boxes() {
        let b = RBox::new(3.0, -2.0, 10.0, 4.0, 33.0).unwrap();
        assert_eq!(skewiou_polygon(&b, &b), 1.0);
    }

    #[test]
    fn disjoint_boxes() {
        let a = RBox::new(0.0, 0.0, 10.0, 5.0, 30.0).unwrap();
        let b = RBox::new(1000.0, 0.0, 10.0, 5.0, 60.0).unwrap();
        assert_eq!(skewiou_polygon(&a, &b), 0.0);
    }

    #[test]
    fn quarter_turn_k2_is_one_third() {
        // intersection h^2, union h^2 (2k - 1)
        let v = skewiou_same_center(2.0, 90.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
        assert!((skewiou_closed(2.0, 90.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_edge_points() {
        assert_eq!(skewiou_closed(5.0, 0.0).unwrap(), 1.0);
        let (v, br) = skewiou_closed_with_branch(1.0, 90.0).unwrap();
        assert_eq!((v, br), (1.0, Branch::AboveCritical));
    }

    #[test]
    fn closed_form_domain_errors() {
        assert!(skewiou_closed(0.9, 10.0).is_err());
        assert!(skewiou_closed(2.0, -1.0).is_err());
        assert!(skewiou_closed(2.0, 90.5).is_err());
        assert!(skewiou_closed(f64::NAN, 10.0).is_err());
    }

    #[test]
    fn closed_form_tracks_oracle_across_critical_angle() {
        for k in [1.2, 2.0, 3.0, 8.0] {
            let c = critical_angle(k);
            for d in [c - 1e-3, c, c + 1e-3] {
                let closed = skewiou_closed(k, d).unwrap();
                let exact = skewiou_same_center(k, d).unwrap();
                assert!((closed - exact).abs() < 1e-6, "k={k} d={d}: {closed} vs {exact}");
            }
        }
    }

    #[test]
    fn square_curve_is_symmetric() {
        let curve = iou_curve(1.0, 1.0).unwrap();
        assert_eq!(curve.samples.len(), 91);
        assert_eq!(curve.samples[0], CurveSample { delta_theta: 0.0, iou: 1.0 });
        assert_eq!(curve.samples[90].iou, 1.0);
        for i in 0..=45 {
            let a = curve.samples[i].iou;
            let b = curve.samples[90 - i].iou;
            assert!((a - b).abs() < 1e-12, "{i}: {a} vs {b}");
        }
    }

    #[test]
    fn curve_always_ends_at_ninety() {
        let curve = iou_curve(2.0, 4.0).unwrap();
        assert_eq!(curve.samples.last().unwrap().delta_theta, 90.0);
        assert_eq!(curve.samples[22].delta_theta, 88.0);
        assert!(iou_curve(2.0, 0.0).is_err());
        assert!(iou_curve(2.0, 6.0).is_err());
    }

    #[test]
    fn k12_curve_stays_above_half() {
        let curve = iou_curve(1.2, 0.5).unwrap();
        assert!(curve.samples.iter().all(|s| s.iou >= 0.5));
    }

    #[test]
    fn k4_curve_crosses_half_near_19_9() {
        // shapely bisection: 19.923638556121798
        let curve = iou_curve(4.0, 0.1).unwrap();
        let first_below = curve.samples.iter().find(|s| s.iou < 0.5).unwrap();
        assert!((first_below.delta_theta - 20.0).abs() < 1e-9);
        assert!(skewiou_same_center(4.0, 19.92).unwrap() > 0.5);
        assert!(skewiou_same_center(4.0, 19.93).unwrap() < 0.5);
    }

    #[test]
    fn csv_layout() {
        let csv = iou_curve(1.0, 5.0).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "delta_theta,iou");
        assert_eq!(lines[1], "0,1");
        assert_eq!(*lines.last().unwrap(), "90,1");
        assert_eq!(lines.len(), 20);
    }

    #[test]
    fn min_for_square_is_inverse_sqrt2_at_45() {
        // Octagon intersection 2(sqrt2 - 1), union 2 - 2(sqrt2 - 1).
        let m = min_skewiou(1.0).unwrap();
        assert!((m.min - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9, "{m:?}");
        assert!((m.argmin - 45.0).abs() < 1e-3);
    }

    #[test]
    fn min_for_large_k_at_ninety() {
        let m = min_skewiou(8.0).unwrap();
        assert!((m.min - 1.0 / 15.0).abs() < 1e-12);
        assert!((m.argmin - 90.0).abs() < 1e-3);
        let m = min_skewiou(1.5).unwrap();
        assert!((m.min - 0.5).abs() < 1e-9);
    }

    #[test]
    fn min_for_interior_argmin() {
        // shapely 0.01° scan: 0.6920459745640457 at 48.25
        let m = min_skewiou(1.2).unwrap();
        assert!(m.min <= 0.6920459745640457 + 1e-12);
        assert!((m.min - 0.6920459745640457).abs() < 1e-6);
        assert!((m.argmin - 48.25).abs() < 0.05);
    }
}
