//! Reference geometry shared by the integration tests.

pub fn corners(cx: f64, cy: f64, w: f64, h: f64, theta_deg: f64) -> Vec<(f64, f64)> {
    let (s, c) = theta_deg.to_radians().sin_cos();
    [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)]
        .iter()
        .map(|&(a, b)| (cx + c * a * w - s * b * h, cy + s * a * w + c * b * h))
        .collect()
}

fn inside(poly: &[(f64, f64)], p: (f64, f64), eps: f64) -> bool {
    (0..poly.len()).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= -eps
    })
}

fn seg_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> Option<(f64, f64)> {
    let r = (b.0 - a.0, b.1 - a.1);
    let s = (d.0 - c.0, d.1 - c.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den.abs() < 1e-300 {
        return None;
    }
    let t = ((c.0 - a.0) * s.1 - (c.1 - a.1) * s.0) / den;
    let u = ((c.0 - a.0) * r.1 - (c.1 - a.1) * r.0) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((a.0 + t * r.0, a.1 + t * r.1))
}

/// Intersection area from the vertex set (inner corners plus edge crossings)
/// sorted by angle around its mean.
fn oracle_intersection(pa: &[(f64, f64)], pb: &[(f64, f64)]) -> f64 {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    pts.extend(pa.iter().filter(|p| inside(pb, **p, 1e-12)));
    pts.extend(pb.iter().filter(|p| inside(pa, **p, 1e-12)));
    for i in 0..pa.len() {
        for j in 0..pb.len() {
            if let Some(p) = seg_cross(pa[i], pa[(i + 1) % pa.len()], pb[j], pb[(j + 1) % pb.len()]) {
                pts.push(p);
            }
        }
    }
    if pts.len() < 3 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let m = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    pts.sort_by(|a, b| (a.1 - m.1).atan2(a.0 - m.0).total_cmp(&(b.1 - m.1).atan2(b.0 - m.0)));
    let mut area = 0.0;
    for i in 0..pts.len() {
        let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
        area += a.0 * b.1 - a.1 * b.0;
    }
    area.abs() / 2.0
}

pub fn oracle_iou(a: (f64, f64, f64, f64, f64), b: (f64, f64, f64, f64, f64)) -> f64 {
    let pa = corners(a.0, a.1, a.2, a.3, a.4);
    let pb = corners(b.0, b.1, b.2, b.3, b.4);
    let inter = oracle_intersection(&pa, &pb);
    inter / (a.2 * a.3 + b.2 * b.3 - inter)
}
