//! Rotated deformable attention sampling.
//!
//! Offsets are in box-normalized units: `(±0.5, ±0.5)` spans the reference
//! box. They are scaled by `(w, h)` first and then rotated by the box angle,
//! so the unit square maps onto the rotated rectangle. Sampling is bilinear
//! with zero padding outside `[0, W-1] x [0, H-1]`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rbox::{sin_cos_deg, Point, RBox};

/// Tolerance on the sum of attention weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Row-major `H x W x C` feature map.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrid {
    height: usize,
    width: usize,
    channels: usize,
    values: Vec<f64>,
}

impl FeatureGrid {
    pub fn new(height: usize, width: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if height < 2 || width < 2 || channels < 1 {
            return Err(Error::Dimension(format!("grid must be at least 2x2x1, got {height}x{width}x{channels}")));
        }
        if values.len() != height * width * channels {
            return Err(Error::Dimension(format!(
                "expected {} values, got {}",
                height * width * channels,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("grid values must be finite"));
        }
        Ok(Self { height, width, channels, values })
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    values.push(f(y, x, c));
                }
            }
        }
        Self::new(height, width, channels, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Value at integer cell `(x, y)`, zero outside the grid.
    pub fn at(&self, x: i64, y: i64, c: usize) -> f64 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return 0.0;
        }
        self.values[(y as usize * self.width + x as usize) * self.channels + c]
    }
}

/// Reference box, per-point offsets and attention weights for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSpec {
    reference: RBox,
    offsets: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl SamplingSpec {
    pub fn new(reference: RBox, offsets: Vec<(f64, f64)>, weights: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Dimension("need at least one sampling point".into()));
        }
        if offsets.len() != weights.len() {
            return Err(Error::Dimension(format!("{} offsets but {} weights", offsets.len(), weights.len())));
        }
        if offsets.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(domain("offsets must be finite"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(domain("attention weights must be finite and >= 0"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(domain(format!("attention weights must sum to 1, got {sum}")));
        }
        Ok(Self { reference, offsets, weights })
    }

    pub fn reference(&self) -> &RBox {
        &self.reference
    }

    pub fn offsets(&self) -> &[(f64, f64)] {
        &self.offsets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// `p = c + R(theta) (ox w, oy h)` for each offset.
pub fn rotated_sampling_points(reference: &RBox, offsets: &[(f64, f64)]) -> Vec<Point> {
    let (s, c) = sin_cos_deg(reference.theta());
    offsets
        .iter()
        .map(|&(ox, oy)| {
            let (lx, ly) = (ox * reference.w(), oy * reference.h());
            Point::new(reference.cx() + c * lx - s * ly, reference.cy() + s * lx + c * ly)
        })
        .collect()
}

/// Placement that ignores the box angle (plain deformable attention).
pub fn horizontal_sampling_points(reference: &RBox, offsets: &[(f64, f64)]) -> Vec<Point> {
    offsets
        .iter()
        .map(|&(ox, oy)| Point::new(reference.cx() + ox * reference.w(), reference.cy() + oy * reference.h()))
        .collect()
}

/// Interpolated value and its partial derivatives, one entry per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSample {
    pub value: Vec<f64>,
    pub d_x: Vec<f64>,
    pub d_y: Vec<f64>,
}

/// Bilinear interpolation at `(x, y)` (column, row) with zero padding.
///
/// On cell boundaries the derivative is the one-sided (forward) difference of
/// the cell whose lower corner is `floor(x), floor(y)`.
pub fn bilinear_sample(grid: &FeatureGrid, x: f64, y: f64) -> BilinearSample {
    let ch = grid.channels;
    let mut out = BilinearSample { value: vec![0.0; ch], d_x: vec![0.0; ch], d_y: vec![0.0; ch] };
    if !x.is_finite() || !y.is_finite() {
        return out;
    }
    let (x0f, y0f) = (x.floor(), y.floor());
    if x0f < -1.0 || y0f < -1.0 || x0f > grid.width as f64 || y0f > grid.height as f64 {
        return out;
    }
    let (x0, y0) = (x0f as i64, y0f as i64);
    let (fx, fy) = (x - x0f, y - y0f);
    for c in 0..ch {
        let v00 = grid.at(x0, y0, c);
        let v10 = grid.at(x0 + 1, y0, c);
        let v01 = grid.at(x0, y0 + 1, c);
        let v11 = grid.at(x0 + 1, y0 + 1, c);
        out.value[c] = (1.0 - fx) * (1.0 - fy) * v00 + fx * (1.0 - fy) * v10 + (1.0 - fx) * fy * v01 + fx * fy * v11;
        out.d_x[c] = (1.0 - fy) * (v10 - v00) + fy * (v11 - v01);
        out.d_y[c] = (1.0 - fx) * (v01 - v00) + fx * (v11 - v10);
    }
    out
}

/// Jacobian of the output with respect to one sampling point's parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointGrad {
    pub d_ox: Vec<f64>,
    pub d_oy: Vec<f64>,
    pub d_weight: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RdaOutput {
    /// One value per channel.
    pub output: Vec<f64>,
    /// Indexed `[level][point]`.
    pub grads: Vec<Vec<PointGrad>>,
}

/// Weighted sum of bilinear samples at the rotated points of every level,
/// with gradients through the (per-reference constant) rotation.
#[allow(clippy::needless_range_loop)]
pub fn rda_forward(grids: &[FeatureGrid], specs: &[SamplingSpec]) -> Result<RdaOutput> {
    if grids.len() != specs.len() {
        return Err(Error::Dimension(format!("{} grids but {} sampling specs", grids.len(), specs.len())));
    }
    let Some(first) = grids.first() else {
        return Err(Error::Dimension("need at least one level".into()));
    };
    let ch = first.channels;
    if let Some(g) = grids.iter().find(|g| g.channels != ch) {
        return Err(Error::Dimension(format!("channel mismatch: {} vs {ch}", g.channels)));
    }
    let mut output = vec![0.0; ch];
    let mut grads = Vec::with_capacity(grids.len());
    for (grid, spec) in grids.iter().zip(specs) {
        let r = &spec.reference;
        let (s, c) = sin_cos_deg(r.theta());
        // d p / d ox and d p / d oy
        let dp_dox = (c * r.w(), s * r.w());
        let dp_doy = (-s * r.h(), c * r.h());
        let points = rotated_sampling_points(r, &spec.offsets);
        let mut level = Vec::with_capacity(points.len());
        for (p, &w) in points.iter().zip(&spec.weights) {
            let smp = bilinear_sample(grid, p.x, p.y);
            let mut g = PointGrad { d_ox: vec![0.0; ch], d_oy: vec![0.0; ch], d_weight: vec![0.0; ch] };
            for k in 0..ch {
                output[k] += w * smp.value[k];
                g.d_ox[k] = w * (smp.d_x[k] * dp_dox.0 + smp.d_y[k] * dp_dox.1);
                g.d_oy[k] = w * (smp.d_x[k] * dp_doy.0 + smp.d_y[k] * dp_doy.1);
                g.d_weight[k] = smp.value[k];
            }
            level.push(g);
        }
        grads.push(level);
    }
    Ok(RdaOutput { output, grads })
}

/// Fraction of `points` inside the reference quad (1.0 for no points).
pub fn alignment_score(reference: &RBox, points: &[Point]) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    let quad = reference.to_quad();
    let inside = points.iter().filter(|p| quad.contains(**p, 1e-9)).count();
    inside as f64 / points.len() as f64
}

pub mod gradcheck {
    //! Finite-difference verification of [`rda_forward`](super::rda_forward)
    //! gradients on random instances.

    use serde::Serialize;

    use super::*;
    use crate::dnoise::NoiseRng;

    /// Points closer than this to an integer grid line are resampled: the
    /// bilinear surface has kinks there.
    pub const KINK_MARGIN: f64 = 1e-2;

    #[derive(Debug, Clone, Serialize)]
    pub struct GradCheckReport {
        pub instances: usize,
        pub step: f64,
        pub tolerance: f64,
        pub max_rel_error_offsets: f64,
        pub max_rel_error_weights: f64,
        pub passed: bool,
    }

    /// `|a - n| / max(|a|, |n|, 1e-6)`.
    pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
        (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
    }

    fn near_kink(v: f64) -> bool {
        (v - v.round()).abs() < KINK_MARGIN
    }

    /// Random multi-level instance with O(1) values whose sampling points
    /// all sit inside smooth bilinear patches.
    pub fn random_instance(rng: &mut NoiseRng) -> (Vec<FeatureGrid>, Vec<SamplingSpec>) {
        let levels = 1 + (rng.next_u64() % 3) as usize;
        let channels = 1 + (rng.next_u64() % 3) as usize;
        let points = 1 + (rng.next_u64() % 4) as usize;
        let mut grids = Vec::with_capacity(levels);
        let mut specs = Vec::with_capacity(levels);
        for _ in 0..levels {
            let h = 6 + (rng.next_u64() % 10) as usize;
            let w = 6 + (rng.next_u64() % 10) as usize;
            let values = (0..h * w * channels).map(|_| rng.next_symmetric()).collect();
            grids.push(FeatureGrid::new(h, w, channels, values).expect("valid grid"));
            loop {
                let reference = RBox::new(
                    w as f64 * (0.3 + 0.4 * rng.next_open01()),
                    h as f64 * (0.3 + 0.4 * rng.next_open01()),
                    1.0 + 3.0 * rng.next_open01(),
                    1.0 + 3.0 * rng.next_open01(),
                    180.0 * rng.next_open01(),
                )
                .expect("valid box");
                let offsets: Vec<(f64, f64)> =
                    (0..points).map(|_| (rng.next_symmetric(), rng.next_symmetric())).collect();
                let raw: Vec<f64> = (0..points).map(|_| rng.next_open01()).collect();
                let total: f64 = raw.iter().sum();
                let mut weights: Vec<f64> = raw.iter().map(|v| v / total).collect();
                let head: f64 = weights[..points - 1].iter().sum();
                weights[points - 1] = (1.0 - head).max(0.0);
                let pts = rotated_sampling_points(&reference, &offsets);
                if pts.iter().any(|p| near_kink(p.x) || near_kink(p.y)) {
                    continue;
                }
                specs.push(SamplingSpec::new(reference, offsets, weights).expect("valid spec"));
                break;
            }
        }
        (grids, specs)
    }

    /// Compares every analytic component against central differences.
    pub fn check_instance(grids: &[FeatureGrid], specs: &[SamplingSpec], step: f64) -> Result<(f64, f64)> {
        let base = rda_forward(grids, specs)?;
        let eval = |specs: &[SamplingSpec]| -> Result<Vec<f64>> { Ok(rda_forward(grids, specs)?.output) };
        let (mut max_off, mut max_w) = (0.0f64, 0.0f64);
        for (l, spec) in specs.iter().enumerate() {
            for p in 0..spec.len() {
                for param in 0..3 {
                    let perturbed = |delta: f64| {
                        let mut sp = specs.to_vec();
                        match param {
                            0 => sp[l].offsets[p].0 += delta,
                            1 => sp[l].offsets[p].1 += delta,
                            _ => sp[l].weights[p] += delta,
                        }
                        sp
                    };
                    let plus = eval(&perturbed(step))?;
                    let minus = eval(&perturbed(-step))?;
                    let g = &base.grads[l][p];
                    let analytic = match param {
                        0 => &g.d_ox,
                        1 => &g.d_oy,
                        _ => &g.d_weight,
                    };
                    for c in 0..plus.len() {
                        let numeric = (plus[c] - minus[c]) / (2.0 * step);
                        let err = relative_error(analytic[c], numeric);
                        if param < 2 {
                            max_off = max_off.max(err);
                        } else {
                            max_w = max_w.max(err);
                        }
                    }
                }
            }
        }
        Ok((max_off, max_w))
    }

    pub fn run_suite(instances: usize, seed: u64, step: f64, tolerance: f64) -> Result<GradCheckReport> {
        let mut rng = NoiseRng::seed_from_u64(seed);
        let (mut max_off, mut max_w) = (0.0f64, 0.0f64);
        for _ in 0..instances {
            let (grids, specs) = random_instance(&mut rng);
            let (o, w) = check_instance(&grids, &specs, step)?;
            max_off = max_off.max(o);
            max_w = max_w.max(w);
        }
        Ok(GradCheckReport {
            instances,
            step,
            tolerance,
            max_rel_error_offsets: max_off,
            max_rel_error_weights: max_w,
            passed: max_off <= tolerance && max_w <= tolerance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_grid() -> FeatureGrid {
        FeatureGrid::from_fn(5, 6, 2, |y, x, c| (10 * y + x) as f64 + 100.0 * c as f64).unwrap()
    }

    #[test]
    fn points_axis_aligned_and_quarter_turn() {
        let r0 = RBox::new(0.0, 0.0, 4.0, 2.0, 0.0).unwrap();
        assert_eq!(rotated_sampling_points(&r0, &[(0.5, 0.0)]), vec![Point::new(2.0, 0.0)]);
        let r90 = RBox::new(0.0, 0.0, 4.0, 2.0, 90.0).unwrap();
        assert_eq!(rotated_sampling_points(&r90, &[(0.5, 0.0)]), vec![Point::new(0.0, 2.0)]);
    }

    #[test]
    fn zero_angle_matches_horizontal() {
        let r = RBox::new(3.0, 4.0, 6.0, 2.0, 0.0).unwrap();
        let offs = [(0.1, -0.3), (-0.5, 0.5), (0.7, 0.2)];
        assert_eq!(rotated_sampling_points(&r, &offs), horizontal_sampling_points(&r, &offs));
    }

    #[test]
    fn bilinear_at_nodes_and_midpoint() {
        let g = ramp_grid();
        let s = bilinear_sample(&g, 2.0, 3.0);
        assert_eq!(s.value, vec![32.0, 132.0]);
        assert_eq!(s.d_x, vec![1.0, 1.0]);
        assert_eq!(s.d_y, vec![10.0, 10.0]);
        let m = bilinear_sample(&g, 2.5, 3.5);
        let mean = (32.0 + 33.0 + 42.0 + 43.0) / 4.0;
        assert_eq!(m.value[0], mean);
    }

    #[test]
    fn bilinear_zero_padding() {
        let g = FeatureGrid::from_fn(3, 3, 1, |_, _, _| 1.0).unwrap();
        assert_eq!(bilinear_sample(&g, -5.0, 1.0).value, vec![0.0]);
        assert_eq!(bilinear_sample(&g, 1.0, 40.0).value, vec![0.0]);
        // half a cell past the last column: half the support is padding
        assert!((bilinear_sample(&g, 2.5, 1.0).value[0] - 0.5).abs() < 1e-15);
        assert!((bilinear_sample(&g, -0.5, 1.0).value[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_validation() {
        assert!(FeatureGrid::new(1, 4, 1, vec![0.0; 4]).is_err());
        assert!(FeatureGrid::new(2, 2, 0, vec![]).is_err());
        assert!(FeatureGrid::new(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(FeatureGrid::new(2, 2, 1, vec![0.0, 1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn spec_validation() {
        let r = RBox::new(0.0, 0.0, 2.0, 1.0, 0.0).unwrap();
        assert!(SamplingSpec::new(r, vec![], vec![]).is_err());
        assert!(SamplingSpec::new(r, vec![(0.0, 0.0)], vec![0.5]).is_err());
        assert!(SamplingSpec::new(r, vec![(0.0, 0.0); 2], vec![1.5, -0.5]).is_err());
        assert!(SamplingSpec::new(r, vec![(0.0, 0.0); 2], vec![0.5]).is_err());
        assert!(SamplingSpec::new(r, vec![(0.0, 0.0); 2], vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn single_point_forward_is_a_sample() {
        let g = ramp_grid();
        let r = RBox::new(2.3, 1.7, 2.0, 1.0, 0.0).unwrap();
        let spec = SamplingSpec::new(r, vec![(0.1, 0.2)], vec![1.0]).unwrap();
        let out = rda_forward(std::slice::from_ref(&g), &[spec]).unwrap();
        let s = bilinear_sample(&g, 2.3 + 0.2, 1.7 + 0.2);
        assert_eq!(out.output, s.value);
    }

    #[test]
    fn constant_grid_gives_constant() {
        let g = FeatureGrid::from_fn(8, 8, 1, |_, _, _| 2.5).unwrap();
        let r = RBox::new(4.0, 4.0, 3.0, 2.0, 33.0).unwrap();
        let offs = vec![(0.1, 0.2), (-0.3, 0.4), (0.45, -0.45), (0.0, 0.0)];
        let spec = SamplingSpec::new(r, offs, vec![0.25; 4]).unwrap();
        let out = rda_forward(&[g], &[spec]).unwrap();
        assert!((out.output[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn forward_errors() {
        let g1 = FeatureGrid::from_fn(3, 3, 1, |_, _, _| 0.0).unwrap();
        let g2 = FeatureGrid::from_fn(3, 3, 2, |_, _, _| 0.0).unwrap();
        let r = RBox::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let spec = SamplingSpec::new(r, vec![(0.0, 0.0)], vec![1.0]).unwrap();
        assert!(rda_forward(&[g1.clone(), g2], &[spec.clone(), spec.clone()]).is_err());
        assert!(rda_forward(&[g1], &[]).is_err());
        assert!(rda_forward(&[], &[]).is_err());
    }

    #[test]
    fn alignment_cases() {
        let r = RBox::new(10.0, 10.0, 8.0, 2.0, 45.0).unwrap();
        let corners = [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)];
        assert_eq!(alignment_score(&r, &rotated_sampling_points(&r, &corners)), 1.0);
        assert!(alignment_score(&r, &horizontal_sampling_points(&r, &corners)) < 1.0);
        assert_eq!(alignment_score(&r, &[]), 1.0);
    }

    #[test]
    fn gradcheck_suite_passes() {
        let report = gradcheck::run_suite(20, 1, 1e-4, 1e-4).unwrap();
        assert!(report.passed, "{report:?}");
    }
}
