//! Angle-perturbation sensitivity study and synthetic ground truth.

use serde::Serialize;

use super::ap::{average_precision, ApConfig, Interpolation};
use super::{DetectionRecord, GroundTruthRecord};
use crate::dnoise::{self, NoiseConfig, NoiseRng};
use crate::error::{domain, Result};
use crate::rbox::RBox;

/// Aspect-ratio range `(k_min, k_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AspectBucket {
    pub label: String,
    pub k_min_exclusive: f64,
    pub k_max_inclusive: f64,
}

impl AspectBucket {
    pub fn new(label: impl Into<String>, k_min_exclusive: f64, k_max_inclusive: f64) -> Self {
        Self { label: label.into(), k_min_exclusive, k_max_inclusive }
    }

    pub fn contains(&self, k: f64) -> bool {
        k > self.k_min_exclusive && k <= self.k_max_inclusive
    }
}

/// `k <= 1.5`, `1.5 < k <= 3`, `k > 3`.
pub fn default_buckets() -> Vec<AspectBucket> {
    vec![
        AspectBucket::new("k<=1.5", f64::NEG_INFINITY, 1.5),
        AspectBucket::new("1.5<k<=3", 1.5, 3.0),
        AspectBucket::new("k>3", 3.0, f64::INFINITY),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub delta_theta: f64,
    /// Bucket label, or `"all"`.
    pub bucket: String,
    pub objects: usize,
    pub ap50: f64,
    pub ap75: f64,
}

/// Predictions equal to the ground truths with every angle shifted by
/// `delta_theta` (wrapped), score 1.0, in ground-truth order.
pub fn perturb_angles(gts: &[GroundTruthRecord], delta_theta: f64) -> Result<Vec<DetectionRecord>> {
    gts.iter()
        .map(|g| {
            let theta = dnoise::apply_angle_delta(g.rbox.theta(), delta_theta);
            DetectionRecord::new(g.image_id.clone(), g.rbox.with_theta(theta)?, g.category.clone(), 1.0)
        })
        .collect()
}

/// Predictions with seeded angle noise (and box jitter when the config's box
/// scales are non-zero), score 1.0.
pub fn noisy_predictions(gts: &[GroundTruthRecord], cfg: &NoiseConfig) -> Result<Vec<DetectionRecord>> {
    let mut rng = cfg.rng();
    gts.iter()
        .map(|g| {
            let b = dnoise::noisy_query(&g.rbox, cfg, &mut rng)?;
            DetectionRecord::new(g.image_id.clone(), b, g.category.clone(), 1.0)
        })
        .collect()
}

fn ap_pair(dets: &[DetectionRecord], gts: &[GroundTruthRecord], interp: Interpolation) -> Result<(f64, f64)> {
    let at = |t| average_precision(dets, gts, &ApConfig { iou_threshold: t, interp, ..Default::default() });
    Ok((at(0.5)?.map, at(0.75)?.map))
}

/// AP50/AP75 overall and per aspect-ratio bucket for each angle shift.
pub fn perturbation_study(
    gts: &[GroundTruthRecord],
    deviations: &[f64],
    buckets: &[AspectBucket],
    interp: Interpolation,
) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::with_capacity(deviations.len() * (buckets.len() + 1));
    for &delta in deviations {
        if !delta.is_finite() {
            return Err(domain(format!("angle shift must be finite, got {delta}")));
        }
        let preds = perturb_angles(gts, delta)?;
        let (ap50, ap75) = ap_pair(&preds, gts, interp)?;
        rows.push(StudyRow { delta_theta: delta, bucket: "all".into(), objects: gts.len(), ap50, ap75 });
        for bucket in buckets {
            let (sub_gts, sub_preds): (Vec<_>, Vec<_>) = gts
                .iter()
                .zip(&preds)
                .filter(|(g, _)| bucket.contains(g.rbox.aspect_ratio()))
                .map(|(g, p)| (g.clone(), p.clone()))
                .unzip();
            let (ap50, ap75) = ap_pair(&sub_preds, &sub_gts, interp)?;
            rows.push(StudyRow {
                delta_theta: delta,
                bucket: bucket.label.clone(),
                objects: sub_gts.len(),
                ap50,
                ap75,
            });
        }
    }
    Ok(rows)
}

/// Objects per synthetic image (placed on a 5x5 grid of 400 px cells).
const PER_IMAGE: usize = 25;
const CELL: f64 = 400.0;

/// `n` non-overlapping objects of category `"object"` with aspect ratio
/// log-uniform in `[k_min, k_max]`, short side uniform in `[8, 24]` px and
/// angle uniform in `[0, 180)`.
pub fn synthetic_ground_truth(n: usize, k_min: f64, k_max: f64, seed: u64) -> Result<Vec<GroundTruthRecord>> {
    if !(k_min >= 1.0 && k_max >= k_min && k_max <= 16.0) {
        return Err(domain(format!("aspect range must satisfy 1 <= k_min <= k_max <= 16, got [{k_min}, {k_max}]")));
    }
    let mut rng = NoiseRng::seed_from_u64(seed);
    let (lo, hi) = (k_min.ln(), k_max.ln());
    (0..n)
        .map(|i| {
            let k = (lo + (hi - lo) * rng.next_open01()).exp();
            let h = 8.0 + 16.0 * rng.next_open01();
            let theta = 180.0 * rng.next_open01();
            let slot = i % PER_IMAGE;
            let cx = CELL * ((slot % 5) as f64 + 0.5);
            let cy = CELL * ((slot / 5) as f64 + 0.5);
            let b = RBox::new(cx, cy, k * h, h, theta.min(179.999_999))?;
            GroundTruthRecord::new(format!("synth_{:04}", i / PER_IMAGE), b, "object", false)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shift_is_perfect() {
        let gts = synthetic_ground_truth(60, 1.0, 8.0, 3).unwrap();
        for row in perturbation_study(&gts, &[0.0], &default_buckets(), Interpolation::Voc07).unwrap() {
            assert_eq!((row.ap50, row.ap75), (1.0, 1.0), "{row:?}");
        }
    }

    #[test]
    fn buckets_partition() {
        let b = default_buckets();
        for k in [1.0, 1.5, 1.5001, 3.0, 3.0001, 8.0] {
            assert_eq!(b.iter().filter(|x| x.contains(k)).count(), 1, "{k}");
        }
    }

    #[test]
    fn synthetic_set_is_reproducible_and_in_range() {
        let a = synthetic_ground_truth(100, 1.0, 8.0, 9).unwrap();
        assert_eq!(a, synthetic_ground_truth(100, 1.0, 8.0, 9).unwrap());
        for g in &a {
            let k = g.rbox.aspect_ratio();
            assert!((1.0..=8.0 + 1e-9).contains(&k));
        }
        assert!(synthetic_ground_truth(10, 0.5, 2.0, 0).is_err());
    }

    #[test]
    fn noisy_predictions_are_seeded() {
        let gts = synthetic_ground_truth(30, 1.0, 4.0, 1).unwrap();
        let cfg = NoiseConfig::new(0.1, 0.0, 0.0, 5).unwrap();
        let a = noisy_predictions(&gts, &cfg).unwrap();
        assert_eq!(a, noisy_predictions(&gts, &cfg).unwrap());
        assert_eq!(a.len(), gts.len());
    }
}
