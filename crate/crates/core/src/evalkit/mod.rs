//! Oriented-detection evaluation: DOTA ingestion, AP/mAP at configurable
//! SkewIoU thresholds (rotated or horizontal-circumscribed), and the angle
//! perturbation study.

mod ap;
mod dota;
mod study;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rbox::RBox;

pub use ap::{
    average_precision, evaluate_suite, ApConfig, ApReport, CategoryMetrics, Interpolation, IouMode, PRCurve, PrPoint,
    SuiteReport, SuiteSummary, AP50_95_THRESHOLDS,
};
pub use dota::{
    parse_dota_gt, parse_dota_preds, parse_gt_str, parse_pred_str, write_dota_gt, write_dota_preds, ParseOutcome,
    ParseWarning,
};
pub use study::{
    default_buckets, noisy_predictions, perturb_angles, perturbation_study, synthetic_ground_truth, AspectBucket,
    StudyRow,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruthRecord {
    pub image_id: String,
    pub rbox: RBox,
    pub category: String,
    pub difficult: bool,
}

impl GroundTruthRecord {
    pub fn new(image_id: impl Into<String>, rbox: RBox, category: impl Into<String>, difficult: bool) -> Result<Self> {
        let (image_id, category) = (image_id.into(), category.into());
        check_ids(&image_id, &category)?;
        Ok(Self { image_id, rbox, category, difficult })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRecord {
    pub image_id: String,
    pub rbox: RBox,
    pub category: String,
    pub score: f64,
}

impl DetectionRecord {
    pub fn new(image_id: impl Into<String>, rbox: RBox, category: impl Into<String>, score: f64) -> Result<Self> {
        let (image_id, category) = (image_id.into(), category.into());
        check_ids(&image_id, &category)?;
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::Domain(format!("score {score} outside [0, 1]")));
        }
        Ok(Self { image_id, rbox, category, score })
    }
}

fn check_ids(image_id: &str, category: &str) -> Result<()> {
    if image_id.is_empty() || category.is_empty() {
        return Err(Error::Domain("image id and category must be non-empty".into()));
    }
    Ok(())
}
