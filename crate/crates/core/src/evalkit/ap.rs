use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{DetectionRecord, GroundTruthRecord};
use crate::error::{domain, Result};
use crate::skewiou::skewiou_polygon;

/// `0.50, 0.55, ..., 0.95`.
pub const AP50_95_THRESHOLDS: [f64; 10] = [0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IouMode {
    /// SkewIoU of the rotated boxes.
    Rotated,
    /// Axis-aligned IoU of the horizontal circumscribing boxes.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// 11-point interpolation (DOTA devkit / VOC2007).
    Voc07,
    /// Area under the monotone precision envelope at every recall step.
    AllPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApConfig {
    pub iou_threshold: f64,
    pub mode: IouMode,
    pub interp: Interpolation,
    /// Keep at most this many top-scoring detections per image.
    pub max_dets_per_image: Option<usize>,
}

impl Default for ApConfig {
    fn default() -> Self {
        Self { iou_threshold: 0.5, mode: IouMode::Rotated, interp: Interpolation::Voc07, max_dets_per_image: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PRCurve {
    pub points: Vec<PrPoint>,
    pub ap: f64,
    /// Non-difficult ground truths.
    pub num_positives: usize,
}

impl PRCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("recall,precision\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.recall, p.precision));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApReport {
    /// Every category seen in either input, in name order.
    pub per_category: BTreeMap<String, PRCurve>,
    /// Mean AP over categories with at least one non-difficult ground truth.
    pub map: f64,
}

/// Per-category detections in evaluation order with their IoU candidates.
struct CategoryIndex {
    gt_difficult: Vec<bool>,
    num_positives: usize,
    /// For each detection (sorted by descending score, ties by input order):
    /// `(gt index, iou)` for every ground truth of the same image.
    candidates: Vec<Vec<(usize, f64)>>,
}

fn iou(mode: IouMode, d: &DetectionRecord, g: &GroundTruthRecord) -> f64 {
    match mode {
        IouMode::Rotated => skewiou_polygon(&d.rbox, &g.rbox),
        IouMode::Horizontal => d.rbox.h_circumscribe().iou(&g.rbox.h_circumscribe()),
    }
}

fn capped(dets: &[DetectionRecord], cap: Option<usize>) -> Vec<(usize, &DetectionRecord)> {
    let mut order: Vec<(usize, &DetectionRecord)> = dets.iter().enumerate().collect();
    order.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then(a.0.cmp(&b.0)));
    if let Some(cap) = cap {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        order.retain(|(_, d)| {
            let n = seen.entry(d.image_id.as_str()).or_insert(0);
            *n += 1;
            *n <= cap
        });
    }
    order
}

fn build_indices(
    dets: &[DetectionRecord],
    gts: &[GroundTruthRecord],
    mode: IouMode,
    cap: Option<usize>,
) -> BTreeMap<String, CategoryIndex> {
    let categories: BTreeSet<&str> =
        gts.iter().map(|g| g.category.as_str()).chain(dets.iter().map(|d| d.category.as_str())).collect();
    let ordered = capped(dets, cap);
    categories
        .into_par_iter()
        .map(|cat| {
            let cat_gts: Vec<&GroundTruthRecord> = gts.iter().filter(|g| g.category == cat).collect();
            let mut by_image: HashMap<&str, Vec<usize>> = HashMap::new();
            for (i, g) in cat_gts.iter().enumerate() {
                by_image.entry(g.image_id.as_str()).or_default().push(i);
            }
            let candidates = ordered
                .iter()
                .filter(|(_, d)| d.category == cat)
                .map(|(_, d)| {
                    by_image
                        .get(d.image_id.as_str())
                        .map(|idx| idx.iter().map(|&gi| (gi, iou(mode, d, cat_gts[gi]))).collect())
                        .unwrap_or_default()
                })
                .collect();
            let gt_difficult: Vec<bool> = cat_gts.iter().map(|g| g.difficult).collect();
            let num_positives = gt_difficult.iter().filter(|d| !**d).count();
            (cat.to_owned(), CategoryIndex { gt_difficult, num_positives, candidates })
        })
        .collect()
}

impl CategoryIndex {
    fn curve(&self, threshold: f64, interp: Interpolation) -> PRCurve {
        let mut matched = vec![false; self.gt_difficult.len()];
        let (mut tp, mut fp) = (0usize, 0usize);
        let mut points = Vec::with_capacity(self.candidates.len());
        for cands in &self.candidates {
            let mut best: Option<(usize, f64)> = None;
            for &(gi, v) in cands {
                if !self.gt_difficult[gi] && matched[gi] {
                    continue;
                }
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((gi, v));
                }
            }
            match best {
                Some((gi, v)) if v >= threshold => {
                    if self.gt_difficult[gi] {
                        continue;
                    }
                    matched[gi] = true;
                    tp += 1;
                }
                _ => fp += 1,
            }
            if self.num_positives > 0 {
                points.push(PrPoint {
                    recall: tp as f64 / self.num_positives as f64,
                    precision: tp as f64 / (tp + fp) as f64,
                });
            }
        }
        let ap = if self.num_positives == 0 { 0.0 } else { integrate(&points, interp) };
        PRCurve { points, ap, num_positives: self.num_positives }
    }
}

fn integrate(points: &[PrPoint], interp: Interpolation) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    match interp {
        Interpolation::Voc07 => {
            (0..=10)
                .map(|t| {
                    let t = t as f64 / 10.0;
                    points.iter().filter(|p| p.recall >= t).map(|p| p.precision).fold(0.0, f64::max)
                })
                .sum::<f64>()
                / 11.0
        }
        Interpolation::AllPoints => {
            let mut rec = Vec::with_capacity(points.len() + 2);
            let mut prec = Vec::with_capacity(points.len() + 2);
            rec.push(0.0);
            prec.push(0.0);
            for p in points {
                rec.push(p.recall);
                prec.push(p.precision);
            }
            rec.push(1.0);
            prec.push(0.0);
            for i in (0..prec.len() - 1).rev() {
                prec[i] = prec[i].max(prec[i + 1]);
            }
            (1..rec.len()).filter(|&i| rec[i] != rec[i - 1]).map(|i| (rec[i] - rec[i - 1]) * prec[i]).sum()
        }
    }
}

fn map_of(curves: &BTreeMap<String, PRCurve>) -> f64 {
    let scored: Vec<f64> = curves.values().filter(|c| c.num_positives > 0).map(|c| c.ap).collect();
    if scored.is_empty() {
        0.0
    } else {
        scored.iter().sum::<f64>() / scored.len() as f64
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!("IoU threshold must lie in (0, 1), got {t}")));
    }
    Ok(())
}

/// Per-category AP at one IoU threshold.
///
/// Detections are taken in descending score order (ties by input order). Each
/// is compared with the same-image ground truths that are either unmatched or
/// difficult; the highest-IoU one is taken if it reaches the threshold. A
/// detection landing on a difficult ground truth is dropped from the tally.
pub fn average_precision(dets: &[DetectionRecord], gts: &[GroundTruthRecord], cfg: &ApConfig) -> Result<ApReport> {
    check_threshold(cfg.iou_threshold)?;
    let indices = build_indices(dets, gts, cfg.mode, cfg.max_dets_per_image);
    let per_category: BTreeMap<String, PRCurve> =
        indices.into_iter().map(|(cat, idx)| (cat, idx.curve(cfg.iou_threshold, cfg.interp))).collect();
    let map = map_of(&per_category);
    Ok(ApReport { per_category, map })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CategoryMetrics {
    pub ap50: f64,
    pub ap75: f64,
    pub ap5095: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub ap50: f64,
    pub ap75: f64,
    pub ap5095: f64,
    pub ap50_h: f64,
    pub ap75_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub interpolation: Interpolation,
    pub per_category: BTreeMap<String, CategoryMetrics>,
    pub summary: SuiteSummary,
}

/// AP50, AP75, AP50:95 (rotated) and AP50-H, AP75-H (horizontal).
pub fn evaluate_suite(
    dets: &[DetectionRecord],
    gts: &[GroundTruthRecord],
    interp: Interpolation,
    max_dets_per_image: Option<usize>,
) -> Result<SuiteReport> {
    let rotated = build_indices(dets, gts, IouMode::Rotated, max_dets_per_image);
    let horizontal = build_indices(dets, gts, IouMode::Horizontal, max_dets_per_image);

    let curves_at = |idx: &BTreeMap<String, CategoryIndex>, t: f64| -> BTreeMap<String, PRCurve> {
        idx.iter().map(|(c, i)| (c.clone(), i.curve(t, interp))).collect()
    };
    let sweep: Vec<BTreeMap<String, PRCurve>> =
        AP50_95_THRESHOLDS.par_iter().map(|&t| curves_at(&rotated, t)).collect();
    let (at50, at75) = (&sweep[0], &sweep[5]);
    let h50 = curves_at(&horizontal, 0.5);
    let h75 = curves_at(&horizontal, 0.75);

    let per_category = at50
        .keys()
        .map(|cat| {
            let ap5095 = sweep.iter().map(|m| m[cat].ap).sum::<f64>() / sweep.len() as f64;
            (cat.clone(), CategoryMetrics { ap50: at50[cat].ap, ap75: at75[cat].ap, ap5095 })
        })
        .collect();
    let summary = SuiteSummary {
        ap50: map_of(at50),
        ap75: map_of(at75),
        ap5095: sweep.iter().map(map_of).sum::<f64>() / sweep.len() as f64,
        ap50_h: map_of(&h50),
        ap75_h: map_of(&h75),
    };
    Ok(SuiteReport { interpolation: interp, per_category, summary })
}
