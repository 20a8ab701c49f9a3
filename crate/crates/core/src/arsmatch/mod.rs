//! Aspect-ratio-sensitive angle weighting, matching-cost assembly and
//! optimal bipartite assignment.
//!
//! The angle term of both the loss and the matching cost is scaled by
//! `k / (k + 1)` where `k` is the ground truth's aspect ratio, so elongated
//! objects weigh angle errors more heavily.

mod hungarian;

use rayon::prelude::*;
use serde::Serialize;

use crate::anglecode::{self, AngleLabelVector};
use crate::error::{domain, Error, Result};
use crate::rbox::RBox;
use crate::skewiou;

pub use hungarian::{hungarian, Assignment};

/// Probabilities are clamped into `[BCE_EPS, 1 - BCE_EPS]` before taking logs.
pub const BCE_EPS: f64 = 1e-7;

/// Dense row-major cost matrix (`rows` predictions by `cols` ground truths).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("non-finite cost at ({}, {})", i / cols, i % cols)));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.entries.iter().map(|v| v * s).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `k / (k + 1)`, in `[0.5, 1)` for `k >= 1`.
pub fn ar_weight(k: f64) -> Result<f64> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(domain(format!("aspect ratio must be finite and >= 1, got {k}")));
    }
    Ok(k / (k + 1.0))
}

/// Per-bin binary cross-entropy averaged over the 180 bins.
pub fn bce_mean(pred: &AngleLabelVector, target: &AngleLabelVector) -> f64 {
    let total: f64 = pred
        .bins()
        .iter()
        .zip(target.bins().iter())
        .map(|(&p, &y)| {
            let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    total / anglecode::NUM_BINS as f64
}

/// `ar_weight(k) * bce_mean(pred, target)` for an explicit target label.
pub fn weighted_bce(pred: &AngleLabelVector, target: &AngleLabelVector, k: f64) -> Result<f64> {
    Ok(ar_weight(k)? * bce_mean(pred, target))
}

/// Aspect-ratio weighted angle matching cost against the AR-CSL label of
/// a ground truth with angle `gt_theta` and aspect ratio `k`.
pub fn angle_cost(pred: &AngleLabelVector, gt_theta: f64, k: f64) -> Result<f64> {
    let target = anglecode::arcsl_encode(gt_theta, k)?;
    weighted_bce(pred, &target, k)
}

/// Training-side counterpart of [`angle_cost`]; same weighted form.
pub fn angle_loss(pred: &AngleLabelVector, gt_theta: f64, k: f64) -> Result<f64> {
    angle_cost(pred, gt_theta, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Per-class probabilities.
    pub class_scores: Vec<f64>,
    pub rbox: RBox,
    pub angle_label: AngleLabelVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub class_id: usize,
    pub rbox: RBox,
}

/// Weights of the matching-cost terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostWeights {
    pub class: f64,
    pub bbox: f64,
    pub angle: f64,
    /// Weight of an optional `1 - SkewIoU` term; zero disables it.
    pub skewiou: f64,
    /// `(width, height)` used to normalize centers and sizes for the L1 term.
    pub image_size: (f64, f64),
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { class: 2.0, bbox: 5.0, angle: 1.0, skewiou: 0.0, image_size: (1024.0, 1024.0) }
    }
}

fn box_l1(a: &RBox, b: &RBox, (iw, ih): (f64, f64)) -> f64 {
    ((a.cx() - b.cx()) / iw).abs()
        + ((a.cy() - b.cy()) / ih).abs()
        + ((a.w() - b.w()) / iw).abs()
        + ((a.h() - b.h()) / ih).abs()
}

/// Assembles the prediction-by-ground-truth matching cost.
///
/// Entry `(i, j)` is
/// `class * (1 - score_i[class_j]) + bbox * L1(box_i, box_j) + angle * angle_cost(label_i, theta_j, k_j)`
/// plus the optional SkewIoU term.
/// The L1 term covers centers and sizes only.
pub fn build_cost_matrix(preds: &[Prediction], gts: &[GroundTruth], weights: &CostWeights) -> Result<CostMatrix> {
    if preds.is_empty() || gts.is_empty() {
        return Err(Error::Dimension(format!(
            "need at least one prediction and one ground truth, got {} and {}",
            preds.len(),
            gts.len()
        )));
    }
    let (iw, ih) = weights.image_size;
    if !(iw > 0.0 && ih > 0.0) {
        return Err(domain(format!("image size must be positive, got {iw}x{ih}")));
    }
    for (i, p) in preds.iter().enumerate() {
        if let Some(g) = gts.iter().find(|g| g.class_id >= p.class_scores.len()) {
            return Err(Error::Dimension(format!(
                "prediction {i} has {} class scores but a ground truth has class {}",
                p.class_scores.len(),
                g.class_id
            )));
        }
    }
    let targets: Vec<(AngleLabelVector, f64)> = gts
        .iter()
        .map(|g| {
            let k = g.rbox.aspect_ratio();
            Ok((anglecode::arcsl_encode(g.rbox.theta(), k)?, k))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = preds
        .par_iter()
        .map(|p| {
            gts.iter()
                .zip(&targets)
                .map(|(g, (target, k))| {
                    let mut c = weights.class * (1.0 - p.class_scores[g.class_id])
                        + weights.bbox * box_l1(&p.rbox, &g.rbox, weights.image_size)
                        + weights.angle * weighted_bce(&p.angle_label, target, *k)?;
                    if weights.skewiou != 0.0 {
                        c += weights.skewiou * (1.0 - skewiou::skewiou_polygon(&p.rbox, &g.rbox));
                    }
                    Ok(c)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    CostMatrix::new(preds.len(), gts.len(), rows.into_iter().flatten().collect())
}
