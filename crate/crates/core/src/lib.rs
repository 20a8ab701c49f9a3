//! Numerics for aspect-ratio-sensitive oriented object detection.
//!
//! The crate is organised bottom-up:
//!
//! - [`rbox`]: rotated boxes in the long-edge convention, quads and horizontal boxes.
//! - [`polygon`]: convex clipping, shoelace area, hulls and minimum-area rectangles.
//! - [`skewiou`]: exact and closed-form SkewIoU for rotated boxes.
//! - [`anglecode`]: CSL and AR-CSL 180-bin angle labels.
//! - [`arsmatch`]: aspect-ratio weighted angle costs, cost matrices and Hungarian assignment.
//! - [`dnoise`]: seeded angle and box noise for denoising queries.
//! - [`rdageom`]: rotated deformable attention sampling with analytic gradients.
//! - [`evalkit`]: DOTA file ingestion, AP/mAP evaluation and perturbation studies.

pub mod anglecode;
pub mod arsmatch;
pub mod dnoise;
mod error;
pub mod evalkit;
pub mod polygon;
pub mod rbox;
pub mod rdageom;
pub mod skewiou;

pub use error::{Error, Result};
pub use rbox::{HBox, Point, QuadPolygon, RBox};
