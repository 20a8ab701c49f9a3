use anyhow::{bail, Result};
use arsdet::anglecode::{arcsl_encode, csl_encode};
use arsdet::rbox::wrap_angle;

use super::{curve::DEFAULT_RADIUS, emit, Status};
use crate::args::{EncodeArgs, LabelKind};
use crate::config::EncodeConfig;

pub fn run(a: &EncodeArgs, cfg: &EncodeConfig) -> Result<Status> {
    if !a.theta.is_finite() {
        bail!("theta must be finite, got {}", a.theta);
    }
    let theta = wrap_angle(a.theta);
    let label = match a.kind {
        LabelKind::Csl => {
            if a.k.is_some() {
                bail!("--k only applies to arcsl");
            }
            csl_encode(theta, a.radius.or(cfg.radius).unwrap_or(DEFAULT_RADIUS))?
        }
        LabelKind::Arcsl => {
            if a.radius.is_some() {
                bail!("arcsl has no radius; its shape follows from --k");
            }
            let Some(k) = a.k else {
                bail!("arcsl needs --k");
            };
            arcsl_encode(theta, k)?
        }
    };
    emit(a.out.as_deref(), &format!("{}\n", label.to_csv_row()))?;
    Ok(Status::Ok)
}
