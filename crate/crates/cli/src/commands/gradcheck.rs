use anyhow::{bail, Result};
use arsdet::rdageom::gradcheck::run_suite;

use super::{emit, to_json, Status};
use crate::args::GradCheckArgs;
use crate::config::GradCheckConfig;

pub fn run(a: &GradCheckArgs, cfg: &GradCheckConfig) -> Result<Status> {
    let instances = a.instances.or(cfg.instances).unwrap_or(100);
    let step = a.step.or(cfg.step).unwrap_or(1e-4);
    let tolerance = a.tolerance.or(cfg.tolerance).unwrap_or(1e-4);
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    if instances == 0 {
        bail!("instances must be >= 1");
    }
    if !(step > 0.0 && step <= 1e-2) {
        bail!("step must lie in (0, 1e-2], got {step}");
    }
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        bail!("tolerance must be finite and > 0, got {tolerance}");
    }
    let report = run_suite(instances as usize, seed, step, tolerance)?;
    emit(a.out.as_deref(), &to_json(&report)?)?;
    if report.passed {
        Ok(Status::Ok)
    } else {
        eprintln!(
            "gradient check failed: max relative error {:.3e} (offsets) / {:.3e} (weights) > {tolerance:e}",
            report.max_rel_error_offsets, report.max_rel_error_weights
        );
        Ok(Status::CheckFailed)
    }
}
