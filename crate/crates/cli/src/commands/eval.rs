use anyhow::{bail, Result};
use arsdet::evalkit::{average_precision, evaluate_suite, parse_dota_gt, parse_dota_preds, ApConfig, SuiteReport};
use serde::Serialize;

use super::{emit, ensure_dir, interp, require_dir, to_json, write_file, Status};
use crate::args::EvalArgs;
use crate::config::EvalConfig;

const SHOWN_WARNINGS: usize = 20;

#[derive(Serialize)]
struct EvalOutput {
    #[serde(flatten)]
    report: SuiteReport,
    ground_truths: usize,
    detections: usize,
    rejected_lines: usize,
}

pub fn run(a: &EvalArgs, cfg: &EvalConfig) -> Result<Status> {
    require_dir(&a.gt, "ground-truth directory")?;
    require_dir(&a.preds, "prediction directory")?;
    let interp = interp(a.interp, cfg.interp.as_deref())?;
    let max_dets = a.max_dets.or(cfg.max_dets).map(|n| n as usize);
    let max_warnings = a.max_warnings.or(cfg.max_warnings);

    let gts = parse_dota_gt(&a.gt)?;
    let preds = parse_dota_preds(&a.preds)?;
    let warnings: Vec<_> = gts.warnings.iter().chain(&preds.warnings).collect();
    for w in warnings.iter().take(SHOWN_WARNINGS) {
        eprintln!("warning: {}:{}: {}", w.path.display(), w.line, w.message);
    }
    if warnings.len() > SHOWN_WARNINGS {
        eprintln!("warning: {} more rejected lines", warnings.len() - SHOWN_WARNINGS);
    }
    if let Some(limit) = max_warnings {
        if warnings.len() > limit {
            bail!("{} rejected input lines exceed --max-warnings {limit}", warnings.len());
        }
    }
    if gts.records.is_empty() {
        bail!("no ground-truth records in {}", a.gt.display());
    }

    let report = evaluate_suite(&preds.records, &gts.records, interp, max_dets)?;
    if let Some(dir) = &a.pr_dir {
        ensure_dir(dir)?;
        let cfg = ApConfig { interp, max_dets_per_image: max_dets, ..Default::default() };
        let curves = average_precision(&preds.records, &gts.records, &cfg)?;
        for (cat, curve) in &curves.per_category {
            write_file(&dir.join(format!("pr_{cat}.csv")), &curve.to_csv())?;
        }
    }
    let out = EvalOutput {
        report,
        ground_truths: gts.records.len(),
        detections: preds.records.len(),
        rejected_lines: warnings.len(),
    };
    emit(a.out.as_deref(), &to_json(&out)?)?;
    Ok(Status::Ok)
}
