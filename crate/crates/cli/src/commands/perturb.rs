use std::fmt::Write as _;

use anyhow::{bail, Result};
use arsdet::dnoise::NoiseConfig;
use arsdet::evalkit::{
    default_buckets, evaluate_suite, noisy_predictions, parse_dota_gt, perturbation_study, synthetic_ground_truth,
    write_dota_gt, write_dota_preds, GroundTruthRecord,
};

use super::{ensure_dir, interp, require_dir, to_json, write_file, Status};
use crate::args::{PerturbArgs, PerturbMode};
use crate::config::PerturbConfig;

const DEFAULT_DELTAS: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];

fn ground_truth(a: &PerturbArgs, cfg: &PerturbConfig, seed: u64) -> Result<Vec<GroundTruthRecord>> {
    if let Some(dir) = &a.gt {
        require_dir(dir, "ground-truth directory")?;
        let parsed = parse_dota_gt(dir)?;
        for w in &parsed.warnings {
            eprintln!("warning: {}:{}: {}", w.path.display(), w.line, w.message);
        }
        if parsed.records.is_empty() {
            bail!("no ground-truth records in {}", dir.display());
        }
        return Ok(parsed.records);
    }
    let n = a.synthetic.unwrap_or(0) as usize;
    let [k_min, k_max] = match (&a.k_range, cfg.k_range) {
        (Some(r), _) if r.len() == 2 => [r[0], r[1]],
        (Some(r), _) => bail!("--k-range takes MIN,MAX, got {} values", r.len()),
        (None, Some(r)) => r,
        (None, None) => [1.0, 8.0],
    };
    Ok(synthetic_ground_truth(n, k_min, k_max, seed)?)
}

pub fn run(a: &PerturbArgs, cfg: &PerturbConfig) -> Result<Status> {
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let interp = interp(a.interp, cfg.interp.as_deref())?;
    let gts = ground_truth(a, cfg, seed)?;
    ensure_dir(&a.out_dir)?;
    if a.gt.is_none() {
        write_dota_gt(a.out_dir.join("gt"), &gts)?;
    }
    match a.mode {
        PerturbMode::Fixed => {
            let deltas = a.deltas.clone().or_else(|| cfg.deltas.clone()).unwrap_or_else(|| DEFAULT_DELTAS.to_vec());
            let rows = perturbation_study(&gts, &deltas, &default_buckets(), interp)?;
            let mut csv = String::from("delta_theta,bucket,objects,ap50,ap75\n");
            for r in &rows {
                let _ = writeln!(csv, "{},{},{},{},{}", r.delta_theta, r.bucket, r.objects, r.ap50, r.ap75);
            }
            write_file(&a.out_dir.join("study.csv"), &csv)?;
            let json = to_json(&rows)?;
            write_file(&a.out_dir.join("study.json"), &json)?;
            print!("{json}");
        }
        PerturbMode::Random => {
            let lambda = a.lambda.or(cfg.lambda).unwrap_or(0.1);
            let noise = NoiseConfig::new(lambda, 0.0, 0.0, seed)?;
            let preds = noisy_predictions(&gts, &noise)?;
            write_dota_preds(a.out_dir.join("preds"), &preds)?;
            let report = evaluate_suite(&preds, &gts, interp, None)?;
            let json = to_json(&report)?;
            write_file(&a.out_dir.join("suite.json"), &json)?;
            print!("{json}");
        }
    }
    Ok(Status::Ok)
}
