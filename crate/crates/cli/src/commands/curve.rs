use std::fmt::Write as _;

use anyhow::Result;
use arsdet::anglecode::{arcsl_encode, csl_encode, AngleLabelVector, NUM_BINS};
use arsdet::skewiou::{iou_curve, min_skewiou};

use super::{ensure_dir, write_file, Status};
use crate::args::{CurveArgs, LabelKind};
use crate::config::CurveConfig;

pub const DEFAULT_KS: [f64; 7] = [1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 8.0];
pub const DEFAULT_RADIUS: f64 = 6.0;

/// One row per integer ground-truth angle, one column per bin.
fn label_matrix(encode: impl Fn(f64) -> arsdet::Result<AngleLabelVector>) -> Result<String> {
    let mut out = String::new();
    for t in 0..NUM_BINS {
        let _ = writeln!(out, "{}", encode(t as f64)?.to_csv_row());
    }
    Ok(out)
}

pub fn run(a: &CurveArgs, cfg: &CurveConfig) -> Result<Status> {
    let ks = a.k.clone().or_else(|| cfg.k.clone()).unwrap_or_else(|| DEFAULT_KS.to_vec());
    let step = a.step.or(cfg.step).unwrap_or(1.0);
    let radius = a.radius.or(cfg.radius).unwrap_or(DEFAULT_RADIUS);
    // Validate everything before writing anything.
    let curves = ks.iter().map(|&k| Ok((iou_curve(k, step)?, min_skewiou(k)?))).collect::<Result<Vec<_>>>()?;
    if a.labels.contains(&LabelKind::Csl) {
        csl_encode(0.0, radius)?;
    }

    ensure_dir(&a.out_dir)?;
    let mut summary = String::from("k,min,argmin\n");
    for (curve, m) in &curves {
        let path = a.out_dir.join(format!("iou_curve_k{}.csv", curve.k));
        write_file(&path, &curve.to_csv())?;
        println!("{}", path.display());
        let _ = writeln!(summary, "{},{},{}", curve.k, m.min, m.argmin);
    }
    let path = a.out_dir.join("min_skewiou.csv");
    write_file(&path, &summary)?;
    println!("{}", path.display());

    for kind in &a.labels {
        match kind {
            LabelKind::Csl => {
                let path = a.out_dir.join(format!("labels_csl_r{radius}.csv"));
                write_file(&path, &label_matrix(|t| csl_encode(t, radius))?)?;
                println!("{}", path.display());
            }
            LabelKind::Arcsl => {
                for &k in &ks {
                    let path = a.out_dir.join(format!("labels_arcsl_k{k}.csv"));
                    write_file(&path, &label_matrix(|t| arcsl_encode(t, k))?)?;
                    println!("{}", path.display());
                }
            }
        }
    }
    Ok(Status::Ok)
}
