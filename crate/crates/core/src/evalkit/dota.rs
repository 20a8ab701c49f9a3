//! DOTA v1.0 annotation files and Task-1 submission files.
//!
//! Annotations: one `<image_id>.txt` per image, optional `imagesource:` and
//! `gsd:` header lines, then `x1 y1 x2 y2 x3 y3 x4 y4 category difficult`.
//! Predictions: one `Task1_<category>.txt` per class with lines
//! `image_id score x1 y1 x2 y2 x3 y3 x4 y4`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{DetectionRecord, GroundTruthRecord};
use crate::error::{Error, Result};
use crate::rbox::{Point, RBox};

const PRED_PREFIX: &str = "Task1_";

/// A rejected line, kept so callers can report it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseWarning {
    pub path: PathBuf,
    /// 1-based.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseOutcome<T> {
    pub records: Vec<T>,
    pub warnings: Vec<ParseWarning>,
}

fn is_header(line: &str) -> bool {
    let lower = line.to_ascii_lowercase();
    lower.starts_with("imagesource:") || lower.starts_with("gsd:")
}

fn parse_quad(tokens: &[&str]) -> std::result::Result<RBox, String> {
    let mut c = [0.0; 8];
    for (slot, tok) in c.iter_mut().zip(tokens) {
        *slot = tok.parse::<f64>().map_err(|_| format!("bad coordinate {tok:?}"))?;
        if !slot.is_finite() {
            return Err(format!("non-finite coordinate {tok:?}"));
        }
    }
    let pts = [Point::new(c[0], c[1]), Point::new(c[2], c[3]), Point::new(c[4], c[5]), Point::new(c[6], c[7])];
    RBox::from_points(&pts).map_err(|e| e.to_string())
}

/// Parses one annotation file's contents. Returns records, warnings and the
/// number of data (non-header, non-blank) lines.
pub fn parse_gt_str(image_id: &str, text: &str, path: &Path) -> (Vec<GroundTruthRecord>, Vec<ParseWarning>, usize) {
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut data_lines = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || is_header(line) {
            continue;
        }
        data_lines += 1;
        let warn = |message: String| ParseWarning { path: path.to_path_buf(), line: i + 1, message };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 10 {
            warnings.push(warn(format!("expected 10 tokens, got {}", tokens.len())));
            continue;
        }
        let rbox = match parse_quad(&tokens[..8]) {
            Ok(b) => b,
            Err(e) => {
                warnings.push(warn(e));
                continue;
            }
        };
        let difficult = match tokens[9] {
            "0" => false,
            "1" => true,
            other => {
                warnings.push(warn(format!("difficult flag must be 0 or 1, got {other:?}")));
                continue;
            }
        };
        match GroundTruthRecord::new(image_id, rbox, tokens[8], difficult) {
            Ok(r) => records.push(r),
            Err(e) => warnings.push(warn(e.to_string())),
        }
    }
    (records, warnings, data_lines)
}

/// Parses one Task-1 file's contents for `category`.
pub fn parse_pred_str(category: &str, text: &str, path: &Path) -> (Vec<DetectionRecord>, Vec<ParseWarning>, usize) {
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut data_lines = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        data_lines += 1;
        let warn = |message: String| ParseWarning { path: path.to_path_buf(), line: i + 1, message };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 10 {
            warnings.push(warn(format!("expected 10 tokens, got {}", tokens.len())));
            continue;
        }
        let score = match tokens[1].parse::<f64>() {
            Ok(s) => s,
            Err(_) => {
                warnings.push(warn(format!("bad score {:?}", tokens[1])));
                continue;
            }
        };
        let rbox = match parse_quad(&tokens[2..]) {
            Ok(b) => b,
            Err(e) => {
                warnings.push(warn(e));
                continue;
            }
        };
        match DetectionRecord::new(tokens[0], rbox, category, score) {
            Ok(r) => records.push(r),
            Err(e) => warnings.push(warn(e.to_string())),
        }
    }
    (records, warnings, data_lines)
}

fn txt_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |source| Error::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

type FileParser<T> = fn(&str, &str, &Path) -> (Vec<T>, Vec<ParseWarning>, usize);

fn parse_files<T: Send>(files: Vec<(PathBuf, String)>, parse: FileParser<T>) -> Result<ParseOutcome<T>> {
    let parsed: Vec<(Vec<T>, Vec<ParseWarning>)> = files
        .into_par_iter()
        .map(|(path, key)| {
            let text = read(&path)?;
            let (records, warnings, data_lines) = parse(&key, &text, &path);
            if data_lines > 0 && records.is_empty() {
                return Err(Error::AllMalformed { path, malformed: warnings.len() });
            }
            Ok((records, warnings))
        })
        .collect::<Result<_>>()?;
    let mut out = ParseOutcome { records: Vec::new(), warnings: Vec::new() };
    for (r, w) in parsed {
        out.records.extend(r);
        out.warnings.extend(w);
    }
    Ok(out)
}

/// Reads every `*.txt` annotation file in `dir`; the file stem is the image id.
pub fn parse_dota_gt(dir: impl AsRef<Path>) -> Result<ParseOutcome<GroundTruthRecord>> {
    let files = txt_files(dir.as_ref())?
        .into_iter()
        .filter_map(|p| {
            let stem = p.file_stem()?.to_string_lossy().into_owned();
            Some((p, stem))
        })
        .collect();
    parse_files(files, parse_gt_str)
}

/// Reads every `Task1_<category>.txt` file in `dir`.
pub fn parse_dota_preds(dir: impl AsRef<Path>) -> Result<ParseOutcome<DetectionRecord>> {
    let files = txt_files(dir.as_ref())?
        .into_iter()
        .filter_map(|p| {
            let stem = p.file_stem()?.to_string_lossy().into_owned();
            let category = stem.strip_prefix(PRED_PREFIX)?.to_owned();
            (!category.is_empty()).then_some((p, category))
        })
        .collect();
    parse_files(files, parse_pred_str)
}

fn quad_tokens(b: &RBox) -> String {
    b.to_quad().coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_file(path: PathBuf, body: &str) -> Result<()> {
    fs::write(&path, body).map_err(|source| Error::Io { path, source })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })
}

/// Writes one annotation file per image.
pub fn write_dota_gt(dir: impl AsRef<Path>, gts: &[GroundTruthRecord]) -> Result<()> {
    let dir = dir.as_ref();
    ensure_dir(dir)?;
    let mut by_image: BTreeMap<&str, String> = BTreeMap::new();
    for g in gts {
        let body = by_image.entry(&g.image_id).or_default();
        let _ = writeln!(body, "{} {} {}", quad_tokens(&g.rbox), g.category, u8::from(g.difficult));
    }
    for (image, body) in by_image {
        write_file(dir.join(format!("{image}.txt")), &body)?;
    }
    Ok(())
}

/// Writes one Task-1 file per category.
pub fn write_dota_preds(dir: impl AsRef<Path>, dets: &[DetectionRecord]) -> Result<()> {
    let dir = dir.as_ref();
    ensure_dir(dir)?;
    let mut by_cat: BTreeMap<&str, String> = BTreeMap::new();
    for d in dets {
        let body = by_cat.entry(&d.category).or_default();
        let _ = writeln!(body, "{} {} {}", d.image_id, d.score, quad_tokens(&d.rbox));
    }
    for (cat, body) in by_cat {
        write_file(dir.join(format!("{PRED_PREFIX}{cat}.txt")), &body)?;
    }
    Ok(())
}
