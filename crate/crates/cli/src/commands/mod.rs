pub mod curve;
pub mod encode;
pub mod eval;
pub mod gradcheck;
pub mod matchdemo;
pub mod perturb;

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use arsdet::evalkit::Interpolation;
use clap::ValueEnum;

use crate::args::InterpArg;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A verification ran to completion and did not pass.
    CheckFailed,
}

pub fn interp(flag: Option<InterpArg>, config: Option<&str>) -> Result<Interpolation> {
    if let Some(f) = flag {
        return Ok(f.into());
    }
    match config {
        None => Ok(Interpolation::Voc07),
        Some(s) => match InterpArg::from_str(s, true) {
            Ok(a) => Ok(a.into()),
            Err(_) => bail!("config: interp must be voc07 or all-points, got {s:?}"),
        },
    }
}

pub fn require_dir(path: &Path, what: &str) -> Result<()> {
    if !path.is_dir() {
        bail!("{what} not found: {}", path.display());
    }
    Ok(())
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("cannot create directory {}", path.display()))
}

pub fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, body),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).context("cannot write to stdout")?;
            out.flush().context("cannot write to stdout")
        }
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).context("cannot serialize output")?;
    s.push('\n');
    Ok(s)
}
