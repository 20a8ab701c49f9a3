use std::path::PathBuf;

/// Errors reported by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    /// Quadrilateral with (near) zero area.
    #[error("degenerate quadrilateral (area {area:e})")]
    DegenerateQuad { area: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A label vector with no positive bin cannot be decoded.
    #[error("label vector has no peak")]
    NoPeak,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Every data line in a file failed to parse.
    #[error("{}: no valid lines ({malformed} malformed)", path.display())]
    AllMalformed { path: PathBuf, malformed: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
