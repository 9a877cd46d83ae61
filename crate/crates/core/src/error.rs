use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    Convergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is numerically singular (condition estimate {condition:e}); {advice}")]
    Singular { condition: f64, advice: String },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("rank error: requested {requested} components but only {usable} are usable")]
    Rank { requested: usize, usable: usize },

    #[error("SVM did not converge within {iterations} iterations (worst KKT violation {violation:e})")]
    SvmConvergence { iterations: usize, violation: f64 },

    #[error("class error: {0}")]
    Class(String),

    #[error("fold error: {0}")]
    Fold(String),

    #[error("stratification error: {0}")]
    Stratification(String),

    #[error("format error in {field}: {reason}")]
    Format { field: String, reason: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("audio too short: {samples} samples, need at least {needed}")]
    TooShort { samples: usize, needed: usize },

    #[error("size error: length {0} is not a power of two")]
    Size(usize),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    #[error("enrollment error: {0}")]
    Enrollment(String),

    #[error("unknown identity: {0}")]
    Identity(String),

    #[error(transparent)]
    ModelFile(#[from] ModelFileError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Failures while reading a serialized `SystemModel`.
#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("bad magic line: expected \"BIOMM 1\", found {0:?}")]
    BadMagic(String),

    #[error("unsupported model file version {0}")]
    Version(String),

    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("file truncated in section {section}")]
    Truncated { section: String },

    #[error("malformed section {section}: {reason}")]
    Malformed { section: String, reason: String },
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn format(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category, used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Domain(_) => "domain",
            Error::Convergence { .. } | Error::SvmConvergence { .. } => "convergence",
            Error::Singular { .. } => "singular",
            Error::Factorization(_) => "factorization",
            Error::Rank { .. } => "rank",
            Error::Class(_) => "class",
            Error::Fold(_) => "fold",
            Error::Stratification(_) => "stratification",
            Error::Format { .. } => "format",
            Error::UnsupportedFormat(_) => "unsupported-format",
            Error::Manifest(_) => "manifest",
            Error::TooShort { .. } => "too-short",
            Error::Size(_) => "size",
            Error::Resolution(_) => "resolution",
            Error::Index { .. } => "index",
            Error::Enrollment(_) => "enrollment",
            Error::Identity(_) => "identity",
            Error::ModelFile(_) => "model-file",
            Error::Io { .. } => "io",
        }
    }
}
