use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("`{key}` = {value} is outside the permitted range [{min}, {max}]")]
    OutOfRange {
        key: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("population csv row {row}, column {column}: {message}")]
    CsvValue {
        row: usize,
        column: String,
        message: String,
    },

    #[error("population csv schema mismatch: {0}")]
    CsvSchema(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn range(key: &str, value: f64, min: f64, max: f64) -> Self {
        Error::OutOfRange {
            key: key.to_string(),
            value,
            min,
            max,
        }
    }
}

/// Fails with [`Error::OutOfRange`] unless `min <= value <= max`.
pub(crate) fn check_range(key: &str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::range(key, value, min, max))
    }
}
