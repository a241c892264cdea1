use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty index set")]
    EmptySet,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parts do not form a partition: {0}")]
    NotAPartition(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("instance of size {n} exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("not an ultrametric: violating triple ({0}, {1}, {2})")]
    NotUltrametric(usize, usize, usize),

    #[error("node weights are not monotone: child weight {child} exceeds parent weight {parent}")]
    NotMonotone { parent: f64, child: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid configuration: {0}")]
    Config(String),
}
