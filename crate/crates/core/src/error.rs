use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max deviation {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("eigenvalue {eigenvalue:e} lies outside the domain of the spectral function")]
    Domain { eigenvalue: f64 },

    #[error("bad dimension {0}: at least 2 is required")]
    BadDimension(usize),

    #[error("bad rank {rank} for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported dimension {0}: MUBs are constructed for d = 2 and odd prime powers only")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("bases are not mutually unbiased (orthonormality deviation {orthonormality:e}, unbiasedness deviation {unbiasedness:e})")]
    NotUnbiased {
        orthonormality: f64,
        unbiasedness: f64,
    },

    #[error("negative radicand {0:e}")]
    NegativeRadicand(f64),

    #[error("bad outcome index {index} for measurement {measurement} with {outcomes} outcomes")]
    BadIndex {
        measurement: usize,
        index: usize,
        outcomes: usize,
    },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
