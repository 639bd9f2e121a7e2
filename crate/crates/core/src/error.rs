use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mask is not affine invariant: residue {residue} sums to {sum}, expected 1")]
    NotAffineInvariant { residue: u32, sum: String },

    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("manifold mismatch: {left} vs {right}")]
    ManifoldMismatch { left: String, right: String },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("polygon with {len} points is too short for a mask window of {needed}")]
    PolygonTooShort { len: usize, needed: usize },

    #[error("Riemannian average not certified after {iterations} iterations (error bound {error_bound:e})")]
    NotCertified { iterations: usize, error_bound: f64 },

    #[error("non-finite value in chart arithmetic")]
    NonFinite,

    #[error("parameter {t} outside [{lo}, {hi}]")]
    ParameterOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("need at least {need} refinement levels, have {have}")]
    TooFewLevels { have: usize, need: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
