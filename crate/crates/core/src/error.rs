use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("model failed validation:\n{}", fmt_violations(.0))]
    Validation(Vec<Violation>),
    #[error("unknown built-in model {0:?}")]
    UnknownModel(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("point is not on the model's complex: {0}")]
    PointNotOnModel(String),
    #[error("complex is empty")]
    EmptyComplex,
    #[error("test function undefined on face {0}")]
    UndefinedTestFunction(String),
    #[error("wild extension: e = {e} is divisible by p = {p} and the model is not log smooth")]
    WildExtension { e: u64, p: u64 },
    #[error("cannot split stratum {stratum}: {reason}")]
    InvalidSplit { stratum: String, reason: String },
    #[error("cone: {0}")]
    Cone(String),
    #[error("lattice sum spec: {0}")]
    Spec(String),
    #[error("test function of degree {0} is not supported (at most 2)")]
    UnsupportedDegree(u32),
    #[error("point count of stratum {stratum} is negative at t = {t}")]
    NegativeCount { stratum: String, t: String },
    #[error("finite field too large: {0}")]
    FieldTooLarge(String),
    #[error("projective input must be homogeneous: {0}")]
    NonHomogeneous(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  - {x}")).collect::<Vec<_>>().join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
