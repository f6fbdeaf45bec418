use thiserror::Error;

use crate::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty range [{lo}, {hi}]")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("density mismatch {0} ≠ {1}")]
    // Rational payloads are boxed to keep `Result<T>` small.
    DensityMismatch(Box<Rational>, Box<Rational>),
    #[error("sets of density 0 cannot be intertwined")]
    ZeroDensity,
    #[error("set `{0}` carries no convergence modulus")]
    MissingModulus(String),
    #[error("set `{0}` has no known exact density")]
    MissingDensity(String),
    #[error("cannot render report: {0}")]
    Render(String),
    #[error("invalid epsilon schedule: {0}")]
    InvalidSchedule(String),
    #[error("plan invariant violated at k = {k}: {msg}")]
    PlanInvariant { k: usize, msg: String },
    #[error("plan exhausted: {n} lies beyond both the last threshold and the horizon")]
    PlanExhausted { n: u64 },
    #[error(
        "no refutation possible; map transfers these sets equally (alpha = {alpha}, beta = {beta})"
    )]
    NoRefutation {
        alpha: Box<Rational>,
        beta: Box<Rational>,
    },
    #[error("no refutation possible; need alpha < beta but alpha = {alpha} > beta = {beta} (swap the sets)")]
    RefutationOrder {
        alpha: Box<Rational>,
        beta: Box<Rational>,
    },
}
