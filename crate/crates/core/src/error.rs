use thiserror::Error;

use crate::abvar::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("function is not complete: {0}")]
    NotComplete(String),

    #[error("polynomial is not a product of cyclotomic polynomials (residual factor {residual})")]
    NotCyclotomic { residual: String },

    #[error("polynomial must be monic and nonzero")]
    NotMonic,

    #[error("order {order} does not divide conductor {conductor}")]
    ConductorMismatch { order: u64, conductor: u64 },

    #[error("index {j} out of range 1..={dim}")]
    OutOfRange { j: usize, dim: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("uncovered spectrum: generalized eigenspaces span {covered} of {dim} dimensions")]
    UncoveredSpectrum { covered: usize, dim: usize },

    #[error("operator is not nilpotent")]
    NotNilpotent,

    #[error("matrix is singular")]
    Singular,

    #[error("inadmissible abelian type: {}", format_violations(.0))]
    Inadmissible(Vec<Violation>),

    #[error("incompatible flags: {0}")]
    FlagConflict(String),

    #[error("limit mixed Hodge structure requires residue characteristic zero")]
    NotCharacteristicZero,

    #[error("oracle too large: dimension {dim} exceeds cap {cap}")]
    OracleTooLarge { dim: usize, cap: usize },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
