use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised by lattice and discriminant-form operations.
///
/// Everything except [`Error::Invariant`] signals a violated precondition on
/// the caller's input; `Invariant` means an internal post-condition check
/// failed and indicates a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gram matrix is not square")]
    NotSquare,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("bilinear form is degenerate")]
    Degenerate,
    #[error("lattice is not even")]
    NotEven,
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattices live in different ambient spaces")]
    AmbientMismatch,
    #[error("basis does not have full rank")]
    RankDeficient,
    #[error("sublattice is not contained in the given lattice")]
    NotContained,
    #[error("{what} exceeds the enumeration bound {bound}")]
    BoundExceeded { what: String, bound: u64 },
    #[error("modulus {d} is not coprime to the discriminant {disc}")]
    NotCoprime { d: u64, disc: BigInt },
    #[error("invalid modulus {0}")]
    InvalidModulus(u64),
    #[error("invalid isotropic line: {0}")]
    InvalidLine(String),
    #[error("not a neighbor: {0}")]
    NotNeighbor(String),
    #[error("subgroup is not isotropic")]
    NotIsotropic,
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("sublattice is not split: found {candidates} transversal candidates")]
    NonSplit { candidates: usize },
    #[error("unsupported prime {0}")]
    UnsupportedPrime(u64),
    #[error("insufficient p-adic precision: pivot valuation {valuation} reached precision {precision}")]
    InsufficientPrecision { valuation: u32, precision: u32 },
    #[error("the form has positive scale at p = {0}; no unimodular part")]
    NoUnimodularPart(u64),
    #[error("hypotheses not satisfied: {0}")]
    Hypothesis(String),
    #[error("wrong signature: {0}")]
    WrongSignature(String),
    #[error("inconsistent local data: {0}")]
    InconsistentLocalData(String),
    #[error("value too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable machine-readable code used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotSquare => "not_square",
            Error::NotSymmetric => "not_symmetric",
            Error::Degenerate => "degenerate",
            Error::NotEven => "not_even",
            Error::NotIntegral => "not_integral",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::AmbientMismatch => "ambient_mismatch",
            Error::RankDeficient => "rank_deficient",
            Error::NotContained => "not_contained",
            Error::BoundExceeded { .. } => "bound_exceeded",
            Error::NotCoprime { .. } => "not_coprime",
            Error::InvalidModulus(_) => "invalid_modulus",
            Error::InvalidLine(_) => "invalid_line",
            Error::NotNeighbor(_) => "not_neighbor",
            Error::NotIsotropic => "not_isotropic",
            Error::InvalidElement(_) => "invalid_element",
            Error::NonSplit { .. } => "non_split",
            Error::UnsupportedPrime(_) => "unsupported_prime",
            Error::InsufficientPrecision { .. } => "insufficient_precision",
            Error::NoUnimodularPart(_) => "no_unimodular_part",
            Error::Hypothesis(_) => "hypothesis_failed",
            Error::WrongSignature(_) => "wrong_signature",
            Error::InconsistentLocalData(_) => "inconsistent_local_data",
            Error::TooLarge(_) => "too_large",
            Error::Parse(_) => "parse_error",
            Error::Invariant(_) => "invariant_violated",
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(what()))
    }
}
