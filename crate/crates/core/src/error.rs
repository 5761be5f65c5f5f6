//! Error type shared by every stage of the pipeline.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    BadField(String),

    #[error("pole not split over the working field: irreducible factor {factor} of degree {degree}; enlarge m")]
    PoleNotSplit { factor: String, degree: usize },

    #[error("trace condition fails: Tr_K/J(alpha) = alpha + rho(alpha) + rho^2(alpha) is nonzero")]
    TraceNonzero,

    #[error("Artin-Schreier trivial datum: {which} = xi^2 - xi for some xi in k(s)")]
    TrivialAlpha { which: String },

    #[error("empty branch locus: the Klein-four cover is unramified")]
    EmptyBranchLocus,

    #[error("branch point {place} is not totally ramified: pole orders (alpha, rho alpha, rho^2 alpha) = {orders:?}")]
    NotTotallyRamified { place: String, orders: [i64; 3] },

    #[error("degenerate leading coefficient at {place}: {detail}")]
    DegenerateLeading { place: String, detail: String },

    #[error("theta range exceeded at {place}: need index {needed}, available up to {available}")]
    ThetaRange {
        place: String,
        needed: i64,
        available: i64,
    },

    #[error("inconsistent invariants: {0}")]
    Inconsistent(String),

    #[error("negative genus {0}")]
    NegativeGenus(i64),

    #[error("not a Harbater-Katz-Gabber datum: branch locus must be exactly {{inf}}")]
    NotHkg,

    #[error("invalid string: {0}")]
    InvalidString(String),

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("relation violation: {0}")]
    RelationViolation(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("no nonnegative integer solution: {0}")]
    NoSolution(String),

    #[error("ambiguous solution: {0}")]
    Ambiguous(String),

    #[error("element not in field: {0}")]
    RootNotInField(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a mathematical precondition (as opposed to usage errors).
    pub fn is_math(&self) -> bool {
        !matches!(self, Error::Parse(_))
    }
}
