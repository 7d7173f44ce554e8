use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("structure polynomial P_{index} has degree {degree}, bound is {bound}")]
    DegreeTooHigh {
        index: usize,
        degree: u32,
        bound: u32,
    },

    #[error("structure polynomial P_{index} breaks the identity axiom at {witness}")]
    IdentityAxiomViolated { index: usize, witness: String },

    #[error("structure polynomial P_{index} uses variable `{variable}` outside s1..s{index}, t1..t{index}")]
    BadVariable { index: usize, variable: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("orbit is empty")]
    EmptyOrbit,

    #[error("sets are not disjoint: both contain {0}")]
    SetsNotDisjoint(u64),

    #[error("set needs at least {needed} elements, has {found}")]
    TooShort { needed: usize, found: usize },

    #[error("set is not strictly increasing and positive at index {0}")]
    NotIncreasing(usize),

    #[error("integer overflow while generating {0}")]
    Overflow(String),

    #[error("interval endpoint {0} is a root; perturb the endpoints")]
    RootIsolationFailed(String),

    #[error("every grid point lies within the boundary guard")]
    AllPointsBoundary,

    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),

    #[error("grid admits no sample points: {0}")]
    GridTooCoarse(String),

    #[error("witness invalid: |t alpha| = {norm} is below eps = {eps} for t = {t}")]
    WitnessInvalid { t: u64, norm: String, eps: String },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
