use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("detailed balance violated at pair ({i}, {j}): relative error {rel_error:e}")]
    DetailedBalanceViolation { i: usize, j: usize, rel_error: f64 },

    #[error("kernel is not symmetric in π at pair ({i}, {j}): relative error {rel_error:e}")]
    SymmetryViolation { i: usize, j: usize, rel_error: f64 },

    #[error("invalid reference measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("stationary weight of state {state} underflows; use the rate-only birth-death routines")]
    MeasureUnderflow { state: usize },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state {state} has zero total rate but positive jump mass")]
    ZeroRates { state: usize },

    #[error("subset enumeration needs n <= {max}, got {n}")]
    TooManyStates { n: usize, max: usize },

    #[error("subset is empty")]
    EmptySubset,

    #[error("subset of size {size} exceeds the enumeration limit {max}")]
    SubsetTooLarge { size: usize, max: usize },

    #[error("A must be contained in B")]
    SubsetNesting,

    #[error("index {index} out of range for {n} states")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("operation requires K = 0")]
    KillingPresent,

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    EigensolverNoConvergence { sweeps: usize },

    #[error("normalisation of the α = 1 form fails: max density {max_density}")]
    NormalizationViolated { max_density: f64 },

    #[error("invalid M: {0}")]
    InvalidM(String),

    #[error("π(B) = {pi_b} must exceed 1/2")]
    BNotLargeEnough { pi_b: f64 },

    #[error("degenerate subset: {0}")]
    DegenerateSubset(String),

    #[error("drift constant γ = {gamma} is not positive")]
    NonpositiveGamma { gamma: f64 },

    #[error("drift rate δ = {delta} is not positive")]
    NonpositiveDelta { delta: f64 },

    #[error("test function is degenerate: {0}")]
    DegeneratePhi(String),

    #[error("invalid tilt function p: {0}")]
    InvalidP(String),

    #[error("tilt validity q_i <= p_i fails at state {state} (ratio {ratio})")]
    ValidityViolated { state: usize, ratio: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("window [{start}, {end}] plus reach {reach} leaves the truncated state space")]
    WindowOutOfRange { start: usize, end: usize, reach: usize },

    #[error(transparent)]
    Expression(#[from] ExprError),
}

pub type Result<T> = std::result::Result<T, Error>;
