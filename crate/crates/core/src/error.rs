use thiserror::Error;

/// Unified error type for construction, validation, and numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector norm {norm:.3e} is below the normalization floor")]
    DegenerateState { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| entry is {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("effect eigenvalue {eigenvalue:.6} lies outside [0, 1]")]
    EffectOutOfRange { eigenvalue: f64 },

    #[error("trace {trace:.12} differs from {expected} beyond tolerance")]
    BadTrace { trace: f64, expected: f64 },

    #[error("POVM has no effects")]
    EmptyPovm,

    #[error("effects do not sum to the identity: max-entry residual {residual:.3e}")]
    Incomplete { residual: f64 },

    #[error("ensemble weight {weight:.3e} is negative")]
    NegativeWeight { weight: f64 },

    #[error("ensemble weights sum to {sum:.12}, not 1")]
    BadWeightSum { sum: f64 },

    #[error("lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("tensor dimension {dim}^{power} exceeds the cap of {cap}")]
    TensorCap { dim: usize, power: u32, cap: usize },

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("order t = {t} is unsupported here (supported: {supported})")]
    UnsupportedOrder { t: u32, supported: &'static str },

    #[error("expected {expected} knots for t = {t}, got {got}")]
    KnotCount { t: u32, expected: usize, got: usize },

    #[error("knot {value:.12} lies outside the open interval (0, 1)")]
    KnotRange { value: f64 },

    #[error("knots are not strictly ascending")]
    KnotOrder,

    #[error("adjacent knots are only {gap:.3e} apart (minimum 1e-6)")]
    KnotSeparation { gap: f64 },

    #[error("Hermite system is numerically singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("no closed form is available for t = {t}")]
    NoClosedForm { t: u32 },

    #[error("the large-d limit diverges for t = 1")]
    DivergentAsymptote,

    #[error("antipodal construction needs a qubit POVM, got dimension {dim}")]
    NotQubit { dim: usize },

    #[error("effect {index} is not rank one (Bloch norm deviates by {deviation:.3e})")]
    NotRankOne { index: usize, deviation: f64 },

    #[error("dimension {dim} exceeds the mutual-information search cap of {cap}")]
    SearchDimCap { dim: usize, cap: usize },

    #[error("POVM is not a {t}-design: order {failed_k} residual {residual:.3e}")]
    NotADesign {
        t: u32,
        failed_k: u32,
        residual: f64,
    },

    #[error("optimizer failed: {0}")]
    OptimizerFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
