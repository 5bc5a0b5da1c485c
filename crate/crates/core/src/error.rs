use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("continued fraction expansion terminated after {} terms: remainder lost to precision", coeffs.len())]
    TerminatedExpansion { coeffs: Vec<u64> },

    #[error("integer overflow computing convergent {index}")]
    IntegerOverflow { index: usize },

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("orbit escaped the bound {bound:e} at step {step}")]
    Overflow { step: usize, bound: f64 },

    #[error("small divisor breakdown at order {order}: |divisor| = {divisor:e}")]
    SmallDivisorBreakdown { order: usize, divisor: f64 },

    #[error("resonance at (j, k) = ({j}, {k}): |divisor| = {divisor:e}")]
    ResonanceDetected { j: usize, k: usize, divisor: f64 },

    #[error("inversion of a_{level} failed: {detail}")]
    InversionFailure { level: usize, detail: String },

    #[error("inversion of a_{level} is ambiguous: seeds converged to {first} and {second}")]
    MultipleRoots {
        level: usize,
        first: String,
        second: String,
    },

    #[error("normalization of level {level} failed: {detail}")]
    NormalizationFailure { level: usize, detail: String },

    #[error("no convergence after {iterations} iterations (last change {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("underflow guard: {0}")]
    UnderflowGuard(String),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("no cancellation: achieved {achieved:e}, required {required:e} ({detail})")]
    NoCancellation {
        achieved: f64,
        required: f64,
        detail: String,
    },

    #[error("degenerate curve: samples {i} and {j} coincide")]
    DegenerateCurve { i: usize, j: usize },

    #[error("pyramid depth {have} is insufficient, need {need}")]
    DepthExceeded { need: usize, have: usize },

    #[error("level {level} is degraded (residual {residual:e})")]
    DegradedLevel { level: usize, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cache format: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that signal the numerical regime was left, as opposed to bugs
    /// or bad arguments.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::OutOfRegime(_) | Error::UnderflowGuard(_) | Error::NoCancellation { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
