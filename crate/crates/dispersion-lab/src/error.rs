use thiserror::Error;

/// Everything that can go wrong across the crate. Variants are named after
/// the invariant they guard so callers can match on the failure mode.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("row {row} sums to {sum}, not 1")]
    NonStochasticRow { row: usize, sum: f64 },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("output column {col} is identically zero")]
    AllZeroColumn { col: usize },
    #[error("capacity iteration did not converge: gap {gap} after {iters} iterations")]
    NoConvergence { iters: usize, gap: f64 },
    #[error("q*({y}) is not positive; analysis upstream is broken")]
    ZeroOutputProbability { y: usize },
    #[error("capacity-achieving support is empty; check tolerances")]
    EmptySupport,
    #[error("capacity polytope is infeasible")]
    InfeasiblePolytope,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("controller asked for step {step} past horizon {n}")]
    HorizonExceeded { step: usize, n: usize },
    #[error("controller incompatible with simulation: {0}")]
    IncompatibleController(String),
    #[error("converse bound is vacuous: tail estimate leaves no probability mass")]
    VacuousBound,
    #[error("transition density requires t > 0, got {0}")]
    NonpositiveTime(f64),
    #[error("zeta = {zeta} makes W_zeta(y|x) negative at ({x}, {y})")]
    NegativeProbability { zeta: f64, x: usize, y: usize },
    #[error("channel is not simple-dispersion: V_min = {v_min}, V_max = {v_max}")]
    NotSimpleDispersion { v_min: f64, v_max: f64 },
    #[error("search failed: {0}")]
    NotFound(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
