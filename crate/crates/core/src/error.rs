use thiserror::Error;

/// Errors raised by the LP model, the simulators and the subroutines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("basis is singular or not a valid column selection")]
    BasisSingular,

    #[error("basic cost vector is zero; cost normalization skipped")]
    CostDegenerate,

    #[error("cannot prepare the amplitude encoding of a zero vector")]
    ZeroVector,

    #[error("column {0} is zero and cannot be amplitude encoded")]
    ZeroColumn(usize),

    #[error("spectrum of the scaled system leaves [1/kappa, 1]: sigma_min = {sigma_min}, sigma_max = {sigma_max}, kappa = {kappa}")]
    SpectrumOutOfRange {
        sigma_min: f64,
        sigma_max: f64,
        kappa: f64,
    },

    #[error("every entry of the objective is infinite")]
    AllInfinite,

    #[error("column split requested below the threshold n/m >= 2 kappa d^2 / d_c")]
    ThresholdViolation,

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("no feasible starting basis: {0}")]
    InfeasibleStart(String),

    #[error("iteration cap of {0} reached")]
    IterationCap(usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
