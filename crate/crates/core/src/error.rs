use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("particle number must be at least 1")]
    EmptySystem,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(&'static str),

    #[error("white noise has no pointwise correlation function")]
    WhiteNoiseKappa,

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("invalid noise parameter: {0}")]
    InvalidNoise(&'static str),

    #[error("time grid is not strictly ascending at index {0}")]
    NonAscendingGrid(usize),

    #[error("Monte-Carlo configuration rejected: {0}")]
    InvalidMonteCarlo(&'static str),

    #[error("second-cumulant state has eigenvalue {0:.3e} below tolerance")]
    CumulantBreakdown(f64),

    #[error("interaction ratio must be non-positive, got {0}")]
    RepulsiveInteraction(f64),

    #[error("{0}")]
    OutOfDomain(&'static str),

    #[error("quadrature did not converge (last change {0:.3e})")]
    QuadratureNotConverged(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
