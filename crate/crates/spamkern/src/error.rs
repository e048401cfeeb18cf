use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the kernel domain [0,1]: {0}")]
    Domain(f64),

    #[error("coefficient {index} is nonzero but the matching eigenvalue is zero")]
    InfeasibleCoefficient { index: usize },

    #[error("symmetric eigendecomposition did not converge (n = {n})")]
    DecompositionFailure { n: usize },

    #[error("no positive solution: the kernel complexity is identically zero")]
    NoSolution,

    #[error("solver hit {sweeps} sweeps with KKT residual {kkt:.3e} > tolerance {tol:.3e}")]
    NotConverged { sweeps: usize, kkt: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("packing shortfall: found {found} codewords, needed {target}")]
    PackingShortfall { found: usize, target: usize },

    #[error("univariate family too small: alphabet {alphabet} exceeds {available} usable basis directions")]
    InsufficientUnivariateFamily { alphabet: usize, available: usize },

    #[error("degenerate random draw (all basis weights zero after retry)")]
    DegenerateDraw,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
