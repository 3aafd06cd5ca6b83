use thiserror::Error;

/// Error type shared by all library modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix argument is malformed (non-square, non-finite entries, ...).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// A matrix required to be positive definite has an eigenvalue below
    /// the rejection floor.
    #[error("matrix not positive definite: min eigenvalue {min_eig:e} below floor {floor:e}")]
    NotPositiveDefinite { min_eig: f64, floor: f64 },

    /// The K matrix of the Riccati problem is numerically singular.
    #[error("singular K: smallest singular value {sigma_min:e} below threshold {threshold:e}")]
    SingularK { sigma_min: f64, threshold: f64 },

    /// An internal numerical routine failed; indicates a bug or an input
    /// far outside the supported regime.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The structural covariation matrix of the share process degenerated,
    /// which signals a violated model precondition (e.g. the risk-free
    /// weight hitting zero).
    #[error("degenerate structure: {0}")]
    DegenerateStructure(String),

    /// The simulation grid is too coarse for the requested rebalancing
    /// barrier; hitting-time overshoot would dominate the results.
    #[error(
        "grid too coarse: expected {expected_steps:.1} grid steps per rebalance, need at least {min_steps:.0}"
    )]
    GridTooCoarse { expected_steps: f64, min_steps: f64 },

    /// Discrete wealth became non-positive.
    #[error("bankruptcy at grid node {node}: wealth {wealth:e}")]
    Bankruptcy { node: usize, wealth: f64 },

    /// Invalid argument combination.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
