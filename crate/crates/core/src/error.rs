use thiserror::Error;

use crate::grad_tune::TuneReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("even length required, got {0} taps")]
    EvenLengthRequired(usize),

    #[error("not orthogonal: double-shift deviation {deviation:e} exceeds {tol:e}")]
    NotOrthogonal { deviation: f64, tol: f64 },

    #[error("factorization breakdown at stage {stage}")]
    FactorizationBreakdown { stage: usize },

    #[error("singular lattice stage {index}: |k| = 1")]
    SingularLatticeStage { index: usize },

    #[error("not perfect-reconstruction: polyphase determinant is not a monomial (residual {residual:e})")]
    NotPerfectReconstruction { residual: f64 },

    #[error("singular polyphase matrix")]
    SingularPolyphase,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty input")]
    Empty,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("objective became non-finite at iteration {iteration}")]
    Diverged {
        iteration: usize,
        partial: Box<TuneReport>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
