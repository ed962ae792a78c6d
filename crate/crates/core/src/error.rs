use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KitaevError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not antisymmetric (residual {0:e})")]
    NotAntisymmetric(f64),

    #[error("matrix is not orthogonal (residual {0:e})")]
    NotOrthogonal(f64),

    #[error("gate is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("bond dimension {dim} exceeds the cap of {cap}")]
    BondOverflow { dim: usize, cap: usize },

    #[error("all singular values fell below the truncation threshold")]
    Annihilated,

    #[error("{n_sites} sites exceed the dense budget of {max} sites")]
    BudgetExceeded { n_sites: usize, max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, KitaevError>;
