use thiserror::Error;

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("PoleAtNonPositiveInteger: gamma has a pole at s = {0}")]
    PoleAtNonPositiveInteger(Complex64),

    #[error("DomainError: {0}")]
    Domain(String),

    #[error("SingularPoint: evaluation point lies on a lattice point (index {index:?})")]
    SingularPoint { index: Vec<i64> },

    #[error("PoleAtS: series has a pole at s = {s} (zero mode of the dual sum)")]
    PoleAtS { s: Complex64 },

    #[error("NotConverged: shell budget of {max_shells} exhausted (last shell magnitude {last:e})")]
    NotConverged { max_shells: usize, last: f64 },

    #[error("DegenerateLattice: {0}")]
    DegenerateLattice(String),

    #[error("InvalidInput: {0}")]
    InvalidInput(String),

    #[error("QuadratureTailTooLarge: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    QuadratureTailTooLarge { tail: f64, tol: f64 },

    #[error("OnJumpLocus: the connection is not defined on the plane y = 0")]
    OnJumpLocus,

    #[error("AxisSingularity: the connection is singular on the axis z = 0")]
    AxisSingularity,

    #[error("GridTooCoarse: spacing {h} exceeds 1/8 of the distance {distance} to the nearest singularity")]
    GridTooCoarse { h: f64, distance: f64 },
}

impl Error {
    /// Short diagnostic tag, the leading word of the display form.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::PoleAtNonPositiveInteger(_) => "PoleAtNonPositiveInteger",
            Error::Domain(_) => "DomainError",
            Error::SingularPoint { .. } => "SingularPoint",
            Error::PoleAtS { .. } => "PoleAtS",
            Error::NotConverged { .. } => "NotConverged",
            Error::DegenerateLattice(_) => "DegenerateLattice",
            Error::InvalidInput(_) => "InvalidInput",
            Error::QuadratureTailTooLarge { .. } => "QuadratureTailTooLarge",
            Error::OnJumpLocus => "OnJumpLocus",
            Error::AxisSingularity => "AxisSingularity",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
