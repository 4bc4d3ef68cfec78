//! Error type shared by every module of the crate.

use std::fmt;

/// Failure modes of the numerical kernels and geometry operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shape constraint violated (non-square input, mismatched operands, ...).
    Dimension(String),
    /// A NaN or infinity reached an operation that requires finite data.
    NonFinite(String),
    /// Matrix numerically singular; carries the magnitude of the failing pivot.
    Singular { pivot: f64 },
    /// Input expected to be Hermitian deviates beyond tolerance.
    NotHermitian { deviation: f64 },
    /// Scalar function applied on a spectrum hits a pole at this eigenvalue.
    EigenPole { eigenvalue: f64 },
    /// Jacobi eigensolver failed to reach the off-diagonal threshold.
    NoConvergence { sweeps: usize },
    /// Geodesic parameter reached the cut locus (tan pole / uniqueness bound).
    CutLocus { angle: f64 },
    /// A Moebius image left the coordinate chart (CZ + D singular).
    ChartExit(String),
    /// Phase requested for a zero (or numerically zero) complex value.
    UndefinedPhase(String),
    /// Integrand or intermediate quantity left the numerical domain.
    NumericalDomain(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::NonFinite(msg) => write!(f, "non-finite value: {msg}"),
            Error::Singular { pivot } => {
                write!(f, "singular matrix: pivot magnitude {pivot:.3e}")
            }
            Error::NotHermitian { deviation } => {
                write!(f, "matrix not Hermitian: max deviation {deviation:.3e}")
            }
            Error::EigenPole { eigenvalue } => {
                write!(f, "scalar function singular at eigenvalue {eigenvalue:.17e}")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "eigensolver did not converge within {sweeps} sweeps")
            }
            Error::CutLocus { angle } => {
                write!(f, "geodesic parameter {angle:.6} reached the cut-locus bound")
            }
            Error::ChartExit(msg) => write!(f, "image leaves the chart: {msg}"),
            Error::UndefinedPhase(msg) => write!(f, "undefined phase: {msg}"),
            Error::NumericalDomain(msg) => write!(f, "numerical domain error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
