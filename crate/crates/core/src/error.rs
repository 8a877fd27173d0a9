use thiserror::Error;

/// Errors raised across the library.
///
/// Index triples are reported 1-based, matching the file formats.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must satisfy 2 <= n <= {max}, got {n}")]
    InvalidDimension { n: usize, max: usize },
    #[error("index ({j},{i},{k}) out of range for n = {n}")]
    IndexOutOfRange { j: usize, i: usize, k: usize, n: usize },
    #[error("duplicate entry for ({j},{i},{k}) in {tensor}")]
    DuplicateEntry { tensor: &'static str, j: usize, i: usize, k: usize },
    #[error("C entries ({j},{i},{k}) and ({j},{k},{i}) are not negatives of each other")]
    AntisymmetryViolation { j: usize, i: usize, k: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("invalid degree k = {k} for n = {n}")]
    InvalidDegree { k: usize, n: usize },
    #[error("algebra fails the Jacobi identity (residual {residual:.3e})")]
    InvalidAlgebra { residual: f64 },
    #[error("structure constants do not fit the {family} pattern at ({j},{i},{k}) in {tensor}")]
    PatternMismatch { family: &'static str, tensor: &'static str, j: usize, i: usize, k: usize },
    #[error("integrability violated: residuals {first:.3e} and {second:.3e}")]
    IntegrabilityViolation {
        first: f64,
        second: f64,
        /// Max-abs of `lambda (X* + Y) + [X*, Y] - Z conj(Z)` and
        /// `lambda Z - (Z X^t + Y Z)` as row-major `[re, im]` matrices.
        first_matrix: Vec<Vec<[f64; 2]>>,
        second_matrix: Vec<Vec<[f64; 2]>>,
    },
    #[error("lambda must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("algebra is not unimodular (defect {0:.3e})")]
    NotUnimodular(f64),
    #[error("matrix is singular (smallest singular value {0:.3e})")]
    Singular(f64),
    #[error("matrix pair is not compatible: {equation} has residual {residual:.3e}")]
    NotCompatible { equation: &'static str, residual: f64 },
    #[error("closed form and general engine disagree on {property}: closed {closed}, engine {engine} (residual {residual:.3e})")]
    CrossCheckFailure { property: String, closed: bool, engine: bool, residual: f64 },
    #[error("not astheno-Kaehler: {0}")]
    NotAstheno(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
