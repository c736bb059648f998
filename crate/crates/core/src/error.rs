use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("resource c = ({c1}, {c2}, {c3}) is unphysical (min eigenvalue {min_eigenvalue:e})")]
    Unphysical {
        c1: f64,
        c2: f64,
        c3: f64,
        min_eigenvalue: f64,
    },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Bloch vector norm {norm} exceeds the unit ball")]
    BlochOutOfBall { norm: f64 },

    #[error("finite-difference step {0:e} outside [1e-7, 1e-3]")]
    InvalidStep(f64),

    #[error("threshold undefined: the radicand c1^2+c2^2+(c1^2-c2^2)cos(2 phi) vanishes")]
    DegenerateDenominator,

    #[error("threshold undefined at D = 0: every memory value gives the same QFI")]
    DZero,
}
