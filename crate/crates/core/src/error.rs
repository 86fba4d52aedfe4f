use num_complex::Complex64;
use thiserror::Error;

use crate::netlist::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("evaluation at s = {s} hits a pole (nearest pole {nearest})")]
    PoleEvaluation { s: Complex64, nearest: Complex64 },

    #[error("{p} is not a pole")]
    NotAPole { p: Complex64 },

    #[error("transfer function is improper (numerator degree {num} > denominator degree {den})")]
    Improper { num: usize, den: usize },

    #[error("transfer matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lim s^{k} G(s) does not exist for entry ({row},{col}): origin pole of order {order}")]
    LimitDoesNotExist {
        row: usize,
        col: usize,
        order: usize,
        k: usize,
    },

    #[error("entry ({row},{col}) has an origin pole of order {order} (at most 2 allowed)")]
    OriginPoleOrder { row: usize, col: usize, order: usize },

    #[error("ill-posed loop: I {sign} D_plant*D_controller is singular (smallest singular value {margin:e})")]
    IllPosed { sign: char, margin: f64 },

    #[error("transfer function is identically zero")]
    ZeroTransfer,

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("invalid transfer function string: {0}")]
    TfSyntax(String),

    #[error("model error: {0}")]
    Model(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("elaboration error: {0}")]
    Elaborate(String),
}
