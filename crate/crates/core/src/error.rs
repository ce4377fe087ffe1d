use thiserror::Error;

/// Errors produced by the codec and its building blocks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed PGM at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("position ({row}, {col}) has no full neighbourhood")]
    Position { row: usize, col: usize },

    #[error("embedding pushed value {value} outside [0, {max}]")]
    Overflow { value: i32, max: i32 },

    #[error("corrupted stego data: {0}")]
    Corruption(String),

    #[error("insufficient capacity: payload needs {needed} bits, cover offers {available}")]
    InsufficientCapacity { needed: u64, available: u64 },

    #[error("header needs {needed} LSB bits but the cover only has {available}")]
    HeaderSpace { needed: usize, available: usize },

    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    Shape(usize, usize, usize, usize),

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn corrupt(msg: impl Into<String>) -> Error {
    Error::Corruption(msg.into())
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
