use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for {n} vertices")]
    OutOfRangeVertex { vertex: u32, n: u32 },

    #[error("edge has {got} entries, expected {expected}")]
    WrongArity { got: usize, expected: usize },

    #[error("uniformity must be at least 2, got {0}")]
    InvalidUniformity(usize),

    #[error("generator spec invalid: {0}")]
    InvalidGenSpec(String),

    #[error("partition invalid: {0}")]
    InvalidPartition(String),

    #[error("bias leaves edge probabilities outside [0, 1]: {0}")]
    BiasOutOfRange(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line} conflicts with header: {msg}")]
    HeaderMismatch { line: usize, msg: String },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u128, dim: u128 },

    #[error("dimension {base}^{exp} overflows the address space")]
    DimOverflow { base: usize, exp: usize },

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("mode dimensions do not match: {0}")]
    DimMismatch(String),

    #[error("map contains a non-finite value")]
    NonFiniteValue,

    #[error("operation needs at least 2 modes, map has {0}")]
    ArityTooSmall(usize),

    #[error("power level {level} out of range for {modes} modes")]
    LevelOutOfRange { level: usize, modes: usize },

    #[error("budget exceeded: needs {required} entries, cap is {cap}")]
    BudgetExceeded { required: u128, cap: u128 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("spectrum is degenerate: leading eigenvalue is zero")]
    DegenerateSpectrum,

    #[error("length parameter {got} below minimum {min}")]
    LengthTooShort { got: usize, min: usize },

    #[error("cycle length must be even, got {0}")]
    OddLength(usize),

    #[error("integer count overflowed 128-bit arithmetic")]
    CountOverflow,

    #[error("norm brackets disagree across orderings: {0}")]
    OrderingDisagreement(String),

    #[error("norm bracket inverted: lower {lower} exceeds upper {upper}")]
    BracketInverted { lower: f64, upper: f64 },

    #[error("binary dump malformed: {0}")]
    MalformedDump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
