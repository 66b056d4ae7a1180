use thiserror::Error;

/// Errors raised by constructors and analysis entry points.
///
/// Points in messages are 1-based, brace elements 0-based, matching the
/// file formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("empty generator list")]
    NoGenerators,

    #[error("not a bijection: {0}")]
    NotBijective(String),

    #[error("table shape: {0}")]
    Shape(String),

    #[error("entry {value} out of range 1..={n} at {at}")]
    OutOfRange { value: i64, n: usize, at: String },

    #[error("axiom {axiom} fails at (x, y, z) = ({x}, {y}, {z})")]
    Axiom { axiom: &'static str, x: usize, y: usize, z: usize },

    #[error("structure is degenerate: {0}")]
    Degenerate(String),

    #[error("not a cycle set (sigma differs from delta)")]
    NotInvolutive,

    #[error("not a group table ({table}): {reason}")]
    NotGroup { table: &'static str, reason: String },

    #[error("brace compatibility fails at (a, b, c) = ({a}, {b}, {c})")]
    Compatibility { a: usize, b: usize, c: usize },

    #[error("dynamical pair: {0}")]
    Cocycle(String),

    #[error("not an epimorphism: {0}")]
    NotEpimorphism(String),

    #[error("structure is decomposable")]
    Decomposable,

    #[error("structure is not irretractable")]
    NotIrretractable,

    #[error("point {0} does not generate the structure")]
    NotGenerator(usize),

    #[error("construction inconsistent: {0}")]
    ConstructionInconsistent(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("size {0} is outside the supported range")]
    SizeOutOfRange(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
