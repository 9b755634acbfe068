use thiserror::Error;

/// Errors produced by the toolkit.
///
/// The variants map onto the failure classes the command-line front end
/// distinguishes (configuration, solver, a-priori constraint).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("a-priori constraint violated: {0}")]
    Constraint(String),

    #[error("meshing failed: {0}")]
    Meshing(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("material: {0}")]
    Material(String),

    #[error("load: {0}")]
    Load(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("airy: {0}")]
    Airy(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("inverse: {0}")]
    Inverse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
