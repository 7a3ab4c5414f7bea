use thiserror::Error;

/// Everything that can go wrong while building or analysing a complex.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("network is not generic at cell {cell}: {detail}")]
    Genericity { cell: String, detail: String },

    #[error("vertices {first} and {second} share the value {value}")]
    Injectivity { first: String, second: String, value: f64 },

    #[error("F is constant on the positive-dimensional cell {cell}")]
    FlatCell { cell: String },

    #[error("singular linear system at cell {cell}")]
    SingularSystem { cell: String },

    #[error("vertex {vertex} is missing the incident edge {edge}")]
    MissingEdge { vertex: String, edge: String },

    #[error("architecture error: {0}")]
    Architecture(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("numerical instability in the simplex solver: {0}")]
    NumericalInstability(String),

    #[error("cell {cell} is not bounded above")]
    UnboundedCell { cell: String },

    #[error("lower star of {vertex} was not completely paired: {detail}")]
    IncompletePairing { vertex: String, detail: String },

    #[error("matching contains a closed V-path")]
    CyclicMatching,

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("inconsistent complex: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Short machine-readable tag, used for the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::IndexOutOfRange(_) => "index",
            Error::Genericity { .. } => "genericity",
            Error::Injectivity { .. } => "injectivity",
            Error::FlatCell { .. } => "flat_cell",
            Error::SingularSystem { .. } => "singular_system",
            Error::MissingEdge { .. } => "missing_edge",
            Error::Architecture(_) => "architecture",
            Error::Dimension(_) => "dimension",
            Error::NumericalInstability(_) => "numerical_instability",
            Error::UnboundedCell { .. } => "unbounded_cell",
            Error::IncompletePairing { .. } => "incomplete_pairing",
            Error::CyclicMatching => "cyclic_matching",
            Error::InvalidMatching(_) => "invalid_matching",
            Error::Inconsistent(_) => "inconsistent",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
