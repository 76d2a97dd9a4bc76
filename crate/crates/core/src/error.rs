use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("duplicate edge {u} -- {v}")]
    DuplicateEdge { u: String, v: String },

    #[error("self-loop on node {0}")]
    SelfLoop(String),

    #[error("negative load {load} on edge {u} -- {v}")]
    NegativeLoad { u: String, v: String, load: f64 },

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("density is undefined on the empty graph")]
    EmptyGraph,

    #[error("graph has no edges")]
    Edgeless,

    #[error("clique size {k} outside supported range 2..={max}")]
    CliqueSizeOutOfRange { k: usize, max: usize },

    #[error("measure {0} has no dense-cover algorithm (evaluation only)")]
    UnsupportedMeasure(String),

    #[error("invalid measure expression: {0}")]
    Measure(String),

    #[error("negative edge weight {0}")]
    NegativeWeight(f64),

    #[error("source and target must differ")]
    SameEndpoints,

    #[error("graph has {nodes} nodes, exceeding the oracle limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("path is invalid: {0}")]
    InvalidPath(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
