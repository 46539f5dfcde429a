use thiserror::Error;

use crate::model::{ModelError, Objective, VertexId};

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expected a {expected}D instance, got {got}D")]
    WrongDimension { expected: u8, got: u8 },
    #[error("instance has {edges} edges, above the cap of {cap}")]
    TooLarge { edges: usize, cap: usize },
    #[error("search budget exhausted after {nodes} nodes without a conclusive answer")]
    BudgetExhausted { nodes: u64 },
    #[error("graph is not bipartite; odd cycle {cycle:?}")]
    NotBipartite { cycle: Vec<VertexId> },
    #[error("partition is invalid: {0}")]
    InvalidPartition(String),
    #[error("coloring is not proper: {0}")]
    ImproperColoring(String),
    #[error("{formulation} does not support objective {objective}")]
    RequestedObjectiveUnsupported {
        formulation: &'static str,
        objective: Objective,
    },
    #[error("constraint family `{0}` cannot be written without a sidecar section")]
    UnrepresentableConstraint(String),
    #[error("gadget certification failed: {0}")]
    CertificationFailed(String),
    #[error("placement failed: {0}")]
    PlacementError(String),
    #[error("wire angle {theta} leaves an inner angle below {min_inner}")]
    ThetaOutOfRange { theta: f64, min_inner: f64 },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
