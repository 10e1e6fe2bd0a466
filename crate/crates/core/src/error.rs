use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid packing: {0}")]
    InvalidPacking(String),
    #[error("balls {i} and {j} overlap: center distance {distance} < {min}")]
    Overlap {
        i: usize,
        j: usize,
        distance: f64,
        min: f64,
    },
    #[error("vertex {vertex} has degree {degree} > 2d = {max}")]
    Degree {
        vertex: usize,
        degree: usize,
        max: usize,
    },
    #[error("index {index} out of range for {len} balls")]
    Index { index: usize, len: usize },
    #[error("points are collinear")]
    Collinear,
    #[error("hyperplane normal must be non-zero and finite")]
    DegenerateNormal,
    #[error("certificate has no plane for pair ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("balls {0} and {1} share a center")]
    DuplicateCenter(usize, usize),
    #[error("operation requires {0}")]
    Mode(&'static str),
    #[error("cannot fit {n} balls in the generator box")]
    Capacity { n: usize },
    #[error("surface counts disagree: faces {faces} vs identity {identity}")]
    InternalInconsistency { faces: i64, identity: i64 },
    #[error("(n = {n}, d = {d}) exceeds desk-scale search limits; pass allow_large to override")]
    Limit { n: usize, d: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("orthoscheme norms {0:?} are not strictly increasing")]
    Realizability([f64; 3]),
    #[error("contact graph is disconnected")]
    Disconnected,
    #[error("embedding degeneracy: {0}")]
    Embedding(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
