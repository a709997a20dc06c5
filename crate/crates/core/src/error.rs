use thiserror::Error;

/// Why a point query against a construction failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Error)]
pub enum LocateError {
    #[error("point lies outside the construction's region")]
    OutsideRegion,
    #[error("point lies in a declared hole")]
    PointInHole,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty tile")]
    EmptyTile,
    #[error("tile vectors have different lengths")]
    RaggedTile,
    #[error("tile has a repeated point")]
    DuplicatePoint,
    #[error("illegal character {0:?} in tile string")]
    IllegalChar(char),
    #[error("bad tile: {0}")]
    BadTile(String),
    #[error("bad signature: {0}")]
    Signature(String),
    #[error("point has wrong shape (expected {expected} axes, got {got}) or is out of range")]
    PointShape { expected: usize, got: usize },
    #[error("parameter out of range: {0}")]
    Param(String),
    #[error("{0}")]
    Locate(#[from] LocateError),
    #[error("region has {points} points, above the materialization limit {limit}")]
    LimitExceeded { points: u128, limit: u128 },
    #[error("projection is not injective on the tile of block {0}")]
    NotInjective(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{0} is not in the hole")]
    NotInHole(String),
    #[error("subfamily size {size} is not 1 modulo {modulus}")]
    Parity { size: usize, modulus: usize },
    #[error("size bound violated: {0}")]
    Bound(String),
    #[error("family too small: need {need}, have {have}")]
    FamilyTooSmall { need: usize, have: usize },
    #[error("tile equals the whole group")]
    WholeGroup,
    #[error("search domain has {0} cells, above the limit")]
    DomainTooLarge(usize),
    #[error("malformed certificate: {0}")]
    Certificate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
