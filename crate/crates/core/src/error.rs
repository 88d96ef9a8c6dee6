use thiserror::Error;

use crate::disk::ArcId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label {0} is smaller than 2")]
    LabelTooSmall(usize),
    #[error("a labelling needs at least one label")]
    EmptyLabelling,
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("arc {arc} does not exist (object has {count} arcs)")]
    InvalidArc { arc: ArcId, count: usize },
    #[error("arc {0} listed twice")]
    DuplicateArc(ArcId),
    #[error("no arcs selected")]
    EmptySelection,
    #[error("region order is not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("object enumeration exceeded the cap of {0} objects")]
    ObjectCap(usize),
    #[error("a move cannot be complemented with itself")]
    SameMove,
    #[error("words or moves start at different objects")]
    SourceMismatch,
    #[error("words are not composable")]
    NotComposable,
    #[error("reversing did not terminate within {0} steps")]
    Divergence(usize),
    #[error("graph construction exceeded the cap of {0} nodes")]
    NodeCap(usize),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("all labels must be 3 for Tamari orderings")]
    NotAllThrees,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by a resource cap rather than bad input or
    /// a violated property.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::ObjectCap(_) | Error::Divergence(_) | Error::NodeCap(_)
        )
    }
}
