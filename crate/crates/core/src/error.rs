use crate::lattice::LatticePoint;
use crate::order::Order;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a point of the dP3 lattice")]
    NotOnLattice(LatticePoint),
    #[error("{0} is not a hexagon center")]
    NotACenter(LatticePoint),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("{0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matching belongs to the diamond of order {found}, expected order {expected}")]
    DiamondMismatch { expected: Order, found: Order },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
