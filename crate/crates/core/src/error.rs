use thiserror::Error;

/// Errors produced by the alignment, search and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An enumeration or search would exceed its configured size cap.
    #[error("{what}: {requested} items exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("symbol {0} has no value in this channel")]
    UnresolvedSymbol(String),

    /// The channel realization hit one of the measure-zero bad events
    /// (colliding directions, a non-injective constellation, zero distance).
    #[error("degenerate realization: {0}")]
    Degenerate(String),

    /// Signaling plan violates an alignment condition.
    #[error("alignment condition violated at receiver {receiver}: {details}")]
    Violation { receiver: usize, details: String },

    /// Direction values span too many binades for the exact fixed-point kernel.
    #[error("dynamic range too wide for exact search: {0}")]
    DynamicRange(String),

    #[error("no grid point meets the SER target {target}")]
    SerTargetUnmet { target: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
