use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit-code families:
/// input/format problems, degenerate inputs, and failed lookups.
#[derive(Debug, Error)]
pub enum Error {
    /// A file or string could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An address string violated the grammar. `field` is 1-based.
    #[error("address parse error in field {field}: {msg}")]
    AddressSyntax { field: usize, msg: String },

    /// A value or record violated a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A linear-reference distance fell outside the edge.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The input carries no usable road data (unmappable tile).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Spectral bisection requires a connected graph.
    #[error("graph is not connected")]
    NotConnected,

    /// Normalized cut is undefined when one side has zero association.
    #[error("degenerate cut: a side has zero association")]
    DegenerateCut,

    /// No region with the requested label exists in the map.
    #[error("unknown region: {0}")]
    UnknownRegion(String),

    /// No road with the requested (region, number) exists in the map.
    #[error("unknown road: {0}")]
    UnknownRoad(String),

    /// The address names a different city/state/country than the map.
    #[error("city mismatch: map is {expected}, address says {got}")]
    CityMismatch { expected: String, got: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
