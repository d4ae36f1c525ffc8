//! Crate-wide error type.
//!
//! Every fallible operation returns one of these variants; the variant names
//! mirror the failure vocabulary used throughout the library so that callers
//! (and the CLI exit-code mapping) can distinguish "the check ran and the
//! answer is no" from "the inputs cannot support the computation".

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on arguments was violated (non-prime modulus, zero
    /// polynomial, truncation too small, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// p-adic working precision cannot support the requested computation.
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),

    /// The slope-zero part of a p-adic factorization does not have rank one,
    /// so there is no well-defined unit root.
    #[error("unit root undefined: {0}")]
    NotUnitRootRankOne(String),

    /// A characteristic polynomial has vanishing leading coefficient, i.e.
    /// Frobenius is not invertible, so duals and related constructions fail.
    #[error("singular Frobenius: {0}")]
    SingularFrobenius(String),

    /// A Legendre parameter landed on a singular fiber (lambda in {0, 1}).
    #[error("singular fiber: {0}")]
    SingularFiber(String),

    /// An Euler product was requested beyond the degree through which the
    /// dataset is complete.
    #[error("incomplete dataset: complete through degree {complete_through}, first gap at degree {first_gap}")]
    IncompleteDataset { complete_through: u32, first_gap: u32 },

    /// Two polygons cannot be compared (their widths differ).
    #[error("incomparable polygons: {0}")]
    IncomparablePolygons(String),

    /// Two datasets cannot be compared point by point.
    #[error("incomparable datasets: {0}")]
    IncomparableDatasets(String),

    /// A floating-point enclosure could not be certified to the requested
    /// tolerance.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A well-posed question whose answer the implementation cannot determine
    /// from the given data (as opposed to a negative answer).
    #[error("cannot determine: {0}")]
    CannotDetermine(String),

    /// A dataset file violates the schema; names the point and field involved
    /// when they are known.
    #[error("malformed dataset{}: {message}", match point_id { Some(id) => format!(" (point {id})"), None => String::new() })]
    Malformed {
        point_id: Option<String>,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand for schema violations without a point attribution.
    pub fn malformed(message: impl Into<String>) -> Self {
        Error::Malformed {
            point_id: None,
            message: message.into(),
        }
    }

    /// Shorthand for schema violations at a specific point.
    pub fn malformed_at(point_id: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            point_id: Some(point_id.into()),
            message: message.into(),
        }
    }
}
