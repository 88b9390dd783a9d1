use std::fmt;

use crate::spaces::SpaceKind;

/// Errors raised by the metric-space kernel, the mechanisms and the checkers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A point does not belong to the space it was used with.
    #[error("point {point} does not belong to the {space} space")]
    OutOfSpace { point: String, space: SpaceKind },

    /// A numeric parameter was outside its admissible range.
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    /// The tree description violates connectivity, acyclicity or edge-length constraints.
    #[error("malformed tree: {0}")]
    MalformedTree(String),

    /// Midpoint split requested between two coinciding points.
    #[error("degenerate split: the two path endpoints coincide")]
    DegenerateSplit,

    /// The prediction is not in the admissible set of the space.
    #[error("prediction {point} is not admissible for a {space} space ({reason})")]
    InadmissiblePrediction {
        point: String,
        space: SpaceKind,
        reason: &'static str,
    },

    /// Inputs are individually valid but inconsistent with each other.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The requested quantity is irrational and the scalar type is exact.
    #[error("{0} is not representable exactly in this scalar type")]
    Inexact(&'static str),

    /// A generator could not satisfy its integrality constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The combination of space and model is not covered.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(name: &'static str, value: impl fmt::Display, range: &'static str) -> Self {
        Error::Domain {
            name,
            value: value.to_string(),
            range,
        }
    }
}
