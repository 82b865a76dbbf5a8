use thiserror::Error;

/// Errors raised by the measure model, the engines and the series oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{op}: argument out of domain ({detail})")]
    Domain { op: &'static str, detail: String },

    /// A kernel was evaluated (numerically) on top of its pole.
    #[error("{op}: near-singular kernel evaluation ({detail})")]
    Singularity { op: &'static str, detail: String },

    /// Σ-transform requested for a measure with vanishing first moment.
    #[error("first moment {modulus:e} is too small for a Σ-transform")]
    ZeroFirstMoment { modulus: f64 },

    /// The measure failed validation; carries the rendered issue list.
    #[error("inadmissible measure: {0}")]
    InvalidMeasure(String),

    /// An iteration did not reach its target.
    #[error("{op}: no convergence ({detail})")]
    Convergence { op: &'static str, detail: String },

    /// Malformed measure file.
    #[error("measure file: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn singular(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Singularity {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics, false for bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singularity { .. } | Error::Convergence { .. } | Error::ZeroFirstMoment { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
