use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented range constraint. `param` names the
    /// first offending argument.
    #[error("range error: {param} {message}")]
    Range {
        param: &'static str,
        message: String,
    },

    /// A series was too short for the requested operation.
    #[error("truncation error: operation needs depth {needed}, series has {got}")]
    Truncation { needed: usize, got: usize },

    /// A coefficient sequence did not supply a required index.
    #[error("missing coefficient a_{index} (sequence supplies {len})")]
    MissingCoefficient { index: usize, len: usize },

    /// Two evaluation paths that must agree disagreed beyond tolerance.
    #[error("consistency error in {context}: {left} vs {right}")]
    Inconsistent {
        context: &'static str,
        left: f64,
        right: f64,
    },

    /// A string could not be parsed as a rational number.
    #[error("cannot parse {input:?} as a rational number")]
    Parse { input: String },
}

impl Error {
    pub(crate) fn range(param: &'static str, message: impl Into<String>) -> Self {
        Error::Range {
            param,
            message: message.into(),
        }
    }
}
