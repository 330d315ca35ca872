use core::fmt;

/// Precondition violations. Runtime outcomes such as budget exhaustion are
/// reported through [`crate::Status`] instead.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    EmptyVector,
    NonFinite,
    InvalidParameter(&'static str),
    /// The solver needs a bounded set and no diameter is available.
    MissingDiameter,
    /// No inner method applies to compute the requested certificate.
    Uncertifiable(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyVector => f.write_str("vectors must have dimension >= 1"),
            Error::NonFinite => f.write_str("non-finite value"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::MissingDiameter => f.write_str("bounded set with known diameter required"),
            Error::Uncertifiable(msg) => write!(f, "uncertifiable: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<(), Error> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_positive(value: f64, what: &'static str) -> Result<(), Error> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what))
    }
}
