use core::fmt;

/// Failure modes shared by every module of the core crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible domain.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A series with zero sample variance was passed to a correlation estimate.
    DegenerateSeries,
    /// Two inputs that must agree in length do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A symmetric system could not be factorized, even after jitter where allowed.
    NumericalDegeneracy,
    /// A caller broke a structural precondition (e.g. a CH missing from its active set).
    ContractViolation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(
                f,
                "parameter `{name}` = {value} out of domain (expected {expected})"
            ),
            Error::DegenerateSeries => f.write_str("series has zero sample variance"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NumericalDegeneracy => f.write_str("symmetric system is not positive definite"),
            Error::ContractViolation(what) => write!(f, "contract violation: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check(
    ok: bool,
    name: &'static str,
    value: f64,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
