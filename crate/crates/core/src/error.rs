use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("{what} = {value} lies outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("sequence increases at index {index}")]
    NotMonotone { index: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("shift is not a multiple of the grid spacing")]
    Misaligned,
    #[error("no shell in {first}..={last} is resolvable at grid level {level}")]
    Resolution { first: u32, last: u32, level: u32 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Validates a Lebesgue/sequence exponent in `(0, ∞]`.
pub(crate) fn check_exponent(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, alloc::format!("must lie in (0, inf], got {value}")))
    }
}
