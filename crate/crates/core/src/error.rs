use thiserror::Error;

use crate::algorithms::Variant;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("variant {0:?} is not handled by this evaluator")]
    UnsupportedVariant(Variant),

    #[error("{what} = {value} exceeds the limit of {limit}")]
    ResourceLimit {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    /// The footnote-style scale ratio divides by `sqrt(epsilon)`.
    #[error("scale ratio is undefined at epsilon = 0")]
    UndefinedRatio,

    #[error("average query count diverges at epsilon = 1")]
    Divergent,

    #[error("state leaves the marked/unmarked invariant subspace (residual {0:e})")]
    SubspaceViolation(f64),

    #[error("{what}: closed form and simulation differ by {residual:e}")]
    Mismatch { what: String, residual: f64 },

    #[error("invalid database: {0}")]
    InvalidDatabase(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

pub(crate) fn check_ratio(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "(0, 1]",
        })
    }
}
