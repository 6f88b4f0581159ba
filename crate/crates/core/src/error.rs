use thiserror::Error;

/// Errors produced by model evaluation, scenario loading and the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input violated its documented domain.
    #[error("invalid parameter `{name}` = {value}: must satisfy {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Scenario or sweep file rejected (parse error, unknown key, bad range).
    #[error("scenario: {0}")]
    Scenario(String),

    /// Sweep definition rejected.
    #[error("sweep: {0}")]
    Sweep(String),

    /// The adaptive quadrature hit its depth limit before reaching tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A closed-form mean age came out non-finite or below one slot; the
    /// expression is not trusted at this operating point.
    #[error("mean-age expression out of domain at lambda={lambda}, mu_p={mu_p} (value {value})")]
    AgeOutOfDomain { lambda: f64, mu_p: f64, value: f64 },

    /// Two supposedly equivalent evaluations of the same closed form
    /// disagreed beyond round-off; indicates a transcription bug.
    #[error("closed-form cross-check failed for {what}: {a} vs {b}")]
    CrossCheck { what: &'static str, a: f64, b: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand used by the validation helpers below.
pub(crate) fn require(
    ok: bool,
    name: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}

/// A finite, non-NaN probability in [0, 1].
pub(crate) fn require_probability(name: &'static str, value: f64) -> Result<()> {
    require(
        value.is_finite() && (0.0..=1.0).contains(&value),
        name,
        value,
        "a probability in [0, 1]",
    )
}

/// A finite, strictly positive quantity.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    require(value.is_finite() && value > 0.0, name, value, "> 0")
}

/// A finite, non-negative quantity.
pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<()> {
    require(value.is_finite() && value >= 0.0, name, value, ">= 0")
}
