//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by kernel evaluation, quadrature and the check runner.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Gamma evaluated at a nonpositive integer.
    #[error("gamma pole: z = {re}{im:+}i is a nonpositive integer")]
    GammaPole { re: f64, im: f64 },

    /// Hypergeometric argument outside the certified evaluation domain.
    #[error("2F1 argument z = {re}{im:+}i outside certified domain: {detail}")]
    OutsideCertifiedDomain { re: f64, im: f64, detail: String },

    /// Requested accuracy could not be met with the configured budget.
    #[error("precision loss: achieved ~{achieved:.3e}, requested {requested:.3e}")]
    PrecisionLoss { achieved: f64, requested: f64 },

    /// The (m, k) pair is not one of the supported space instances.
    #[error("unsupported space instance (m, k) = ({m}, {k}); supported: k = 0 with even m > 0, or (2, 1)")]
    UnsupportedInstance { m: u32, k: u32 },

    /// An integral does not converge in the requested exponent regime.
    #[error("divergent regime: {0}")]
    DivergentRegime(String),

    /// Quadrature failed to converge to the requested tolerance.
    #[error("quadrature non-convergence: {0}")]
    QuadratureFailure(String),

    /// Monte-Carlo budget exhausted before the error target was met.
    #[error("budget exhausted: relative standard error {achieved:.3e} above requested {requested:.3e}")]
    BudgetExhausted { achieved: f64, requested: f64 },

    /// Inversion requested before the constant was calibrated.
    #[error("inverse transform is uncalibrated; run calibration first")]
    Uncalibrated,

    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
