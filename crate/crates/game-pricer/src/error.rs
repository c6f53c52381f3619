use thiserror::Error;

/// Errors produced by the pricing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    /// A market, contract, or numerical parameter failed validation.
    #[error("invalid {field}: {reason}")]
    InvalidInput {
        field: &'static str,
        reason: String,
    },

    /// The CRR up-probability left the open interval (0, 1). This happens
    /// when r*dt escapes the no-arbitrage band (ln d, ln u).
    #[error(
        "risk-neutral up-probability {p} outside (0, 1): r*dt = {r_dt} must lie \
         strictly between ln(d) = {ln_d} and ln(u) = {ln_u}"
    )]
    ProbabilityBand {
        p: f64,
        r_dt: f64,
        ln_d: f64,
        ln_u: f64,
    },

    /// Tridiagonal elimination hit a zero pivot.
    #[error("singular tridiagonal system: zero pivot in row {row}")]
    SingularSystem { row: usize },

    /// Regression was asked to fit an empty sample.
    #[error("regression sample is empty")]
    EmptySample,

    /// Regression x and y inputs differ in length.
    #[error("regression inputs differ in length: x has {x_len}, y has {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },

    /// The requested spot lies outside the PDE grid.
    #[error("spot {spot} lies outside the grid [0, {s_max}]")]
    SpotOffGrid { spot: f64, s_max: f64 },

    /// A path set is inconsistent with the parameters it is priced under.
    #[error("path set inconsistent with pricing inputs: {0}")]
    PathMismatch(String),
}
