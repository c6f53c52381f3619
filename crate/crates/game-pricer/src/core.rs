//! Domain types and the payoff kernel shared by every pricer.

use std::fmt;

use crate::error::PricingError;

/// Black-Scholes market: spot, risk-free rate, and volatility.
///
/// Simulation and lattice construction always run under the risk-neutral
/// measure, so the drift is the risk-free rate; there is no separate
/// real-world drift parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Spot price S0, strictly positive.
    pub spot: f64,
    /// Continuously compounded risk-free rate per year; may be zero or negative.
    pub rate: f64,
    /// Volatility per square-root year, strictly positive.
    pub vol: f64,
}

impl MarketParams {
    pub fn new(spot: f64, rate: f64, vol: f64) -> Result<Self, PricingError> {
        let params = Self { spot, rate, vol };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), PricingError> {
        if !(self.spot > 0.0) || !self.spot.is_finite() {
            return Err(PricingError::InvalidInput {
                field: "spot",
                reason: format!("must be finite and > 0, got {}", self.spot),
            });
        }
        if !self.rate.is_finite() {
            return Err(PricingError::InvalidInput {
                field: "rate",
                reason: format!("must be finite, got {}", self.rate),
            });
        }
        if !(self.vol > 0.0) || !self.vol.is_finite() {
            return Err(PricingError::InvalidInput {
                field: "vol",
                reason: format!("must be finite and > 0, got {}", self.vol),
            });
        }
        Ok(())
    }
}

/// Game put contract: strike, maturity, and the issuer's recall penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameContract {
    /// Strike K, strictly positive.
    pub strike: f64,
    /// Maturity T in years, strictly positive.
    pub maturity: f64,
    /// Recall penalty delta >= 0, in currency. Recalling pays the holder
    /// `max(K - S, 0) + penalty`.
    pub penalty: f64,
}

impl GameContract {
    pub fn new(strike: f64, maturity: f64, penalty: f64) -> Result<Self, PricingError> {
        let contract = Self {
            strike,
            maturity,
            penalty,
        };
        contract.validate()?;
        Ok(contract)
    }

    pub fn validate(&self) -> Result<(), PricingError> {
        if !(self.strike > 0.0) || !self.strike.is_finite() {
            return Err(PricingError::InvalidInput {
                field: "strike",
                reason: format!("must be finite and > 0, got {}", self.strike),
            });
        }
        if !(self.maturity > 0.0) || !self.maturity.is_finite() {
            return Err(PricingError::InvalidInput {
                field: "maturity",
                reason: format!("must be finite and > 0, got {}", self.maturity),
            });
        }
        if !(self.penalty >= 0.0) || !self.penalty.is_finite() {
            return Err(PricingError::InvalidInput {
                field: "penalty",
                reason: format!("must be finite and >= 0, got {}", self.penalty),
            });
        }
        Ok(())
    }
}

/// Pricing method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    LsmcStd,
    LsmcTwoStep,
    CrrTree,
    CnPde,
}

impl Method {
    /// Stable short label used in reports and CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Method::LsmcStd => "lsmc",
            Method::LsmcTwoStep => "two-step",
            Method::CrrTree => "crr",
            Method::CnPde => "pde",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Numerical settings of a single pricing run, by method family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSettings {
    MonteCarlo {
        n_paths: usize,
        n_steps: usize,
        seed: u64,
        degree: usize,
    },
    Tree {
        n_steps: usize,
    },
    Grid {
        n_space: usize,
        n_time: usize,
        s_max: f64,
    },
}

/// Complete echo of the inputs behind a [`PriceEstimate`]; sufficient to
/// rerun the computation bit-identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub market: MarketParams,
    pub contract: GameContract,
    pub method: MethodSettings,
}

/// A price together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceEstimate {
    /// Estimated value at t = 0, non-negative.
    pub price: f64,
    /// Monte Carlo standard error; `None` for deterministic methods.
    pub std_error: Option<f64>,
    pub method: Method,
    pub settings: RunSettings,
}

/// Holder's exercise value of the put: `max(strike - s, 0)`.
#[inline]
pub fn exercise_payoff(strike: f64, s: f64) -> f64 {
    (strike - s).max(0.0)
}

/// Issuer's recall payment: exercise value plus the penalty.
///
/// Out of the money this pays the bare penalty; the exercise component is
/// clamped at zero so the recall rebate can never be negative.
#[inline]
pub fn recall_payoff(strike: f64, s: f64, penalty: f64) -> f64 {
    exercise_payoff(strike, s) + penalty
}

/// One backward-induction update of the game option value:
/// `min(exercise + penalty, max(exercise, holding))`.
#[inline]
pub fn game_value(exercise: f64, holding: f64, penalty: f64) -> f64 {
    (exercise + penalty).min(exercise.max(holding))
}
