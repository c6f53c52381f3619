//! Longstaff-Schwartz Monte Carlo pricers for the game put.
//!
//! Both game variants walk the simulated paths backwards from maturity,
//! regress the one-step-discounted running cashflows on the current stock
//! prices, and overwrite cashflows on paths where the holder exercises
//! (`C < exercise`, in the money) or the issuer recalls
//! (`C > exercise + penalty`). Paths that do neither simply carry their
//! discounted cashflow. The loop stops after the t = dt step; no decision is
//! taken at t = 0, and the final price is `exp(-r dt) * mean(CF)`.
//!
//! [`standard`] fits a single regression over all paths per step.
//! [`two_step`] first fits a screening regression on the out-of-the-money
//! paths, keeps only those whose predicted holding value exceeds the
//! penalty, and fits the decision regression on the in-the-money paths plus
//! that screened set.
//!
//! [`american`] is the no-recall fixture the reduction tests compare
//! against; it is not one of the benchmark methods.

pub mod american;
pub mod standard;
pub mod two_step;

pub use american::{run_american_lsmc, RegressionSet};
pub use standard::{price_lsmc_std, run_lsmc_std};
pub use two_step::{price_lsmc_two_step, run_lsmc_two_step};

use crate::core::MarketParams;
use crate::error::PricingError;
use crate::math::{mean, sample_std};
use crate::paths::PathSet;

/// Outcome of one backward induction: the price estimate pieces plus the
/// final cashflow vector (as of the first exercise date, before the last
/// discounting to t = 0). Tests use the vector for bit-level reduction
/// checks.
#[derive(Debug, Clone, PartialEq)]
pub struct LsmcRun {
    pub price: f64,
    pub std_error: f64,
    pub cashflows: Vec<f64>,
}

/// The running cashflow vector of the backward induction.
///
/// Cashflows start at the terminal exercise values and stay within
/// `[0, strike + penalty]` throughout for non-negative rates: overwrites are
/// exercise or recall payoffs and discounting only shrinks values.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CashflowState {
    values: Vec<f64>,
}

impl CashflowState {
    pub(crate) fn from_terminal(strike: f64, terminal: &[f64]) -> Self {
        Self {
            values: terminal
                .iter()
                .map(|&s| crate::core::exercise_payoff(strike, s))
                .collect(),
        }
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[cfg(debug_assertions)]
    pub(crate) fn assert_bounds(&self, strike: f64, penalty: f64, rate: f64) {
        // the upper bound only holds when discounting cannot grow cashflows
        if rate >= 0.0 {
            for &v in &self.values {
                debug_assert!(
                    (0.0..=strike + penalty + 1e-9).contains(&v),
                    "cashflow {v} escaped [0, {}]",
                    strike + penalty
                );
            }
        }
    }
    #[cfg(not(debug_assertions))]
    pub(crate) fn assert_bounds(&self, _strike: f64, _penalty: f64, _rate: f64) {}
}

/// Validates that a path set was generated under the market and maturity it
/// is being priced with.
pub(crate) fn check_paths_consistent(
    paths: &PathSet,
    params: &MarketParams,
    maturity: f64,
) -> Result<(), PricingError> {
    if paths.market() != params {
        return Err(PricingError::PathMismatch(format!(
            "paths simulated under {:?}, pricing under {:?}",
            paths.market(),
            params
        )));
    }
    let path_maturity = paths.maturity();
    if (path_maturity - maturity).abs() > 1e-9 * maturity.max(1.0) {
        return Err(PricingError::PathMismatch(format!(
            "paths cover {path_maturity} years, contract matures at {maturity}"
        )));
    }
    Ok(())
}

/// Final discounting and moments: price `disc * mean(CF)` and standard error
/// `disc * stdev(CF) / sqrt(n)`.
pub(crate) fn finalize(cashflows: Vec<f64>, discount: f64) -> LsmcRun {
    let n = cashflows.len();
    let price = discount * mean(&cashflows);
    let std_error = discount * sample_std(&cashflows) / (n as f64).sqrt();
    LsmcRun {
        price,
        std_error,
        cashflows,
    }
}
