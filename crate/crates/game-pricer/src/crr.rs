//! Cox-Ross-Rubinstein binomial lattice pricer with the game-option node
//! update, plus the plain American put used as a dominance reference.
//!
//! The lattice uses `u = exp(sigma sqrt(dt))`, `d = exp(-sigma sqrt(dt))`
//! and the risk-neutral up-probability `p = (exp(r dt) - d) / (u - d)`.
//! Node values are updated with `min(exercise + penalty, max(hold, exercise))`
//! at every layer including the root. Only two rolling layers are kept, so
//! memory stays O(n) for six-figure step counts.

use crate::core::{
    exercise_payoff, game_value, GameContract, MarketParams, Method, MethodSettings,
    PriceEstimate, RunSettings,
};
use crate::error::PricingError;

/// Calibrated lattice parameters for one pricing run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeSpec {
    pub n_steps: usize,
    /// Years per step.
    pub dt: f64,
    /// Up factor `exp(sigma sqrt(dt))`.
    pub up: f64,
    /// Down factor `exp(-sigma sqrt(dt))` = 1/up.
    pub down: f64,
    /// Risk-neutral probability of the up move.
    pub p_up: f64,
    /// One-step discount `exp(-r dt)`.
    pub discount: f64,
}

/// Calibrates the CRR lattice, rejecting parameter sets whose up-probability
/// leaves (0, 1).
pub fn build_tree_spec(
    params: &MarketParams,
    maturity: f64,
    n_steps: usize,
) -> Result<TreeSpec, PricingError> {
    params.validate()?;
    if n_steps < 1 {
        return Err(PricingError::InvalidInput {
            field: "n_steps",
            reason: format!("need at least 1 step, got {n_steps}"),
        });
    }
    if !(maturity > 0.0) || !maturity.is_finite() {
        return Err(PricingError::InvalidInput {
            field: "maturity",
            reason: format!("must be finite and > 0, got {maturity}"),
        });
    }

    let dt = maturity / n_steps as f64;
    let sig_sqrt_dt = params.vol * dt.sqrt();
    let up = sig_sqrt_dt.exp();
    let down = (-sig_sqrt_dt).exp();
    let p_up = ((params.rate * dt).exp() - down) / (up - down);
    if !(p_up > 0.0 && p_up < 1.0) {
        return Err(PricingError::ProbabilityBand {
            p: p_up,
            r_dt: params.rate * dt,
            ln_d: -sig_sqrt_dt,
            ln_u: sig_sqrt_dt,
        });
    }
    let discount = (-params.rate * dt).exp();
    Ok(TreeSpec {
        n_steps,
        dt,
        up,
        down,
        p_up,
        discount,
    })
}

/// Backward induction over the lattice. `cap` carries the recall penalty for
/// the game option; `None` prices the plain American put (the infinite-penalty
/// limit).
fn backward_induction(
    params: &MarketParams,
    strike: f64,
    maturity: f64,
    n_steps: usize,
    cap: Option<f64>,
) -> Result<f64, PricingError> {
    if !(strike > 0.0) || !strike.is_finite() {
        return Err(PricingError::InvalidInput {
            field: "strike",
            reason: format!("must be finite and > 0, got {strike}"),
        });
    }
    let spec = build_tree_spec(params, maturity, n_steps)?;
    let n = n_steps;
    let spot = params.spot;
    let sig_sqrt_dt = params.vol * spec.dt.sqrt();

    // Node prices are spot * exp(j * sigma sqrt(dt)) with j = m - 2k; one
    // table of exponentials avoids both powi calls and cumulative product
    // drift across layers.
    let growth: Vec<f64> = (-(n as i64)..=n as i64)
        .map(|j| (j as f64 * sig_sqrt_dt).exp())
        .collect();
    let node_price = |m: usize, k: usize| -> f64 {
        let idx = (m as i64 - 2 * k as i64 + n as i64) as usize;
        spot * growth[idx]
    };

    let mut values: Vec<f64> = (0..=n)
        .map(|k| exercise_payoff(strike, node_price(n, k)))
        .collect();

    for m in (0..n).rev() {
        for k in 0..=m {
            let hold = spec.discount * (spec.p_up * values[k] + (1.0 - spec.p_up) * values[k + 1]);
            let ex = exercise_payoff(strike, node_price(m, k));
            values[k] = match cap {
                Some(penalty) => game_value(ex, hold, penalty),
                None => hold.max(ex),
            };
        }
        values.truncate(m + 1);
    }
    Ok(values[0])
}

/// Prices the game put on a CRR lattice with `n_steps` layers.
pub fn price_game_crr(
    params: &MarketParams,
    contract: &GameContract,
    n_steps: usize,
) -> Result<PriceEstimate, PricingError> {
    contract.validate()?;
    let price = backward_induction(
        params,
        contract.strike,
        contract.maturity,
        n_steps,
        Some(contract.penalty),
    )?;
    Ok(PriceEstimate {
        price,
        std_error: None,
        method: Method::CrrTree,
        settings: RunSettings {
            market: *params,
            contract: *contract,
            method: MethodSettings::Tree { n_steps },
        },
    })
}

/// Prices the plain American put (no recall right) on the same lattice.
pub fn price_american_crr(
    params: &MarketParams,
    strike: f64,
    maturity: f64,
    n_steps: usize,
) -> Result<f64, PricingError> {
    backward_induction(params, strike, maturity, n_steps, None)
}
