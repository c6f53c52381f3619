//! Game-adapted Longstaff-Schwartz with a single all-paths regression per
//! step. Out-of-the-money paths must stay in the regression because the
//! issuer's recall right makes them relevant whenever their holding value
//! exceeds the penalty; the cost is a poorer fit, which is what the two-step
//! variant addresses.

use crate::core::{
    exercise_payoff, recall_payoff, GameContract, MarketParams, Method, MethodSettings,
    PriceEstimate, RunSettings,
};
use crate::error::PricingError;
use crate::lsmc::{check_paths_consistent, finalize, CashflowState, LsmcRun};
use crate::paths::PathSet;
use crate::regress::RegressionModel;

/// Backward induction with full cashflow output.
///
/// Per step t (from the last interior date down to t = dt): regress the
/// one-step-discounted cashflows on S_t over all paths, predict holding
/// values C, then
///
/// * holder exercises where `exercise > 0` and `C < exercise`;
/// * issuer recalls where (not exercised and) `C > exercise + penalty`;
/// * every other path keeps its discounted cashflow.
pub fn run_lsmc_std(
    paths: &PathSet,
    contract: &GameContract,
    params: &MarketParams,
    degree: usize,
) -> Result<LsmcRun, PricingError> {
    contract.validate()?;
    check_paths_consistent(paths, params, contract.maturity)?;

    let n = paths.n_paths();
    let discount = (-params.rate * paths.dt()).exp();
    let strike = contract.strike;
    let penalty = contract.penalty;

    let mut state = CashflowState::from_terminal(strike, &paths.terminal_prices());
    let mut discounted = vec![0.0f64; n];

    for step in (1..paths.n_steps()).rev() {
        let s_t = paths.step_prices(step);
        {
            let cf = state.values();
            for i in 0..n {
                discounted[i] = discount * cf[i];
            }
        }
        let model = RegressionModel::fit(&s_t, &discounted, degree)?;
        let holding = model.predict(&s_t);

        let cf = state.values_mut();
        for i in 0..n {
            let ex = exercise_payoff(strike, s_t[i]);
            cf[i] = if ex > 0.0 && holding[i] < ex {
                ex
            } else if holding[i] > recall_payoff(strike, s_t[i], penalty) {
                ex + penalty
            } else {
                discounted[i]
            };
        }
        state.assert_bounds(strike, penalty, params.rate);
    }

    Ok(finalize(state.into_values(), discount))
}

/// Prices the game put with the standard (all-paths regression) LSMC.
pub fn price_lsmc_std(
    paths: &PathSet,
    contract: &GameContract,
    params: &MarketParams,
    degree: usize,
) -> Result<PriceEstimate, PricingError> {
    let run = run_lsmc_std(paths, contract, params, degree)?;
    Ok(PriceEstimate {
        price: run.price,
        std_error: Some(run.std_error),
        method: Method::LsmcStd,
        settings: RunSettings {
            market: *params,
            contract: *contract,
            method: MethodSettings::MonteCarlo {
                n_paths: paths.n_paths(),
                n_steps: paths.n_steps(),
                seed: paths.seed(),
                degree,
            },
        },
    })
}
