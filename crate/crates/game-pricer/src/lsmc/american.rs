//! Plain American-put LSMC, used as the reduction fixture for the game
//! pricers: with an unreachable penalty the standard game variant must match
//! the all-paths flavor bit for bit, and the two-step variant must match the
//! in-the-money-only flavor.

use crate::core::{exercise_payoff, MarketParams};
use crate::error::PricingError;
use crate::lsmc::{check_paths_consistent, finalize, CashflowState, LsmcRun};
use crate::paths::PathSet;
use crate::regress::RegressionModel;

/// Which paths enter the continuation regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressionSet {
    /// Regress on every path (mirrors the game-adapted standard variant).
    AllPaths,
    /// Regress on in-the-money paths only (the classic American choice,
    /// mirrored by the two-step variant once screening removes everything).
    InTheMoneyOnly,
}

/// American put LSMC on a pre-simulated path set. No recall branch; holder
/// exercises where the predicted holding value falls below intrinsic.
pub fn run_american_lsmc(
    paths: &PathSet,
    strike: f64,
    params: &MarketParams,
    degree: usize,
    set: RegressionSet,
) -> Result<LsmcRun, PricingError> {
    if !(strike > 0.0) || !strike.is_finite() {
        return Err(PricingError::InvalidInput {
            field: "strike",
            reason: format!("must be finite and > 0, got {strike}"),
        });
    }
    check_paths_consistent(paths, params, paths.maturity())?;

    let n = paths.n_paths();
    let discount = (-params.rate * paths.dt()).exp();
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

        match set {
            RegressionSet::AllPaths => {
                let model = RegressionModel::fit(&s_t, &discounted, degree)?;
                let holding = model.predict(&s_t);
                let cf = state.values_mut();
                for i in 0..n {
                    let ex = exercise_payoff(strike, s_t[i]);
                    cf[i] = if ex > 0.0 && holding[i] < ex {
                        ex
                    } else {
                        discounted[i]
                    };
                }
            }
            RegressionSet::InTheMoneyOnly => {
                let mut itm: Vec<usize> = Vec::new();
                for (i, &s) in s_t.iter().enumerate() {
                    if strike - s > 0.0 {
                        itm.push(i);
                    }
                }
                let cf = state.values_mut();
                if itm.is_empty() {
                    cf.copy_from_slice(&discounted);
                    continue;
                }
                let x: Vec<f64> = itm.iter().map(|&i| s_t[i]).collect();
                let y: Vec<f64> = itm.iter().map(|&i| discounted[i]).collect();
                let model = RegressionModel::fit(&x, &y, degree)?;
                let holding = model.predict(&x);
                cf.copy_from_slice(&discounted);
                for (pos, &i) in itm.iter().enumerate() {
                    let ex = exercise_payoff(strike, s_t[i]);
                    if ex > 0.0 && holding[pos] < ex {
                        cf[i] = ex;
                    }
                }
            }
        }
    }

    Ok(finalize(state.into_values(), discount))
}
