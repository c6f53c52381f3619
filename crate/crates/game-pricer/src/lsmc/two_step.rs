//! Two-step Longstaff-Schwartz for the game put.
//!
//! At each step the out-of-the-money paths get their own screening
//! regression first. Only those whose predicted holding value exceeds the
//! penalty are recall-relevant; the rest would never be recalled and only
//! pollute the fit. The decision regression then runs on the in-the-money
//! paths plus the screened set, and the exercise/recall updates follow the
//! same rules as the single-regression variant.

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
/// Per step t: partition paths into in-the-money (`K - S_t > 0`) and
/// out-of-the-money; fit the screening model on the OTM paths (skipped when
/// there are none) and keep the OTM paths whose predicted holding value
/// strictly exceeds the penalty; fit the decision model on
/// `ITM ∪ screened`; then apply holder-exercise and issuer-recall updates on
/// that set only. Every untouched path carries its discounted cashflow.
pub fn run_lsmc_two_step(
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

        // partition by moneyness, ascending path order
        let mut itm: Vec<usize> = Vec::new();
        let mut otm: Vec<usize> = Vec::new();
        for (i, &s) in s_t.iter().enumerate() {
            if strike - s > 0.0 {
                itm.push(i);
            } else {
                otm.push(i);
            }
        }

        // screening fit on the out-of-the-money paths
        let mut relevant: Vec<usize> = Vec::new();
        if !otm.is_empty() {
            let x: Vec<f64> = otm.iter().map(|&i| s_t[i]).collect();
            let y: Vec<f64> = otm.iter().map(|&i| discounted[i]).collect();
            let screen = RegressionModel::fit(&x, &y, degree)?;
            for (&i, &d_i) in otm.iter().zip(screen.predict(&x).iter()) {
                if d_i > penalty {
                    relevant.push(i);
                }
            }
        }

        // regression set = ITM ∪ relevant; both pieces are sorted and
        // disjoint, so a merge keeps ascending path order
        let regression_set = merge_sorted(&itm, &relevant);
        assert_eq!(
            regression_set.len(),
            itm.len() + relevant.len(),
            "screened set must stay disjoint from the in-the-money set"
        );
        for &i in &relevant {
            assert!(
                strike - s_t[i] <= 0.0,
                "screened path {i} is not out of the money"
            );
        }

        let cf = state.values_mut();
        if regression_set.is_empty() {
            // nothing to decide this step; every path continues
            cf.copy_from_slice(&discounted);
            continue;
        }

        let x: Vec<f64> = regression_set.iter().map(|&i| s_t[i]).collect();
        let y: Vec<f64> = regression_set.iter().map(|&i| discounted[i]).collect();
        let decision = RegressionModel::fit(&x, &y, degree)?;
        let holding = decision.predict(&x);

        cf.copy_from_slice(&discounted);
        for (pos, &i) in regression_set.iter().enumerate() {
            let ex = exercise_payoff(strike, s_t[i]);
            if ex > 0.0 && holding[pos] < ex {
                cf[i] = ex;
            } else if holding[pos] > recall_payoff(strike, s_t[i], penalty) {
                cf[i] = ex + penalty;
            }
        }
        state.assert_bounds(strike, penalty, params.rate);
    }

    Ok(finalize(state.into_values(), discount))
}

/// Prices the game put with the two-step (screened regression) LSMC.
pub fn price_lsmc_two_step(
    paths: &PathSet,
    contract: &GameContract,
    params: &MarketParams,
    degree: usize,
) -> Result<PriceEstimate, PricingError> {
    let run = run_lsmc_two_step(paths, contract, params, degree)?;
    Ok(PriceEstimate {
        price: run.price,
        std_error: Some(run.std_error),
        method: Method::LsmcTwoStep,
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

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsmc::american::{run_american_lsmc, RegressionSet};
    use crate::lsmc::run_lsmc_std;
    use crate::paths::simulate_paths;

    fn market() -> MarketParams {
        MarketParams::new(100.0, 0.03, 0.2).unwrap()
    }

    #[test]
    fn merge_keeps_order_and_length() {
        assert_eq!(merge_sorted(&[1, 4, 9], &[2, 3, 10]), vec![1, 2, 3, 4, 9, 10]);
        assert_eq!(merge_sorted(&[], &[5]), vec![5]);
        assert_eq!(merge_sorted(&[7], &[]), vec![7]);
    }

    #[test]
    fn unreachable_penalty_reduces_to_itm_only_american_lsmc() {
        // the screening predictions are bounded by a polynomial fit of
        // cashflows <= K, so a penalty of 1e6 empties the screened set and
        // the algorithm must collapse to an ITM-only American LSMC
        let params = market();
        let paths = simulate_paths(&params, 1.0, 20_000, 25, 19).unwrap();
        let contract = GameContract::new(100.0, 1.0, 1e6).unwrap();
        let game = run_lsmc_two_step(&paths, &contract, &params, 3).unwrap();
        let american =
            run_american_lsmc(&paths, 100.0, &params, 3, RegressionSet::InTheMoneyOnly).unwrap();
        assert_eq!(game.cashflows, american.cashflows);
        assert_eq!(game.price, american.price);
        assert_eq!(game.std_error, american.std_error);
    }

    #[test]
    fn single_step_matches_standard_variant_exactly() {
        // no interior steps: both variants must return the same European
        // estimate on the same paths
        let params = market();
        let paths = simulate_paths(&params, 1.0, 5_000, 1, 29).unwrap();
        let contract = GameContract::new(100.0, 1.0, 5.0).unwrap();
        let a = run_lsmc_two_step(&paths, &contract, &params, 3).unwrap();
        let b = run_lsmc_std(&paths, &contract, &params, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_given_the_same_path_set() {
        let params = market();
        let paths = simulate_paths(&params, 1.0, 10_000, 20, 31).unwrap();
        let contract = GameContract::new(100.0, 1.0, 10.0).unwrap();
        let a = run_lsmc_two_step(&paths, &contract, &params, 3).unwrap();
        let b = run_lsmc_two_step(&paths, &contract, &params, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn penalty_monotonicity_within_noise_on_shared_paths() {
        let params = market();
        let paths = simulate_paths(&params, 1.0, 50_000, 25, 37).unwrap();
        let mut prev: Option<LsmcRun> = None;
        for penalty in [0.0, 2.0, 5.0, 10.0, 20.0] {
            let contract = GameContract::new(100.0, 1.0, penalty).unwrap();
            let run = run_lsmc_two_step(&paths, &contract, &params, 3).unwrap();
            if let Some(p) = &prev {
                let slack = 4.0 * (p.std_error + run.std_error);
                assert!(
                    run.price >= p.price - slack,
                    "penalty {penalty}: {} < {}",
                    run.price,
                    p.price
                );
            }
            prev = Some(run);
        }
    }

    #[test]
    fn deep_itm_contract_with_no_otm_paths_still_prices() {
        // strike far above any simulated price: the OTM partition is empty
        // at every step, the screening fit is skipped, and the price must
        // come out at least the intrinsic value
        let params = market();
        let paths = simulate_paths(&params, 1.0, 2_000, 10, 41).unwrap();
        let contract = GameContract::new(500.0, 1.0, 5.0).unwrap();
        let run = run_lsmc_two_step(&paths, &contract, &params, 3).unwrap();
        assert!(run.price > 350.0, "deep ITM price {}", run.price);
    }

    #[test]
    fn deep_otm_contract_with_no_itm_paths_still_prices() {
        // strike far below any simulated price: regression set is the
        // screened set only (often empty), and the price must be tiny
        let params = market();
        let paths = simulate_paths(&params, 1.0, 2_000, 10, 43).unwrap();
        let contract = GameContract::new(5.0, 1.0, 2.0).unwrap();
        let run = run_lsmc_two_step(&paths, &contract, &params, 3).unwrap();
        assert!(run.price.abs() < 1e-6, "deep OTM price {}", run.price);
    }
}
