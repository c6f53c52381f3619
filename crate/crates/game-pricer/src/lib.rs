//! Pricing of game (Israeli) put options under the Black-Scholes model.
//!
//! A game option is an American put whose issuer may additionally recall
//! (cancel) the contract early, paying the holder the exercise value plus a
//! fixed penalty. In the discrete-time recursion the node value is
//!
//! ```text
//! G = min(exercise + penalty, max(exercise, holding))
//! ```
//!
//! Four pricers share that recursion:
//!
//! * [`lsmc::price_lsmc_std`] — game-adapted Longstaff-Schwartz Monte Carlo
//!   with a single cross-sectional regression over all paths per step;
//! * [`lsmc::price_lsmc_two_step`] — a two-regression variant that first
//!   screens out-of-the-money paths for recall relevance and then fits the
//!   decision regression on the in-the-money and screened paths only;
//! * [`crr::price_game_crr`] — Cox-Ross-Rubinstein binomial lattice;
//! * [`pde::price_game_cn`] — Crank-Nicolson finite differences with the
//!   game constraint projected onto every time layer.
//!
//! The tree and the PDE solver serve as deterministic benchmarks for the two
//! Monte Carlo estimators. Path simulation is seed-reproducible and
//! independent of the degree of parallelism.

pub mod core;
pub mod crr;
mod error;
pub mod lsmc;
pub mod math;
pub mod paths;
pub mod pde;
pub mod regress;

pub use crate::core::{
    exercise_payoff, game_value, recall_payoff, GameContract, MarketParams, Method,
    MethodSettings, PriceEstimate, RunSettings,
};
pub use crate::error::PricingError;
