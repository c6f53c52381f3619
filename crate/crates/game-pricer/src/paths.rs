//! Risk-neutral GBM path simulation with seed-reproducible parallelism.
//!
//! Every path draws from its own counter-derived ChaCha8 stream, keyed by
//! (seed, path index). Chunking work across threads therefore cannot change
//! the output: the same (seed, n_paths, n_steps) always yields the same
//! matrix, whether generated on one core or sixteen. Steps use the exact
//! GBM transition `S_{k+1} = S_k * exp((r - sigma^2/2) dt + sigma sqrt(dt) Z)`
//! rather than an Euler approximation, and normals come from the inverse-CDF
//! transform, so there are no rejection loops to desynchronize streams.

use std::io::{self, Write};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::core::MarketParams;
use crate::error::PricingError;
use crate::math::inverse_normal_cdf;

/// A simulated set of risk-neutral stock paths.
///
/// Stored path-major: row i holds path i at times `0, dt, ..., n_steps*dt`,
/// with column 0 equal to the spot. Immutable after generation and safe to
/// share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    prices: Vec<f64>,
    n_paths: usize,
    n_steps: usize,
    dt: f64,
    seed: u64,
    market: MarketParams,
}

impl PathSet {
    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Year fraction per step, `maturity / n_steps`.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Market parameters the paths were generated under.
    pub fn market(&self) -> &MarketParams {
        &self.market
    }

    pub fn maturity(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// Path i as a slice of length `n_steps + 1`.
    pub fn path(&self, i: usize) -> &[f64] {
        let w = self.n_steps + 1;
        &self.prices[i * w..(i + 1) * w]
    }

    /// Gathers the cross-section of prices at a time step (0 = spot column).
    pub fn step_prices(&self, step: usize) -> Vec<f64> {
        assert!(step <= self.n_steps, "step {step} out of range");
        let w = self.n_steps + 1;
        (0..self.n_paths).map(|i| self.prices[i * w + step]).collect()
    }

    /// Terminal prices, one per path.
    pub fn terminal_prices(&self) -> Vec<f64> {
        self.step_prices(self.n_steps)
    }

    /// Dumps the full matrix as CSV: `path_id,t_0,...,t_n`, one row per path.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write!(out, "path_id")?;
        for k in 0..=self.n_steps {
            write!(out, ",t_{k}")?;
        }
        writeln!(out)?;
        for i in 0..self.n_paths {
            write!(out, "{i}")?;
            for v in self.path(i) {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Simulates `n_paths` GBM paths over `n_steps` equal steps to `maturity`.
///
/// Rejects `n_paths < 2` (the standard error would be undefined) and
/// `n_steps < 1`. The output is a pure function of
/// `(params, maturity, n_paths, n_steps, seed)`.
pub fn simulate_paths(
    params: &MarketParams,
    maturity: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
) -> Result<PathSet, PricingError> {
    simulate_with(params, maturity, n_paths, n_steps, seed, &|path_idx| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path_idx);
        move || inverse_normal_cdf(uniform_open01(rng.next_u64()))
    })
}

/// Maps 64 random bits to the open interval (0, 1): 53-bit resolution with a
/// half-ulp offset, so the inverse CDF never sees an endpoint.
#[inline]
fn uniform_open01(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Simulation core, generic over the per-path normal stream so tests can
/// substitute degenerate draws.
fn simulate_with<F, G>(
    params: &MarketParams,
    maturity: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
    make_stream: &F,
) -> Result<PathSet, PricingError>
where
    F: Fn(u64) -> G + Sync,
    G: FnMut() -> f64,
{
    params.validate()?;
    if n_paths < 2 {
        return Err(PricingError::InvalidInput {
            field: "n_paths",
            reason: format!("need at least 2 paths, got {n_paths}"),
        });
    }
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
    let drift = (params.rate - 0.5 * params.vol * params.vol) * dt;
    let diffusion = params.vol * dt.sqrt();
    let spot = params.spot;
    let width = n_steps + 1;

    let mut prices = vec![0.0f64; n_paths * width];

    let fill_row = |(i, row): (usize, &mut [f64])| {
        let mut draw = make_stream(i as u64);
        row[0] = spot;
        let mut s = spot;
        for cell in row[1..].iter_mut() {
            let z = draw();
            s *= (drift + diffusion * z).exp();
            *cell = s;
        }
    };

    #[cfg(feature = "parallel")]
    prices.par_chunks_mut(width).enumerate().for_each(fill_row);
    #[cfg(not(feature = "parallel"))]
    prices.chunks_mut(width).enumerate().for_each(fill_row);

    Ok(PathSet {
        prices,
        n_paths,
        n_steps,
        dt,
        seed,
        market: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn market() -> MarketParams {
        MarketParams::new(100.0, 0.03, 0.2).unwrap()
    }

    #[test]
    fn zero_noise_step_is_pure_drift() {
        let params = market();
        let set = simulate_with(&params, 1.0, 4, 1, 0, &|_| || 0.0).unwrap();
        let expected = 100.0 * ((0.03 - 0.5 * 0.04) * 1.0f64).exp();
        for i in 0..4 {
            assert_eq!(set.path(i)[0], 100.0);
            assert_abs_diff_eq!(set.path(i)[1], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_sizes() {
        let params = market();
        assert!(simulate_paths(&params, 1.0, 1, 10, 0).is_err());
        assert!(simulate_paths(&params, 1.0, 10, 0, 0).is_err());
        assert!(simulate_paths(&params, 0.0, 10, 10, 0).is_err());
    }

    #[test]
    fn paths_start_at_spot_and_stay_positive() {
        let set = simulate_paths(&market(), 1.0, 500, 12, 7).unwrap();
        for i in 0..set.n_paths() {
            let row = set.path(i);
            assert_eq!(row[0], 100.0);
            assert!(row.iter().all(|&v| v > 0.0));
        }
        assert_abs_diff_eq!(set.dt() * set.n_steps() as f64, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn terminal_mean_matches_forward_within_four_standard_errors() {
        let params = market();
        let n = 100_000;
        let set = simulate_paths(&params, 1.0, n, 50, 42).unwrap();
        let terminal = set.terminal_prices();
        let disc = (-params.rate * 1.0f64).exp();
        let discounted: Vec<f64> = terminal.iter().map(|s| disc * s).collect();
        let mean = crate::math::mean(&discounted);
        let se = crate::math::sample_std(&discounted) / (n as f64).sqrt();
        assert!(
            (mean - 100.0).abs() <= 4.0 * se,
            "martingale violation: mean {mean}, se {se}"
        );
    }

    #[test]
    fn log_increment_variance_close_to_sigma_squared_dt() {
        let params = market();
        let n = 100_000;
        let n_steps = 4;
        let set = simulate_paths(&params, 1.0, n, n_steps, 11).unwrap();
        let dt = set.dt();
        let mut incs = Vec::with_capacity(n * n_steps);
        for i in 0..n {
            let row = set.path(i);
            for k in 0..n_steps {
                incs.push((row[k + 1] / row[k]).ln());
            }
        }
        let sd = crate::math::sample_std(&incs);
        let var = sd * sd;
        let target = params.vol * params.vol * dt;
        assert!(
            (var - target).abs() <= 0.05 * target,
            "log-increment variance {var} vs sigma^2 dt {target}"
        );
    }

    #[test]
    fn identical_inputs_reproduce_bit_identical_output() {
        let params = market();
        let a = simulate_paths(&params, 1.0, 2_000, 20, 123).unwrap();
        let b = simulate_paths(&params, 1.0, 2_000, 20, 123).unwrap();
        assert_eq!(a, b);
        let c = simulate_paths(&params, 1.0, 2_000, 20, 124).unwrap();
        assert_ne!(a, c);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn thread_count_does_not_change_output() {
        let params = market();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate_paths(&params, 1.0, 5_000, 25, 99).unwrap());
        let eight = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| simulate_paths(&params, 1.0, 5_000, 25, 99).unwrap());
        assert_eq!(one, eight);
    }

    #[test]
    fn csv_dump_has_header_and_one_row_per_path() {
        let set = simulate_paths(&market(), 0.5, 3, 2, 5).unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "path_id,t_0,t_1,t_2");
        assert!(lines[1].starts_with("0,100,"));
    }
}
