//! Independent brute-force oracles backing the game-pricer test suites.
//!
//! Everything here is deliberately naive: full 2D arrays, scalar loops,
//! normal equations, dense elimination with partial pivoting. The point is a
//! second route to the same numbers, so none of this calls into the
//! production solvers. This crate is a test dependency only; the CLI and the
//! library never link it.

use thiserror::Error;

use game_pricer::pde::{GridSpec, TridiagonalSystem};
use game_pricer::{GameContract, MarketParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("singular matrix in dense elimination (pivot column {column})")]
    Singular { column: usize },
    #[error("invalid oracle input: {0}")]
    InvalidInput(String),
}

/// Exhaustive dynamic programming for the game put on a full CRR lattice.
///
/// Stores the whole `(n_steps+1)^2 / 2` stock and value triangle and applies
/// `min(exercise + penalty, max(exercise, holding))` node by node. Capped at
/// 12 steps; it exists to pin the production lattice, not to be usable.
pub fn brute_force_game_value(
    params: &MarketParams,
    contract: &GameContract,
    n_steps: usize,
) -> f64 {
    assert!(n_steps >= 1 && n_steps <= 12, "oracle is for tiny trees only");
    params.validate().expect("valid market");
    contract.validate().expect("valid contract");

    let dt = contract.maturity / n_steps as f64;
    let sig_sqrt_dt = params.vol * dt.sqrt();
    let u = sig_sqrt_dt.exp();
    let d = (-sig_sqrt_dt).exp();
    let p = ((params.rate * dt).exp() - d) / (u - d);
    assert!(p > 0.0 && p < 1.0, "up-probability {p} outside (0,1)");
    let disc = (-params.rate * dt).exp();
    let k_strike = contract.strike;
    let delta = contract.penalty;

    // full stock triangle: stock[m][k] after m steps and k down-moves
    let mut stock = vec![vec![0.0f64; n_steps + 1]; n_steps + 1];
    for m in 0..=n_steps {
        for k in 0..=m {
            let net_ups = m as i64 - 2 * k as i64;
            stock[m][k] = params.spot * (net_ups as f64 * sig_sqrt_dt).exp();
        }
    }

    let mut value = vec![vec![0.0f64; n_steps + 1]; n_steps + 1];
    for k in 0..=n_steps {
        value[n_steps][k] = (k_strike - stock[n_steps][k]).max(0.0);
    }
    for m in (0..n_steps).rev() {
        for k in 0..=m {
            let holding = disc * (p * value[m + 1][k] + (1.0 - p) * value[m + 1][k + 1]);
            let exercise = (k_strike - stock[m][k]).max(0.0);
            value[m][k] = (exercise + delta).min(exercise.max(holding));
        }
    }
    value[0][0]
}

/// Least-squares fit by explicit normal equations and dense elimination.
///
/// Same normalized monomial basis contract as the production regression, but
/// solved along a completely different route.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFit {
    center: f64,
    half_width: f64,
    /// Ascending powers in the normalized coordinate.
    pub coefficients: Vec<f64>,
}

impl DenseFit {
    pub fn predict(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.half_width;
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }
}

/// Solves the polynomial least-squares problem via `X^T X b = X^T y`.
///
/// Requires a full-rank design; a singular normal matrix is an error rather
/// than a fallback, because the oracle must never silently change problems.
pub fn dense_least_squares(x: &[f64], y: &[f64], degree: usize) -> Result<DenseFit, OracleError> {
    if x.is_empty() || x.len() != y.len() {
        return Err(OracleError::InvalidInput(format!(
            "need matching non-empty inputs, got x {} y {}",
            x.len(),
            y.len()
        )));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in x {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let center = 0.5 * (lo + hi);
    let mut half_width = 0.5 * (hi - lo);
    if half_width == 0.0 {
        half_width = 1.0;
    }

    let n_coefs = degree + 1;
    // gram = X^T X, moment = X^T y, accumulated scalar-wise
    let mut gram = vec![vec![0.0f64; n_coefs]; n_coefs];
    let mut moment = vec![0.0f64; n_coefs];
    let mut powers = vec![0.0f64; n_coefs];
    for (&xi, &yi) in x.iter().zip(y) {
        let t = (xi - center) / half_width;
        let mut acc = 1.0;
        for slot in powers.iter_mut() {
            *slot = acc;
            acc *= t;
        }
        for i in 0..n_coefs {
            moment[i] += powers[i] * yi;
            for j in 0..n_coefs {
                gram[i][j] += powers[i] * powers[j];
            }
        }
    }

    let coefficients = gauss_solve(&mut gram, &mut moment)?;
    Ok(DenseFit {
        center,
        half_width,
        coefficients,
    })
}

/// Dense Gaussian elimination with partial pivoting on a full copy of a
/// tridiagonal system. O(n^3), test use only.
pub fn dense_tridiagonal_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>, OracleError> {
    let n = sys.diag.len();
    let mut full = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        full[i][i] = sys.diag[i];
        if i > 0 {
            full[i][i - 1] = sys.lower[i - 1];
        }
        if i + 1 < n {
            full[i][i + 1] = sys.upper[i];
        }
    }
    let mut rhs = sys.rhs.clone();
    gauss_solve(&mut full, &mut rhs)
}

fn gauss_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>, OracleError> {
    let n = b.len();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a[col][col].abs();
        for row in col + 1..n {
            if a[row][col].abs() > pivot_mag {
                pivot_mag = a[row][col].abs();
                pivot_row = row;
            }
        }
        if pivot_mag == 0.0 {
            return Err(OracleError::Singular { column: col });
        }
        if pivot_row != col {
            a.swap(col, pivot_row);
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row][j] * x[j];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Fully implicit (backward Euler) finite-difference solve of the game put,
/// layered over dense elimination. First-order in time, so it cross-checks
/// the Crank-Nicolson solver at O(dt) tolerance on coarse grids.
pub fn implicit_euler_game(
    params: &MarketParams,
    contract: &GameContract,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    params.validate().expect("valid market");
    contract.validate().expect("valid contract");
    if params.spot > grid.s_max {
        return Err(OracleError::InvalidInput(format!(
            "spot {} beyond s_max {}",
            params.spot, grid.s_max
        )));
    }
    let n = grid.n_space;
    let dt = contract.maturity / grid.n_time as f64;
    let ds = grid.s_max / n as f64;
    let strike = contract.strike;
    let sig2 = params.vol * params.vol;
    let rate = params.rate;

    let intrinsic: Vec<f64> = (0..=n).map(|j| (strike - j as f64 * ds).max(0.0)).collect();
    let mut v = intrinsic.clone();

    // backward Euler row j: -a_j V_{j-1} + (1 + b_j) V_j - c_j V_{j+1} = V_next_j
    // with a_j = dt/2 (sig^2 j^2 - r j), b_j = dt (sig^2 j^2 + r),
    //      c_j = dt/2 (sig^2 j^2 + r j)
    let dim = n - 1;
    for _ in 0..grid.n_time {
        let mut sys = TridiagonalSystem {
            lower: vec![0.0; dim - 1],
            diag: vec![0.0; dim],
            upper: vec![0.0; dim - 1],
            rhs: vec![0.0; dim],
        };
        for idx in 0..dim {
            let j = (idx + 1) as f64;
            let a = 0.5 * dt * (sig2 * j * j - rate * j);
            let b = dt * (sig2 * j * j + rate);
            let c = 0.5 * dt * (sig2 * j * j + rate * j);
            sys.diag[idx] = 1.0 + b;
            if idx > 0 {
                sys.lower[idx - 1] = -a;
            }
            if idx + 1 < dim {
                sys.upper[idx] = -c;
            }
            sys.rhs[idx] = v[idx + 1];
            if idx == 0 {
                sys.rhs[idx] += a * strike;
            }
        }
        let interior = dense_tridiagonal_solve(&sys)?;
        v[0] = strike;
        v[1..n].copy_from_slice(&interior);
        v[n] = 0.0;
        for j in 0..=n {
            v[j] = (intrinsic[j] + contract.penalty).min(v[j].max(intrinsic[j]));
        }
    }

    // linear interpolation at the spot
    let pos = params.spot / ds;
    let j = (pos.floor() as usize).min(n - 1);
    let w = pos - j as f64;
    Ok(v[j] * (1.0 - w) + v[j + 1] * w)
}
