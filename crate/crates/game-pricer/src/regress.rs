//! Polynomial least-squares estimation of continuation (holding) values.
//!
//! The design matrix uses plain monomials in a normalized coordinate
//! `x_tilde = (x - center) / half_width`, with the normalization pair taken
//! from the fit sample's min/max. This keeps the basis conditioned for spot
//! levels anywhere in the benchmark range without changing the fitted
//! subspace. The solve is a singular value decomposition with the usual
//! `max(m, n) * eps * sigma_max` cutoff, so rank-deficient samples (for
//! example a step with fewer in-the-money paths than coefficients) fall back
//! to the minimum-norm solution instead of erroring.

use nalgebra::{DMatrix, DVector};

use crate::error::PricingError;

/// A fitted polynomial continuation-value model.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    degree: usize,
    /// Coefficients in the normalized coordinate, ascending powers,
    /// exactly `degree + 1` entries.
    coefficients: Vec<f64>,
    n_samples: usize,
    center: f64,
    half_width: f64,
    rank_deficient: bool,
}

impl RegressionModel {
    /// Least-squares fit of `y` against `{1, x~, x~^2, ..., x~^degree}`.
    ///
    /// Errors on empty input or mismatched lengths. A sample whose design
    /// matrix is rank deficient does not error; the minimum-norm solution is
    /// returned and [`RegressionModel::rank_deficient`] is set.
    pub fn fit(x: &[f64], y: &[f64], degree: usize) -> Result<Self, PricingError> {
        if x.is_empty() {
            return Err(PricingError::EmptySample);
        }
        if x.len() != y.len() {
            return Err(PricingError::LengthMismatch {
                x_len: x.len(),
                y_len: y.len(),
            });
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

        let m = x.len();
        let n_coefs = degree + 1;
        let design = DMatrix::from_fn(m, n_coefs, |i, j| {
            let t = (x[i] - center) / half_width;
            t.powi(j as i32)
        });
        let rhs = DVector::from_column_slice(y);

        let svd = design.svd(true, true);
        let sigma_max = svd.singular_values.max();
        let eps = m.max(n_coefs) as f64 * f64::EPSILON * sigma_max;
        let rank = svd.rank(eps);
        let solution = svd
            .solve(&rhs, eps)
            .map_err(|reason| PricingError::InvalidInput {
                field: "regression",
                reason: reason.to_string(),
            })?;

        Ok(Self {
            degree,
            coefficients: solution.iter().copied().collect(),
            n_samples: m,
            center,
            half_width,
            rank_deficient: rank < n_coefs,
        })
    }

    /// Evaluates the fitted polynomial at each x.
    pub fn predict(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.predict_one(x)).collect()
    }

    /// Evaluates the fitted polynomial at a single point (Horner form).
    #[inline]
    pub fn predict_one(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.half_width;
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// (center, half-width) of the normalization applied to raw x.
    pub fn x_scale(&self) -> (f64, f64) {
        (self.center, self.half_width)
    }

    /// True when the design matrix had numerical rank below `degree + 1` and
    /// the minimum-norm fallback was used.
    pub fn rank_deficient(&self) -> bool {
        self.rank_deficient
    }
}
