//! Prediction machinery: transversal filter training and prediction, LMS
//! adaptation, multivariate linear regression, and chi-squared fit scoring.
//!
//! Everything here is a pure function over value types; the engine owns all
//! protocol state.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg;

/// Observed-signal variances below this floor are treated as zero: perfect
/// predictions of a constant signal score 1, anything else scores 0.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Regularizer in the normalized LMS step denominator.
const NLMS_EPS: f64 = 1e-12;

/// Tapped-delay-line predictor of order `p` over a signal's own past.
///
/// Coefficients are ordered most recent lag first: `coeffs[0]` weights
/// `d(t-1)`, `coeffs[p-1]` weights `d(t-p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalFilter {
    coeffs: Vec<f64>,
    learning_rate: f64,
    normalize_lms: bool,
    degenerate: bool,
}

impl TemporalFilter {
    /// Least-squares fit over a gap-free training window.
    ///
    /// Builds the `(T_p - p) x p` input matrix whose row `i` holds the `p`
    /// readings preceding target `d(p + i)`, most recent first, and solves
    /// the normal equations. A singular system falls back to the
    /// minimum-norm solution and marks the filter degenerate.
    pub fn fit(
        samples: &[f64],
        order: usize,
        learning_rate: f64,
        normalize_lms: bool,
    ) -> Result<TemporalFilter, Error> {
        if order < 1 {
            return Err(Error::Arity {
                what: "filter order",
                minimum: 1,
                got: order,
            });
        }
        if samples.len() <= order {
            return Err(Error::Size {
                what: "temporal training window",
                expected: order + 1,
                got: samples.len(),
            });
        }
        let rows = samples.len() - order;
        let mut matrix = Vec::with_capacity(rows * order);
        let mut targets = Vec::with_capacity(rows);
        for i in 0..rows {
            for j in 0..order {
                matrix.push(samples[order - 1 + i - j]);
            }
            targets.push(samples[order + i]);
        }
        let sol = linalg::lstsq(rows, order, &matrix, &targets);
        Ok(TemporalFilter {
            coeffs: sol.coeffs,
            learning_rate,
            normalize_lms,
            degenerate: sol.degenerate,
        })
    }

    /// Filter with all-zero coefficients; adaptation starts from scratch.
    pub fn zeroed(order: usize, learning_rate: f64, normalize_lms: bool) -> TemporalFilter {
        TemporalFilter {
            coeffs: alloc::vec![0.0; order],
            learning_rate,
            normalize_lms,
            degenerate: false,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    /// Replaces the coefficient vector wholesale: the sink-to-node
    /// synchronization step. Learning rate and normalization stay put.
    pub fn sync_coeffs(&mut self, coeffs: &[f64]) {
        self.coeffs.clear();
        self.coeffs.extend_from_slice(coeffs);
    }

    /// One-step prediction from the last `p` values, most recent first.
    pub fn predict(&self, history: &[f64]) -> Result<f64, Error> {
        if history.len() != self.coeffs.len() {
            return Err(Error::Size {
                what: "prediction history",
                expected: self.coeffs.len(),
                got: history.len(),
            });
        }
        let mut sum = 0.0;
        for (c, h) in self.coeffs.iter().zip(history) {
            sum += c * h;
        }
        Ok(sum)
    }

    /// LMS coefficient update from the prediction error `actual - predicted`.
    ///
    /// `input` is the delay line the prediction was made from (most recent
    /// first). With normalization on, the step is scaled by the input power;
    /// the update is deterministic: identical inputs give identical bits.
    pub fn lms_update(&mut self, input: &[f64], actual: f64, predicted: f64) -> Result<(), Error> {
        if input.len() != self.coeffs.len() {
            return Err(Error::Size {
                what: "lms input",
                expected: self.coeffs.len(),
                got: input.len(),
            });
        }
        let error = actual - predicted;
        let step = if self.normalize_lms {
            let mut power = 0.0;
            for x in input {
                power += x * x;
            }
            self.learning_rate / (NLMS_EPS + power)
        } else {
            self.learning_rate
        };
        for (c, x) in self.coeffs.iter_mut().zip(input) {
            *c += step * x * error;
        }
        Ok(())
    }
}

/// Intercept-plus-slopes regressor over `k` companion inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialRegressor {
    coeffs: Vec<f64>,
    degenerate: bool,
}

impl SpatialRegressor {
    /// Least-squares fit of `dependent` on `companions` with a leading
    /// all-ones intercept column. Collinear or constant companions fall back
    /// to the minimum-norm solution with the degenerate flag set.
    pub fn fit(dependent: &[f64], companions: &[&[f64]]) -> Result<SpatialRegressor, Error> {
        let k = companions.len();
        if k < 1 {
            return Err(Error::Arity {
                what: "companion traces",
                minimum: 1,
                got: 0,
            });
        }
        let n = dependent.len();
        for companion in companions {
            if companion.len() != n {
                return Err(Error::Size {
                    what: "companion trace length",
                    expected: n,
                    got: companion.len(),
                });
            }
        }
        if n < k + 2 {
            return Err(Error::Size {
                what: "spatial training window",
                expected: k + 2,
                got: n,
            });
        }
        let cols = k + 1;
        let mut matrix = Vec::with_capacity(n * cols);
        for row in 0..n {
            matrix.push(1.0);
            for companion in companions {
                matrix.push(companion[row]);
            }
        }
        let sol = linalg::lstsq(n, cols, &matrix, dependent);
        Ok(SpatialRegressor {
            coeffs: sol.coeffs,
            degenerate: sol.degenerate,
        })
    }

    pub fn companion_count(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Intercept first, then one slope per companion.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Prediction from the companions' current values.
    pub fn predict(&self, companion_values: &[f64]) -> Result<f64, Error> {
        if companion_values.len() != self.companion_count() {
            return Err(Error::Size {
                what: "companion values",
                expected: self.companion_count(),
                got: companion_values.len(),
            });
        }
        let mut sum = self.coeffs[0];
        for (b, a) in self.coeffs[1..].iter().zip(companion_values) {
            sum += b * a;
        }
        Ok(sum)
    }
}

/// Sum of squared residuals normalized by the observed-signal variance.
///
/// A variance under [`VARIANCE_FLOOR`] means a constant signal: zero
/// residuals score 0 (perfect), anything else returns the infinity sentinel,
/// which [`fit_score`] maps to 0.
pub fn chi_squared(actuals: &[f64], predictions: &[f64], sigma2: f64) -> Result<f64, Error> {
    if actuals.len() != predictions.len() {
        return Err(Error::Size {
            what: "chi-squared residuals",
            expected: actuals.len(),
            got: predictions.len(),
        });
    }
    if actuals.is_empty() {
        return Err(Error::Arity {
            what: "chi-squared samples",
            minimum: 1,
            got: 0,
        });
    }
    if sigma2 < VARIANCE_FLOOR {
        let all_tiny = actuals
            .iter()
            .zip(predictions)
            .all(|(a, p)| (a - p).abs() < 1e-12);
        return Ok(if all_tiny { 0.0 } else { f64::INFINITY });
    }
    let mut sum = 0.0;
    for (a, p) in actuals.iter().zip(predictions) {
        let r = a - p;
        sum += r * r / sigma2;
    }
    Ok(sum)
}

/// Goodness-of-fit score `1 - chi2 / nu`, clamped to `[0, 1]` so it can act
/// as a non-negative prediction weight.
pub fn fit_score(chi2: f64, nu: u32) -> f64 {
    debug_assert!(nu >= 1);
    let score = 1.0 - chi2 / nu as f64;
    if score > 0.0 {
        score
    } else {
        0.0
    }
}

/// Running chi-squared accumulator behind the γ/δ prediction weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTracker {
    chi2: f64,
    nu: u32,
    sigma2: f64,
}

impl FitTracker {
    pub fn new(chi2: f64, nu: u32, sigma2: f64) -> FitTracker {
        FitTracker { chi2, nu, sigma2 }
    }

    /// Tracker seeded from a batch of residuals, e.g. in-sample training
    /// residuals at the end of a training period.
    pub fn from_residuals(
        actuals: &[f64],
        predictions: &[f64],
        nu: u32,
        sigma2: f64,
    ) -> Result<FitTracker, Error> {
        let chi2 = chi_squared(actuals, predictions, sigma2)?;
        Ok(FitTracker { chi2, nu, sigma2 })
    }

    pub fn chi2(&self) -> f64 {
        self.chi2
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Folds one revalidation error into the statistic: the squared
    /// normalized error is added and one degree of freedom gained.
    pub fn update(&mut self, error: f64) {
        if self.sigma2 < VARIANCE_FLOOR {
            if error.abs() >= 1e-12 {
                self.chi2 = f64::INFINITY;
            }
        } else {
            self.chi2 += error * error / self.sigma2;
        }
        self.nu += 1;
    }

    pub fn score(&self) -> f64 {
        fit_score(self.chi2, self.nu)
    }
}

/// Population variance, used as the chi-squared normalizer.
pub fn variance(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}
