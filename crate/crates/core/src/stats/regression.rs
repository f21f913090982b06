//! Simple least-squares line with a mean-response confidence band.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

/// Fitted line `y = intercept + slope·x` and what is needed to evaluate the
/// band `ŷ(x) ± t·s·sqrt(1/n + (x - x̄)²/Sxx)` at any `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
    pub x_mean: f64,
    pub sxx: f64,
    /// Residual standard error, `sqrt(SSE / (n - 2))`.
    pub residual_se: f64,
    pub confidence: f64,
    /// Two-sided Student-t quantile with `n - 2` degrees of freedom.
    pub t_quantile: f64,
}

impl RegressionFit {
    pub fn fitted(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    pub fn half_width(&self, x: f64) -> f64 {
        let dx = x - self.x_mean;
        self.t_quantile * self.residual_se * (1.0 / self.n as f64 + dx * dx / self.sxx).sqrt()
    }

    /// `(lower, upper)` of the mean-response band at `x`.
    pub fn band(&self, x: f64) -> (f64, f64) {
        let (y, h) = (self.fitted(x), self.half_width(x));
        (y - h, y + h)
    }
}

pub fn linear_fit_with_band(x: &[f64], y: &[f64], confidence: f64) -> Result<RegressionFit> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientSample { needed: 3, got: x.len() });
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!("confidence must be in (0, 1), got {confidence}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("regression inputs must be finite"));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::UndefinedFit);
    }
    let n = x.len();
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - x_mean) * (a - x_mean);
        sxy += (a - x_mean) * (b - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = x.iter().zip(y).map(|(&a, &b)| (b - intercept - slope * a).powi(2)).sum();
    let df = (n - 2) as f64;
    let t_quantile = StudentsT::new(0.0, 1.0, df).expect("df >= 1").inverse_cdf(0.5 + confidence / 2.0);
    Ok(RegressionFit { slope, intercept, n, x_mean, sxx, residual_se: (sse / df).sqrt(), confidence, t_quantile })
}
