//! Pearson and Spearman correlation with t-approximation p-values.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub method: CorrelationMethod,
    pub r: f64,
    /// Two-sided, from Student's t with `n - 2` degrees of freedom.
    pub p_value: f64,
    pub n: usize,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    pearson_named(x, y, "x", "y")
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    spearman_named(x, y, "x", "y")
}

/// [`pearson`] with column names for the zero-variance diagnostic.
pub fn pearson_named(x: &[f64], y: &[f64], x_name: &str, y_name: &str) -> Result<CorrelationResult> {
    check_pair(x, y, x_name, y_name)?;
    let r = pearson_r(x, y);
    Ok(CorrelationResult { method: CorrelationMethod::Pearson, r, p_value: t_test_p(r, x.len()), n: x.len() })
}

pub fn spearman_named(x: &[f64], y: &[f64], x_name: &str, y_name: &str) -> Result<CorrelationResult> {
    check_pair(x, y, x_name, y_name)?;
    let r = pearson_r(&average_ranks(x), &average_ranks(y));
    Ok(CorrelationResult { method: CorrelationMethod::Spearman, r, p_value: t_test_p(r, x.len()), n: x.len() })
}

fn check_pair(x: &[f64], y: &[f64], x_name: &str, y_name: &str) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientSample { needed: 3, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("correlation inputs must be finite"));
    }
    for (values, name) in [(x, x_name), (y, y_name)] {
        if values.iter().all(|&v| v == values[0]) {
            return Err(Error::UndefinedCorrelation { column: name.to_string() });
        }
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn pearson_r(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn t_test_p(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - r * r;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = r.abs() * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    (2.0 * dist.sf(t)).clamp(0.0, 1.0)
}

/// 1-based ranks with ties sharing the mean of the ranks they span.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}
