//! Kolmogorov-Smirnov normality test with estimated parameters.
//!
//! The sample is standardized with its own mean and standard deviation, so
//! the classical K-S null distribution does not apply. The p-value comes
//! from a seeded Monte-Carlo null distribution of the same statistic on
//! standard-normal samples of equal size (Lilliefors' construction).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

pub const DEFAULT_REPLICATES: usize = 10_000;

/// Displayed p-values are capped here, as common statistics packages do
/// for the Lilliefors table.
pub const P_DISPLAY_CAP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub d: f64,
    /// Monte-Carlo p-value, uncapped.
    pub p_value: f64,
    pub n: usize,
    pub replicates: usize,
    /// True when `p_value` exceeds [`P_DISPLAY_CAP`] and would be shown as
    /// "p = 0.2".
    pub capped_at_0_2: bool,
}

impl NormalityResult {
    pub fn display_p(&self) -> f64 {
        self.p_value.min(P_DISPLAY_CAP)
    }

    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// `sup |F_n - Φ((x - x̄)/s)|` with `s` the sample standard deviation.
pub fn ks_statistic(x: &[f64]) -> Result<f64> {
    if x.len() < 4 {
        return Err(Error::InsufficientSample { needed: 4, got: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("sample must be finite"));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::DegenerateSample);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let mut z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    Ok(ks_sorted_standardized(&z))
}

fn ks_sorted_standardized(z: &[f64]) -> f64 {
    let phi = Normal::standard();
    let n = z.len() as f64;
    z.iter().enumerate().fold(0.0, |d, (i, &v)| {
        let f = phi.cdf(v);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    })
}

/// Simulated null distribution of [`ks_statistic`] for one sample size.
#[derive(Debug, Clone)]
pub struct LillieforsNull {
    n: usize,
    sorted: Vec<f64>,
}

impl LillieforsNull {
    pub fn simulate(n: usize, replicates: usize, seed: u64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InsufficientSample { needed: 4, got: n });
        }
        if replicates == 0 {
            return Err(Error::invalid("need at least one replicate"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf = vec![0.0; n];
        let mut sorted: Vec<f64> = (0..replicates)
            .map(|_| {
                for v in buf.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                ks_statistic(&buf).expect("normal draws are not constant")
            })
            .collect();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { n, sorted })
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn replicates(&self) -> usize {
        self.sorted.len()
    }

    /// `(1 + #{D* ≥ d}) / (R + 1)`.
    pub fn p_value(&self, d: f64) -> f64 {
        let at_least = self.sorted.len() - self.sorted.partition_point(|&v| v < d);
        (1 + at_least) as f64 / (self.sorted.len() + 1) as f64
    }

    pub fn test(&self, x: &[f64]) -> Result<NormalityResult> {
        if x.len() != self.n {
            return Err(Error::invalid(format!("null table is for n = {}, sample has {}", self.n, x.len())));
        }
        let d = ks_statistic(x)?;
        let p_value = self.p_value(d);
        Ok(NormalityResult {
            d,
            p_value,
            n: self.n,
            replicates: self.sorted.len(),
            capped_at_0_2: p_value > P_DISPLAY_CAP,
        })
    }
}

/// Tests `x` for normality with [`DEFAULT_REPLICATES`] null replicates
/// drawn from `seed`.
pub fn ks_normality(x: &[f64], seed: u64) -> Result<NormalityResult> {
    ks_statistic(x)?;
    LillieforsNull::simulate(x.len(), DEFAULT_REPLICATES, seed)?.test(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn statistic_by_hand() {
        // z = (-1.1619, -0.3873, 0.3873, 1.1619) for 1,2,3,4
        let d = ks_statistic(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let phi = Normal::standard();
        let s = (5.0f64 / 3.0).sqrt();
        let z: Vec<f64> = [-1.5, -0.5, 0.5, 1.5].iter().map(|v| v / s).collect();
        let expected = (0..4)
            .map(|i| {
                let f = phi.cdf(z[i]);
                ((i + 1) as f64 / 4.0 - f).max(f - i as f64 / 4.0)
            })
            .fold(0.0, f64::max);
        assert!((d - expected).abs() < 1e-15);
        assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn two_point_sample_is_rejected() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
        let r = ks_normality(&x, 1).unwrap();
        assert!(r.p_value < 0.01, "{r:?}");
        assert!(!r.capped_at_0_2);
    }

    #[test]
    fn normal_sample_usually_passes() {
        let null = LillieforsNull::simulate(200, 2000, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut passes = 0;
        for _ in 0..200 {
            let x: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
            if null.test(&x).unwrap().p_value > 0.05 {
                passes += 1;
            }
        }
        // size 5% test: expect ~190 of 200 (binomial sd ≈ 3.1)
        assert!(passes >= 178, "{passes}");
    }

    #[test]
    fn p_value_bounds_and_cap() {
        let null = LillieforsNull::simulate(10, 500, 3).unwrap();
        assert_eq!(null.p_value(0.0), 1.0);
        assert_eq!(null.p_value(1.0), 1.0 / 501.0);
        let r = null.test(&[0.3, -1.2, 0.8, 0.1, -0.4, 1.9, -0.7, 0.2, 0.5, -0.1]).unwrap();
        assert_eq!(r.capped_at_0_2, r.p_value > 0.2);
        assert!(r.display_p() <= 0.2);
    }

    #[test]
    fn errors() {
        assert!(matches!(ks_statistic(&[2.0; 10]), Err(Error::DegenerateSample)));
        assert!(matches!(ks_statistic(&[1.0, 2.0, 3.0]), Err(Error::InsufficientSample { .. })));
        assert!(LillieforsNull::simulate(10, 10, 0).unwrap().test(&[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn seeded_results_repeat() {
        let x = [3.1, 2.7, 4.4, 3.9, 2.2, 3.3, 3.0, 5.1];
        assert_eq!(ks_normality(&x, 11).unwrap(), ks_normality(&x, 11).unwrap());
    }

    proptest! {
        #[test]
        fn statistic_is_affine_invariant(x in prop::collection::vec(-100.0..100.0f64, 4..40),
                                         a in prop_oneof![0.01..100.0f64, -100.0..-0.01f64],
                                         b in -1e3..1e3f64) {
            prop_assume!(x.iter().any(|&v| v != x[0]));
            let d = ks_statistic(&x).unwrap();
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((ks_statistic(&y).unwrap() - d).abs() < 1e-12);
        }
    }
}
