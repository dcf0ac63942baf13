use serde::Serialize;

use crate::decline::{ArpsParams, ModelKind};
use crate::error::{Error, Result};
use crate::sim::Scheme;
use crate::stats::{mean_variance, sorted_quantile};

/// Probability levels summarised in every [`FptEstimate`].
pub const REPORTED_QUANTILES: [f64; 7] = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95];

/// How hitting times were simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FptMethod {
    /// Stepping the rate process on a real-time grid.
    Direct,
    /// Stepping a Brownian motion in the `tau` clock against the boundary
    /// `c1`, then mapping hits back through `tau^-1`.
    TimeChange,
}

/// Everything needed to rerun an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FptConfig {
    pub params: ArpsParams,
    pub model: ModelKind,
    pub method: FptMethod,
    pub scheme: Scheme,
    pub x: f64,
    pub horizon: f64,
    /// Step size in the simulation clock (`tau` units for the time-change
    /// method).
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub bridge: bool,
}

/// An empirical quantile with an order-statistic standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantileEstimate {
    pub p: f64,
    pub value: f64,
    pub se: f64,
    /// The quantile falls among censored samples: the true value is at
    /// least `value`.
    pub lower_bound: bool,
}

/// Monte Carlo hitting times with censoring at the horizon.
#[derive(Debug, Clone, Serialize)]
pub struct FptEstimate {
    pub config: FptConfig,
    /// One entry per path; censored paths hold the horizon.
    pub samples: Vec<f64>,
    pub censored: Vec<bool>,
    pub n_censored: usize,
    pub censored_fraction: f64,
    /// Mean over uncensored samples; `None` when every path is censored.
    pub mean: Option<f64>,
    pub mean_se: Option<f64>,
    pub variance: Option<f64>,
    /// `E[min(T, horizon)]`, which uses every sample.
    pub restricted_mean: f64,
    pub restricted_mean_se: f64,
    pub quantiles: Vec<QuantileEstimate>,
}

impl FptEstimate {
    pub(crate) fn from_samples(config: FptConfig, hits: Vec<(f64, bool)>) -> Result<Self> {
        if hits.is_empty() {
            return Err(Error::EmptySample);
        }
        let (samples, censored): (Vec<f64>, Vec<bool>) = hits.into_iter().unzip();
        let n = samples.len();
        let n_censored = censored.iter().filter(|&&c| c).count();
        let hit: Vec<f64> = samples
            .iter()
            .zip(&censored)
            .filter(|(_, &c)| !c)
            .map(|(&t, _)| t)
            .collect();
        let (mean, mean_se, variance) = match mean_variance(&hit) {
            Ok((m, v)) => (Some(m), Some((v / hit.len() as f64).sqrt()), Some(v)),
            Err(_) => (None, None, None),
        };
        let (restricted_mean, rv) = mean_variance(&samples)?;

        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let nf = n as f64;
        let quantiles = REPORTED_QUANTILES
            .iter()
            .map(|&p| {
                let value = sorted_quantile(&sorted, p);
                let half = (nf * p * (1.0 - p)).sqrt();
                let lo = sorted_quantile(&sorted, ((nf * p - half) / nf).max(0.0));
                let hi = sorted_quantile(&sorted, ((nf * p + half) / nf).min(1.0));
                QuantileEstimate {
                    p,
                    value,
                    se: 0.5 * (hi - lo),
                    lower_bound: n_censored > 0 && value >= config.horizon,
                }
            })
            .collect();

        Ok(Self {
            config,
            samples,
            censored,
            n_censored,
            censored_fraction: n_censored as f64 / nf,
            mean,
            mean_se,
            variance,
            restricted_mean,
            restricted_mean_se: (rv / nf).sqrt(),
            quantiles,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.config.horizon
    }

    /// Uncensored hitting times.
    pub fn hits(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples
            .iter()
            .zip(&self.censored)
            .filter(|(_, &c)| !c)
            .map(|(&t, _)| t)
    }

    /// Empirical `P[T > t]`; paths censored at the horizon count as
    /// surviving, so this is exact in the Monte Carlo sense for `t < horizon`.
    pub fn survival(&self, t: f64) -> f64 {
        let alive = self
            .samples
            .iter()
            .zip(&self.censored)
            .filter(|(&s, &c)| c || s > t)
            .count();
        alive as f64 / self.samples.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(horizon: f64) -> FptConfig {
        FptConfig {
            params: ArpsParams::new(380.0, 3e-4, 0.0, 0.1).unwrap(),
            model: ModelKind::LinearVol,
            method: FptMethod::Direct,
            scheme: Scheme::Exact,
            x: 100.0,
            horizon,
            dt: 1.0,
            n_paths: 4,
            seed: 0,
            bridge: true,
        }
    }

    #[test]
    fn censoring_bookkeeping() {
        let hits = vec![(1.0, false), (3.0, false), (10.0, true), (10.0, true)];
        let est = FptEstimate::from_samples(config(10.0), hits).unwrap();
        assert_eq!(est.n_censored, 2);
        assert_eq!(est.censored_fraction, 0.5);
        assert_eq!(est.mean, Some(2.0));
        assert_eq!(est.restricted_mean, 6.0);
        assert_eq!(est.hits().collect::<Vec<_>>(), vec![1.0, 3.0]);
        assert_eq!(est.survival(2.0), 0.75);
        assert_eq!(est.survival(10.0), 0.5);
        let median = est.quantiles.iter().find(|q| q.p == 0.5).unwrap();
        assert_eq!(median.value, 3.0);
        assert!(!median.lower_bound);
        let upper = est.quantiles.iter().find(|q| q.p == 0.9).unwrap();
        assert!(upper.lower_bound);
    }

    #[test]
    fn all_censored_has_no_mean() {
        let est = FptEstimate::from_samples(config(5.0), vec![(5.0, true); 3]).unwrap();
        assert_eq!(est.mean, None);
        assert_eq!(est.restricted_mean, 5.0);
    }
}
