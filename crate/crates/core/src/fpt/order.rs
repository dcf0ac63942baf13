use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{mean_variance, one_sided_statistics};

/// Calibration of the one-sided dominance test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderTest {
    /// Label permutations used to calibrate the critical value.
    pub resamples: usize,
    pub seed: u64,
}

impl Default for OrderTest {
    fn default() -> Self {
        Self {
            resamples: 999,
            seed: 0x5eed,
        }
    }
}

/// Outcome of checking `A <=_st B`, i.e. `S_a(t) <= S_b(t)` for every `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub n_a: usize,
    pub n_b: usize,
    pub alpha: f64,
    /// `sup_t (S_a(t) - S_b(t))`, zero when the empirical survival
    /// functions are ordered everywhere.
    pub max_violation: f64,
    /// Where the largest violation occurs (`None` without violation).
    pub violation_at: Option<f64>,
    /// `sup_t (S_b(t) - S_a(t))`, the separation in the expected direction.
    pub separation: f64,
    /// Upper `alpha` quantile of the violation statistic under exchangeable
    /// labels.
    pub critical_value: f64,
    /// The asymptotic one-sided value `sqrt(-ln(alpha) / 2) sqrt((n+m)/(nm))`.
    pub asymptotic_critical_value: f64,
    pub p_value: f64,
    /// Ordering not rejected at level `alpha`.
    pub holds: bool,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `sqrt(var_a / n_a + var_b / n_b)`.
    pub pooled_se: f64,
    /// `mean_a <= mean_b + 3 pooled_se`.
    pub means_ordered: bool,
    pub test: OrderTest,
}

/// [`stochastic_order_check_with`] using the default calibration.
pub fn stochastic_order_check(a: &[f64], b: &[f64], alpha: f64) -> Result<OrderingReport> {
    stochastic_order_check_with(a, b, alpha, OrderTest::default())
}

/// Tests whether the sample `a` is stochastically smaller than `b`.
///
/// The statistic is the largest amount by which the empirical survival
/// function of `a` exceeds that of `b`. Its null distribution is calibrated
/// by permuting the group labels over the pooled sample.
pub fn stochastic_order_check_with(
    a: &[f64],
    b: &[f64],
    alpha: f64,
    test: OrderTest,
) -> Result<OrderingReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
    }
    if test.resamples == 0 {
        return Err(Error::param("resamples", 0.0, "must be positive"));
    }
    let (max_violation, separation) = one_sided_statistics(a, b)?;
    let (mean_a, var_a) = mean_variance(a)?;
    let (mean_b, var_b) = mean_variance(b)?;
    let (na, nb) = (a.len(), b.len());

    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&t| (t, true))
        .chain(b.iter().map(|&t| (t, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    let violation_at = (max_violation > 0.0).then(|| locate(&values, &pooled, na, nb, max_violation));

    let mut labels: Vec<bool> = pooled.iter().map(|p| p.1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(test.seed);
    let mut null: Vec<f64> = (0..test.resamples)
        .map(|_| {
            labels.shuffle(&mut rng);
            violation(&values, &labels, na, nb)
        })
        .collect();
    // Exact comparison of lattice statistics; allow for rounding in 1/n.
    let eps = 1e-12;
    let exceed = null.iter().filter(|&&d| d >= max_violation - eps).count();
    let p_value = (1 + exceed) as f64 / (1 + test.resamples) as f64;
    null.sort_by(f64::total_cmp);
    let k = ((1.0 - alpha) * (test.resamples + 1) as f64).ceil() as usize;
    let critical_value = null[k.clamp(1, test.resamples) - 1];

    let (nf, mf) = (na as f64, nb as f64);
    let pooled_se = (var_a / nf + var_b / mf).sqrt();
    Ok(OrderingReport {
        n_a: na,
        n_b: nb,
        alpha,
        max_violation,
        violation_at,
        separation,
        critical_value,
        asymptotic_critical_value: (-alpha.ln() / 2.0).sqrt() * ((nf + mf) / (nf * mf)).sqrt(),
        p_value,
        holds: p_value > alpha,
        mean_a,
        mean_b,
        pooled_se,
        means_ordered: mean_a <= mean_b + 3.0 * pooled_se,
        test,
    })
}

/// `sup_t (F_b(t) - F_a(t))` for labels over sorted pooled values; `true`
/// marks group `a`.
fn violation(values: &[f64], labels: &[bool], na: usize, nb: usize) -> f64 {
    let (mut ca, mut cb) = (0usize, 0usize);
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < values.len() {
        let t = values[i];
        while i < values.len() && values[i] == t {
            if labels[i] {
                ca += 1;
            } else {
                cb += 1;
            }
            i += 1;
        }
        best = best.max(cb as f64 / nb as f64 - ca as f64 / na as f64);
    }
    best
}

fn locate(values: &[f64], pooled: &[(f64, bool)], na: usize, nb: usize, target: f64) -> f64 {
    let (mut ca, mut cb) = (0usize, 0usize);
    let mut i = 0;
    while i < values.len() {
        let t = values[i];
        while i < values.len() && values[i] == t {
            if pooled[i].1 {
                ca += 1;
            } else {
                cb += 1;
            }
            i += 1;
        }
        if cb as f64 / nb as f64 - ca as f64 / na as f64 >= target - 1e-12 {
            return t;
        }
    }
    values[values.len() - 1]
}
