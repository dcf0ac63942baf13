//! Sample statistics and Kolmogorov-Smirnov machinery.

use serde::Serialize;

use crate::error::{Error, Result};

/// Mean and unbiased variance (zero variance for a single observation).
pub fn mean_variance(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let variance = if xs.len() < 2 {
        0.0
    } else {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    };
    Ok((mean, variance))
}

/// Sample moments with Monte Carlo standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub n: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
}

/// Moments of `xs`; the variance standard error uses the sample fourth
/// central moment, `sqrt((m4 - s^4) / n)`.
pub fn moment_estimate(xs: &[f64]) -> Result<MomentEstimate> {
    let (mean, variance) = mean_variance(xs)?;
    let n = xs.len() as f64;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Ok(MomentEstimate {
        n: xs.len(),
        mean,
        mean_se: (variance / n).sqrt(),
        variance,
        variance_se: ((m4 - variance * variance).max(0.0) / n).sqrt(),
    })
}

/// Sample covariance with its standard error `sd((x - mx)(y - my)) / sqrt(n)`.
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::EmptySample);
    }
    let (mx, _) = mean_variance(xs)?;
    let (my, _) = mean_variance(ys)?;
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let (mp, vp) = mean_variance(&products)?;
    let n = xs.len() as f64;
    Ok((mp * n / (n - 1.0).max(1.0), (vp / n).sqrt()))
}

/// `c(alpha) = sqrt(-ln(alpha / 2) / 2)`, the asymptotic two-sided
/// Kolmogorov coefficient (1.628 at alpha = 0.01).
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Asymptotic critical value of the one-sample statistic.
pub fn ks_critical_one_sample(n: usize, alpha: f64) -> f64 {
    ks_coefficient(alpha) / (n as f64).sqrt()
}

/// Asymptotic critical value of the two-sample statistic.
pub fn ks_critical_two_sample(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}

/// `sup_t |F_n(t) - F(t)|` against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        // Ties share one jump of the empirical CDF.
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let f = cdf(sorted[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}

/// `sup_t |F_a(t) - F_b(t)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let (plus, minus) = one_sided_statistics(a, b)?;
    Ok(plus.max(minus))
}

/// `(sup_t (F_b - F_a), sup_t (F_a - F_b))`, both clamped at zero.
pub(crate) fn one_sided_statistics(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let (mut plus, mut minus): (f64, f64) = (0.0, 0.0);
    while i < sa.len() || j < sb.len() {
        let t = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < sa.len() && sa[i] == t {
            i += 1;
        }
        while j < sb.len() && sb[j] == t {
            j += 1;
        }
        let fa = i as f64 / na;
        let fb = j as f64 / nb;
        plus = plus.max(fb - fa);
        minus = minus.max(fa - fb);
    }
    Ok((plus, minus))
}

/// Empirical quantile by the inverse-CDF convention, on sorted data.
pub(crate) fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
    sorted[idx]
}
