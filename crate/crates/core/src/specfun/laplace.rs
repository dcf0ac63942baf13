use serde::Serialize;

use crate::error::{Error, Result};

/// Gaver-Stehfest inversion of a real-valued Laplace transform.
///
/// `f(t) ~ (ln 2 / t) sum_{k=1}^{N} V_k F(k ln 2 / t)` with the Stehfest
/// weights `V_k`. The weights alternate in sign and grow like `10^(N/2)`, so
/// in double precision the usable node count tops out around 16-18: beyond
/// that rounding in `F` is amplified faster than the truncation error
/// shrinks. The default runs `N = 16` and cross-checks against `N = 14`.
#[derive(Debug, Clone)]
pub struct StehfestInverter {
    nodes: usize,
    check_nodes: usize,
    weights: Vec<f64>,
    check_weights: Vec<f64>,
    rel_tol: f64,
    abs_tol: f64,
}

/// An inverted density value. Always an approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceInversion {
    pub t: f64,
    pub value: f64,
    pub check_value: f64,
    pub nodes: usize,
    pub approximate: bool,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn stehfest_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    (1..=n)
        .map(|k| {
            let lo = k.div_ceil(2);
            let hi = k.min(half);
            let sum: f64 = (lo..=hi)
                .map(|j| {
                    (j as f64).powi(half as i32) * factorial(2 * j)
                        / (factorial(half - j)
                            * factorial(j)
                            * factorial(j - 1)
                            * factorial(k - j)
                            * factorial(2 * j - k))
                })
                .sum();
            if (k + half).is_multiple_of(2) {
                sum
            } else {
                -sum
            }
        })
        .collect()
}

impl Default for StehfestInverter {
    fn default() -> Self {
        Self::new(16, 14, 1e-2, 1e-12).expect("default node counts are valid")
    }
}

impl StehfestInverter {
    /// `nodes` and `check_nodes` must be even and at most 20; the result is
    /// rejected when the two disagree by more than
    /// `max(rel_tol |value|, abs_tol)`.
    pub fn new(nodes: usize, check_nodes: usize, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        for (name, n) in [("nodes", nodes), ("check_nodes", check_nodes)] {
            if n == 0 || n % 2 != 0 || n > 20 {
                return Err(Error::param(name, n as f64, "must be even and in [2, 20]"));
            }
        }
        Ok(Self {
            nodes,
            check_nodes,
            weights: stehfest_weights(nodes),
            check_weights: stehfest_weights(check_nodes),
            rel_tol,
            abs_tol,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn check_nodes(&self) -> usize {
        self.check_nodes
    }

    fn sum<F: Fn(f64) -> f64>(weights: &[f64], transform: &F, t: f64) -> f64 {
        let step = std::f64::consts::LN_2 / t;
        step * weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * transform((i + 1) as f64 * step))
            .sum::<f64>()
    }

    pub fn invert<F: Fn(f64) -> f64>(&self, transform: F, t: f64) -> Result<LaplaceInversion> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::param("t", t, "must be positive and finite"));
        }
        let value = Self::sum(&self.weights, &transform, t);
        let check_value = Self::sum(&self.check_weights, &transform, t);
        if !value.is_finite()
            || !check_value.is_finite()
            || (value - check_value).abs() > (self.rel_tol * value.abs()).max(self.abs_tol)
        {
            return Err(Error::InversionUnstable {
                t,
                value,
                check: check_value,
            });
        }
        Ok(LaplaceInversion {
            t,
            value,
            check_value,
            nodes: self.nodes,
            approximate: true,
        })
    }
}

/// Inverts `transform` at `t` with the default Stehfest configuration.
pub fn laplace_invert<F: Fn(f64) -> f64>(transform: F, t: f64) -> Result<LaplaceInversion> {
    StehfestInverter::default().invert(transform, t)
}
