use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ln_normal_cdf, normal_cdf};
use crate::error::{Error, Result};

/// Mean `m` and shape `lambda` of an inverse Gaussian law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseGaussianParams {
    pub m: f64,
    pub lambda: f64,
}

impl InverseGaussianParams {
    pub fn new(m: f64, lambda: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::param("m", m, "must be positive and finite"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", lambda, "must be positive and finite"));
        }
        Ok(Self { m, lambda })
    }

    /// Law of the first time a standard Brownian motion started at 0 meets
    /// the line `slope * t + intercept`, for an intercept and slope of
    /// opposite signs.
    pub fn from_linear_boundary(slope: f64, intercept: f64) -> Result<Self> {
        if slope * intercept >= 0.0 {
            return Err(Error::param(
                "slope",
                slope,
                "slope and intercept must have opposite signs",
            ));
        }
        Self::new(intercept.abs() / slope.abs(), intercept * intercept)
    }
}

/// Immutable distribution handle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGaussian {
    params: InverseGaussianParams,
}

impl InverseGaussian {
    pub fn new(params: InverseGaussianParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> InverseGaussianParams {
        self.params
    }

    pub fn mean(&self) -> f64 {
        self.params.m
    }

    pub fn variance(&self) -> f64 {
        self.params.m.powi(3) / self.params.lambda
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        let InverseGaussianParams { m, lambda } = self.params;
        let dev = t - m;
        (lambda / (2.0 * PI * t * t * t)).sqrt() * (-lambda * dev * dev / (2.0 * m * m * t)).exp()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        if t == f64::INFINITY {
            return 1.0;
        }
        let InverseGaussianParams { m, lambda } = self.params;
        let root = (lambda / t).sqrt();
        let first = normal_cdf(root * (t / m - 1.0));
        // exp(2 lambda / m) Phi(-...) evaluated in logs; the factor alone can overflow.
        let second = (2.0 * lambda / m + ln_normal_cdf(-root * (t / m + 1.0))).exp();
        (first + second).min(1.0)
    }

    pub fn survival(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }

    /// `E[exp(-u T)] = exp((lambda / m) (1 - sqrt(1 + 2 m^2 u / lambda)))`.
    pub fn laplace_transform(&self, u: f64) -> f64 {
        let InverseGaussianParams { m, lambda } = self.params;
        let r = 2.0 * m * m * u / lambda;
        // 1 - sqrt(1 + r) = -r / (1 + sqrt(1 + r)) avoids cancellation near u = 0.
        (-(lambda / m) * r / (1.0 + (1.0 + r).sqrt())).exp()
    }

    /// Transformation sampler (Michael, Schucany and Haas): one normal and
    /// one uniform per draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let InverseGaussianParams { m, lambda } = self.params;
        let v: f64 = rng.sample(StandardNormal);
        let y = m * v * v;
        // m + m/(2 lambda) (y - sqrt(4 lambda y + y^2)), rearranged to avoid cancellation.
        let x = m - 2.0 * m * y / (y + (4.0 * lambda * y + y * y).sqrt());
        let u: f64 = rng.random();
        if u <= m / (m + x) {
            x
        } else {
            m * m / x
        }
    }
}
