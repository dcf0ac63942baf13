//! Special functions and distributions used by the first-passage results.

mod hermite;
mod inverse_gaussian;
mod kummer;
mod laplace;
pub mod quad;
mod sato;

pub use hermite::{hermite_function, ln_hermite_function, ou_fpt_laplace};
pub use inverse_gaussian::{InverseGaussian, InverseGaussianParams};
pub use kummer::kummer_m;
pub use laplace::{laplace_invert, LaplaceInversion, StehfestInverter};
pub use sato::{double_factorial, ln_double_factorial, sato_phi1, sato_series_terms};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping rule for the power series in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTolerance {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl SeriesTolerance {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::param("rel_tol", rel_tol, "must be positive"));
        }
        if max_terms == 0 {
            return Err(Error::param("max_terms", 0.0, "must be at least 1"));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// `ln Phi(z)`, accurate far into the lower tail.
pub fn ln_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        normal_cdf(z).ln()
    } else {
        // Asymptotic expansion of the Mills ratio.
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - (-z * (2.0 * std::f64::consts::PI).sqrt()).ln() + series.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_normal_cdf_is_continuous_at_switch() {
        // erfc is still representable a little past the switch point.
        for z in [-30.5, -31.0, -35.0] {
            assert_relative_eq!(ln_normal_cdf(z), normal_cdf(z).ln(), max_relative = 1e-9);
        }
        assert_relative_eq!(ln_normal_cdf(-29.0), normal_cdf(-29.0).ln(), max_relative = 1e-15);
        assert!(ln_normal_cdf(-100.0).is_finite());
        assert_relative_eq!(normal_cdf(0.0), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn tolerance_validation() {
        assert!(SeriesTolerance::new(0.0, 10).is_err());
        assert!(SeriesTolerance::new(1e-10, 0).is_err());
        assert!(SeriesTolerance::new(1e-10, 1).is_ok());
    }
}
