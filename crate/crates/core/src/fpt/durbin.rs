use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decline::{c2_unchecked, check_level, ArpsParams};
use crate::error::Result;
use crate::sim::TimeGrid;
use crate::specfun::quad::{integrate, QuadConfig};

/// Sign convention for the slope term of Durbin's prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DurbinForm {
    /// `p(t) = c2'(t) - c2(t)/t`, the tangent approximation for a boundary
    /// approached from above. Exact for `b = 0`.
    #[serde(rename = "corrected")]
    Corrected,
    /// The prefactor with `-d0 / (sigma (1 + b d0 t))` as originally
    /// printed. Kept for side-by-side comparison.
    #[serde(rename = "as-printed")]
    AsPrinted,
}

impl DurbinForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            DurbinForm::Corrected => "corrected",
            DurbinForm::AsPrinted => "as-printed",
        }
    }
}

impl fmt::Display for DurbinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DurbinForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "corrected" => Ok(DurbinForm::Corrected),
            "as-printed" | "as_printed" => Ok(DurbinForm::AsPrinted),
            other => Err(format!(
                "unknown Durbin form `{other}` (expected corrected or as-printed)"
            )),
        }
    }
}

/// Durbin's approximation `p(t) f(t)` to the hitting-time density of the
/// linear-volatility model, before any clamping. `f` is the density of the
/// driving Brownian motion at the boundary `c2(t)`.
pub fn durbin_value(params: &ArpsParams, x: f64, t: f64, form: DurbinForm) -> Result<f64> {
    check_level(params, x)?;
    Ok(durbin_unchecked(params, x, t, form))
}

fn durbin_unchecked(params: &ArpsParams, x: f64, t: f64, form: DurbinForm) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let c2 = c2_unchecked(params, x, t);
    let slope = match form {
        DurbinForm::Corrected => c2.slope,
        DurbinForm::AsPrinted => params.sigma() - c2.slope,
    };
    let prefactor = slope - c2.level / t;
    let gauss = (-c2.level * c2.level / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
    prefactor * gauss
}

/// Durbin curve sampled on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct DensityCurve {
    pub params: ArpsParams,
    pub x: f64,
    pub form: DurbinForm,
    pub grid: TimeGrid,
    /// Density per unit time, negative values clamped to zero.
    pub values: Vec<f64>,
    /// Grid points where the raw approximation was negative.
    pub clamp_count: usize,
    /// `integral of the clamped curve over [0, horizon]` by adaptive quadrature.
    pub integral: f64,
    /// `|1 - integral|`.
    pub normalization_defect: f64,
}

/// Evaluates the Durbin approximation on `grid`.
pub fn durbin_density(params: &ArpsParams, x: f64, grid: &TimeGrid, form: DurbinForm) -> Result<DensityCurve> {
    check_level(params, x)?;
    let mut clamp_count = 0;
    let values = grid
        .points()
        .iter()
        .map(|&t| {
            let v = durbin_unchecked(params, x, t, form);
            if v < 0.0 {
                clamp_count += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    let cfg = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-10,
        ..QuadConfig::default()
    };
    let integral = integrate(
        |t| durbin_unchecked(params, x, t, form).max(0.0),
        0.0,
        grid.horizon(),
        cfg,
    )?
    .value;
    Ok(DensityCurve {
        params: *params,
        x,
        form,
        grid: grid.clone(),
        values,
        clamp_count,
        integral,
        normalization_defect: (1.0 - integral).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpt::fpt_ig_model2_b0;
    use crate::specfun::InverseGaussian;
    use approx::assert_relative_eq;

    fn fig3(b: f64) -> ArpsParams {
        ArpsParams::with_sigma2(380.0, 3e-4, b, 0.01).unwrap()
    }

    #[test]
    fn exponential_regime_reproduces_inverse_gaussian() {
        let p = fig3(0.0);
        let ig = InverseGaussian::new(fpt_ig_model2_b0(&p, 100.0).unwrap());
        for t in [50.0, 120.0, 250.0, 600.0, 1000.0] {
            let d = durbin_value(&p, 100.0, t, DurbinForm::Corrected).unwrap();
            assert_relative_eq!(d, ig.pdf(t), max_relative = 1e-9);
        }
        assert_relative_eq!(
            durbin_value(&p, 100.0, 250.0, DurbinForm::Corrected).unwrap(),
            1.347e-3,
            epsilon = 5e-7
        );
    }

    #[test]
    fn as_printed_sign_differs() {
        let p = fig3(0.0);
        let a = durbin_value(&p, 100.0, 250.0, DurbinForm::Corrected).unwrap();
        let b = durbin_value(&p, 100.0, 250.0, DurbinForm::AsPrinted).unwrap();
        assert!((a - b).abs() > 1e-2 * a);
    }

    #[test]
    fn zero_at_origin_and_clamped() {
        let grid = TimeGrid::uniform(5.0, 5000.0).unwrap();
        let curve = durbin_density(&fig3(1.0), 100.0, &grid, DurbinForm::AsPrinted).unwrap();
        assert_eq!(curve.values[0], 0.0);
        assert!(curve.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn corrected_curves_are_nearly_normalised() {
        let grid = TimeGrid::uniform(5.0, 5000.0).unwrap();
        for b in [0.0, 0.5, 1.0] {
            let curve = durbin_density(&fig3(b), 100.0, &grid, DurbinForm::Corrected).unwrap();
            assert!(curve.normalization_defect < 0.05, "b = {b}: {}", curve.integral);
        }
    }

    #[test]
    fn form_parses() {
        assert_eq!("as_printed".parse::<DurbinForm>().unwrap(), DurbinForm::AsPrinted);
        assert_eq!("as-printed".parse::<DurbinForm>().unwrap(), DurbinForm::AsPrinted);
        assert!("other".parse::<DurbinForm>().is_err());
    }
}
