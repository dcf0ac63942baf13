use serde::Serialize;

use crate::decline::{check_level, ArpsParams, ModelKind};
use crate::error::{Error, Result};
use crate::specfun::{sato_phi1, InverseGaussianParams, SeriesTolerance};

/// Exact hitting-time law of the linear-volatility model in the exponential
/// regime: `IG(m, lambda)` with `m = 2 ln(q0/x) / (2 d0 + sigma^2)` and
/// `lambda = (ln(q0/x) / sigma)^2`.
pub fn fpt_ig_model2_b0(params: &ArpsParams, x: f64) -> Result<InverseGaussianParams> {
    if !params.is_exponential() {
        return Err(Error::RequiresExponential {
            what: "inverse Gaussian hitting-time law",
            b: params.b(),
        });
    }
    check_level(params, x)?;
    let ln_ratio = (params.q0() / x).ln();
    InverseGaussianParams::new(
        2.0 * ln_ratio / (2.0 * params.d0() + params.sigma2()),
        (ln_ratio / params.sigma()).powi(2),
    )
}

/// Analytic lower bounds on the mean hitting time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanFptBounds {
    pub model: ModelKind,
    pub x: f64,
    /// `2 ln(q0/x) / (2 d0 + sigma^2)`: the exponential-regime mean, a lower
    /// bound for every `b` because hitting times grow with `b`.
    pub linear_vol_lower_bound: Option<f64>,
    /// `phi1(0, x) - phi1(0, q0)` exactly as the Sato-series bound is
    /// stated; negative for `x < q0` since `phi1(0, .)` is increasing.
    pub sato_as_printed: Option<f64>,
    /// `|phi1(0, q0) - phi1(0, x)|`.
    pub sato_absolute: Option<f64>,
    pub notes: Vec<String>,
}

/// Lower bounds on `E[T]` for the given model.
pub fn mean_fpt_bounds(params: &ArpsParams, x: f64, model: ModelKind) -> Result<MeanFptBounds> {
    if !(x > 0.0) || x >= params.q0() {
        return Err(Error::param("x", x, "level must lie in (0, q0)"));
    }
    let mut report = MeanFptBounds {
        model,
        x,
        linear_vol_lower_bound: None,
        sato_as_printed: None,
        sato_absolute: None,
        notes: Vec::new(),
    };
    match model {
        ModelKind::LinearVol => {
            report.linear_vol_lower_bound =
                Some(2.0 * (params.q0() / x).ln() / (2.0 * params.d0() + params.sigma2()));
        }
        ModelKind::ConstantVol => {
            check_level(params, x)?;
            report.notes.push(
                "the Sato-series bound phi1(0,x) - phi1(0,q0) is negative for x < q0 as stated; \
                 the absolute difference is reported alongside and neither is asserted"
                    .to_string(),
            );
            let tol = SeriesTolerance::default();
            let phi = |z| sato_phi1(params.d0(), params.sigma(), z, tol);
            match (phi(x), phi(params.q0())) {
                (Ok(at_x), Ok(at_q0)) => {
                    report.sato_as_printed = Some(at_x - at_q0);
                    report.sato_absolute = Some((at_q0 - at_x).abs());
                }
                (Err(e), _) | (_, Err(e)) if e.is_numerical() => {
                    report.notes.push(format!("Sato series not evaluated: {e}"));
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
    }
    Ok(report)
}
