//! Closed-form evaluators for the deterministic Arps curve and both
//! stochastic models.
//!
//! Every power `(1 + b d0 t)^p` is evaluated as `exp(p * b * L(t))` where
//! `L(t) = ln(1 + b d0 t) / b` is computed with `ln_1p`. This keeps the
//! hyperbolic formulas accurate for arbitrarily small `b`, so the switch to
//! the exponential limit only has to guard the division by `b` itself.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape parameters below this value use the analytic `b -> 0` limits.
pub const B_EXPONENTIAL_THRESHOLD: f64 = 1e-12;

/// Parameters shared by the deterministic curve and both SDEs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ArpsParams {
    q0: f64,
    d0: f64,
    b: f64,
    sigma: f64,
}

#[derive(Deserialize)]
struct RawParams {
    q0: f64,
    d0: f64,
    b: f64,
    sigma: f64,
}

impl TryFrom<RawParams> for ArpsParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ArpsParams::new(raw.q0, raw.d0, raw.b, raw.sigma)
    }
}

impl ArpsParams {
    pub fn new(q0: f64, d0: f64, b: f64, sigma: f64) -> Result<Self> {
        if !(q0 > 0.0 && q0.is_finite()) {
            return Err(Error::param("q0", q0, "must be positive and finite"));
        }
        if !(d0 > 0.0 && d0.is_finite()) {
            return Err(Error::param("d0", d0, "must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::param("b", b, "must lie in [0, 1]"));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", sigma, "must be nonnegative and finite"));
        }
        Ok(Self { q0, d0, b, sigma })
    }

    /// Same as [`ArpsParams::new`] with the volatility given as a variance.
    pub fn with_sigma2(q0: f64, d0: f64, b: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) {
            return Err(Error::param("sigma2", sigma2, "must be nonnegative"));
        }
        Self::new(q0, d0, b, sigma2.sqrt())
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(self.q0, self.d0, b, self.sigma)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.q0, self.d0, self.b, sigma)
    }

    pub fn with_q0(&self, q0: f64) -> Result<Self> {
        Self::new(q0, self.d0, self.b, self.sigma)
    }

    pub fn is_exponential(&self) -> bool {
        self.b < B_EXPONENTIAL_THRESHOLD
    }

    /// `L(t) = ln(1 + b d0 t) / b`, so that `q_t = q0 exp(-L(t))`.
    pub fn log_decline(&self, t: f64) -> f64 {
        if self.is_exponential() {
            self.d0 * t
        } else {
            (self.b * self.d0 * t).ln_1p() / self.b
        }
    }

    /// Inverse of [`ArpsParams::log_decline`].
    pub(crate) fn time_at_log_decline(&self, l: f64) -> f64 {
        if self.is_exponential() {
            l / self.d0
        } else {
            (self.b * l).exp_m1() / (self.b * self.d0)
        }
    }

    /// Unchecked Arps rate, shared by the simulators.
    pub(crate) fn rate(&self, t: f64) -> f64 {
        self.q0 * (-self.log_decline(t)).exp()
    }

    /// Unchecked time change.
    pub(crate) fn tau(&self, t: f64) -> f64 {
        let k = self.b + 2.0;
        (k * self.log_decline(t)).exp_m1() / (self.d0 * k)
    }

    /// `tau(t) - tau(s)` for `s <= t` without cancellation.
    pub(crate) fn tau_increment(&self, s: f64, t: f64) -> f64 {
        let k = self.b + 2.0;
        let ls = self.log_decline(s);
        let lt = self.log_decline(t);
        (k * ls).exp() * (k * (lt - ls)).exp_m1() / (self.d0 * k)
    }

    pub(crate) fn tau_inv(&self, r: f64) -> f64 {
        let k = self.b + 2.0;
        self.time_at_log_decline((k * self.d0 * r).ln_1p() / k)
    }

    /// Unchecked variance of the constant-volatility model.
    pub(crate) fn const_vol_variance(&self, t: f64) -> f64 {
        let k = self.b + 2.0;
        let l = self.log_decline(t);
        self.sigma2() * (self.b * l).exp() * -(-k * l).exp_m1() / (self.d0 * k)
    }
}

/// Volatility structure of the SDE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// `alpha(q) = sigma`.
    #[serde(rename = "const-vol")]
    ConstantVol,
    /// `alpha(q) = sigma q`.
    #[serde(rename = "linear-vol")]
    LinearVol,
}

impl ModelKind {
    pub fn volatility(&self, sigma: f64, q: f64) -> f64 {
        match self {
            ModelKind::ConstantVol => sigma,
            ModelKind::LinearVol => sigma * q,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::ConstantVol => "const-vol",
            ModelKind::LinearVol => "linear-vol",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "const-vol" | "constant-vol" | "constant" => Ok(ModelKind::ConstantVol),
            "linear-vol" | "linear" => Ok(ModelKind::LinearVol),
            other => Err(format!(
                "unknown model `{other}` (expected const-vol or linear-vol)"
            )),
        }
    }
}

/// Moments of `Q_t` (and `Q_s` for the covariance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub covariance: Option<f64>,
    pub lognormal_location: Option<f64>,
    pub lognormal_scale2: Option<f64>,
}

fn check_time(name: &'static str, t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, t, "must be nonnegative and finite"))
    }
}

pub(crate) fn check_level(params: &ArpsParams, x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::param("x", x, "level must be positive"));
    }
    if x >= params.q0 {
        return Err(Error::param("x", x, "level must lie below q0"));
    }
    if params.sigma == 0.0 {
        return Err(Error::param("sigma", 0.0, "boundary needs sigma > 0"));
    }
    Ok(())
}

/// Deterministic Arps rate `q0 (1 + b d0 t)^(-1/b)`.
pub fn arps_rate(params: &ArpsParams, t: f64) -> Result<f64> {
    check_time("t", t)?;
    Ok(params.rate(t))
}

/// Cumulative production `int_0^t q_u du`.
pub fn arps_cumulative(params: &ArpsParams, t: f64) -> Result<f64> {
    check_time("t", t)?;
    // (1 + b d0 t)^(1 - 1/b) = exp((b - 1) L), which also covers b = 0 and b = 1.
    let c = params.b - 1.0;
    let l = params.log_decline(t);
    let integral = if c == 0.0 { l } else { (c * l).exp_m1() / c };
    Ok(params.q0 * integral / params.d0)
}

/// Mean and variance of the constant-volatility model at `t` and the
/// covariance of `(Q_s, Q_t)`. The covariance is symmetric, so `s > t` is
/// accepted.
pub fn model1_moments(params: &ArpsParams, s: f64, t: f64) -> Result<MomentSummary> {
    check_time("s", s)?;
    check_time("t", t)?;
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    let covariance =
        params.const_vol_variance(lo) * (params.log_decline(lo) - params.log_decline(hi)).exp();
    Ok(MomentSummary {
        mean: params.rate(t),
        variance: params.const_vol_variance(t),
        covariance: Some(covariance),
        lognormal_location: None,
        lognormal_scale2: None,
    })
}

/// Moments of the linear-volatility model, including the parameters of the
/// lognormal law of `Q_t`.
pub fn model2_moments(params: &ArpsParams, t: f64) -> Result<MomentSummary> {
    check_time("t", t)?;
    let mean = params.rate(t);
    let scale2 = params.sigma2() * t;
    Ok(MomentSummary {
        mean,
        variance: mean * mean * scale2.exp_m1(),
        covariance: None,
        lognormal_location: Some(params.q0.ln() - params.log_decline(t) - 0.5 * scale2),
        lognormal_scale2: Some(scale2),
    })
}

/// Deterministic clock `tau(t) = Var[int_0^t (1 + b d0 u)^(1/b) dB_u]`.
pub fn time_change_tau(params: &ArpsParams, t: f64) -> Result<f64> {
    check_time("t", t)?;
    Ok(params.tau(t))
}

/// Inverse clock `[(1 + r (b+2) d0)^(b/(b+2)) - 1] / (b d0)`.
pub fn time_change_tau_inv(params: &ArpsParams, r: f64) -> Result<f64> {
    check_time("r", r)?;
    Ok(params.tau_inv(r))
}

/// Boundary for the Brownian motion `W` in the `tau` clock: `Q` reaches `x`
/// exactly when `W_r` falls to `c1(r)`.
pub fn boundary_c1(params: &ArpsParams, x: f64, r: f64) -> Result<f64> {
    check_level(params, x)?;
    check_time("r", r)?;
    Ok(c1_unchecked(params, x, r))
}

pub(crate) fn c1_unchecked(params: &ArpsParams, x: f64, r: f64) -> f64 {
    let k = params.b + 2.0;
    (x * ((k * params.d0 * r).ln_1p() / k).exp() - params.q0) / params.sigma
}

/// Boundary for the linear-volatility model together with its slope and the
/// dominating linear boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C2Boundary {
    pub level: f64,
    pub slope: f64,
    pub linear_bound: f64,
    pub linear_slope: f64,
}

/// `c2(t) = sigma t / 2 + ln(x / q0) / sigma + ln(1 + b d0 t) / (b sigma)`.
///
/// `Q` reaches `x` when the driving Brownian motion falls to `c2`. The linear
/// boundary `ln(x/q0)/sigma + (sigma/2 + d0/sigma) t` dominates `c2` and
/// coincides with it when `b = 0`.
pub fn boundary_c2(params: &ArpsParams, x: f64, t: f64) -> Result<C2Boundary> {
    check_level(params, x)?;
    check_time("t", t)?;
    Ok(c2_unchecked(params, x, t))
}

pub(crate) fn c2_unchecked(params: &ArpsParams, x: f64, t: f64) -> C2Boundary {
    let sigma = params.sigma;
    let intercept = (x / params.q0).ln() / sigma;
    let linear_slope = 0.5 * sigma + params.d0 / sigma;
    C2Boundary {
        level: 0.5 * sigma * t + intercept + params.log_decline(t) / sigma,
        slope: 0.5 * sigma + params.d0 / (sigma * (1.0 + params.b * params.d0 * t)),
        linear_bound: intercept + linear_slope * t,
        linear_slope,
    }
}
