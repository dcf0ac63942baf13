use statrs::function::gamma::ln_gamma;

use super::quad::{integrate, integrate_to_infinity, QuadConfig};
use crate::decline::ArpsParams;
use crate::error::{Error, Result};

fn quad_cfg() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

/// `ln H_nu(y)` for `nu <= 0`, from the integral representation
/// `H_nu(y) = (1 / Gamma(-nu)) int_0^inf exp(-s^2 - 2 s y) s^(-nu - 1) ds`.
pub fn ln_hermite_function(nu: f64, y: f64) -> Result<f64> {
    if !(nu <= 0.0) {
        return Err(Error::param("nu", nu, "integral representation needs nu <= 0"));
    }
    if nu == 0.0 {
        return Ok(0.0);
    }
    let h = -nu;
    let cfg = quad_cfg();
    let f = move |s: f64| (-s * s - 2.0 * s * y).exp();
    if h < 1.0 {
        // Subtract the s^(h-1) singularity on [0, 1]:
        //   h I = h int_0^1 s^(h-1) (f - 1) ds + 1 + h int_1^inf s^(h-1) f ds
        // and H = h I / Gamma(1 + h), which stays finite as h -> 0.
        let near = integrate(
            |s| if s == 0.0 { 0.0 } else { s.powf(h - 1.0) * (f(s) - 1.0) },
            0.0,
            1.0,
            cfg,
        )?;
        let far = integrate_to_infinity(|s| s.powf(h - 1.0) * f(s), 1.0, cfg)?;
        let scaled = h * near.value + 1.0 + h * far.value;
        if !(scaled > 0.0) {
            return Err(Error::Quadrature(format!(
                "Hermite function H_{nu}({y}) evaluated to {scaled}"
            )));
        }
        return Ok(scaled.ln() - ln_gamma(1.0 + h));
    }
    // Scale the integrand by its maximum so large orders neither overflow
    // nor underflow.
    let peak = if h == 1.0 {
        0.0
    } else {
        0.5 * (-y + (y * y + 2.0 * (h - 1.0)).sqrt())
    };
    let log_integrand = move |s: f64| {
        let power = if h == 1.0 { 0.0 } else { (h - 1.0) * s.ln() };
        power - s * s - 2.0 * s * y
    };
    let log_peak = log_integrand(peak.max(f64::MIN_POSITIVE));
    let g = move |s: f64| {
        if s == 0.0 && h > 1.0 {
            0.0
        } else {
            (log_integrand(s) - log_peak).exp()
        }
    };
    let split = peak.max(1e-3);
    let left = integrate(g, 0.0, split, cfg)?;
    let right = integrate_to_infinity(g, split, cfg)?;
    let total = left.value + right.value;
    if !(total > 0.0) {
        return Err(Error::Quadrature(format!(
            "Hermite function H_{nu}({y}) evaluated to {total}"
        )));
    }
    Ok(total.ln() + log_peak - ln_gamma(h))
}

/// Hermite function `H_nu(y)` of nonpositive order.
pub fn hermite_function(nu: f64, y: f64) -> Result<f64> {
    ln_hermite_function(nu, y).map(f64::exp)
}

/// Laplace transform `E[exp(-u T)]` of the time the exponential-decline
/// constant-volatility model (an Ornstein-Uhlenbeck process) needs to fall
/// from `q0` to `x`:
///
/// `H_{-u/d0}(q0 sqrt(d0) / sigma) / H_{-u/d0}(x sqrt(d0) / sigma)`.
pub fn ou_fpt_laplace(params: &ArpsParams, x: f64, u: f64) -> Result<f64> {
    if !params.is_exponential() {
        return Err(Error::RequiresExponential {
            what: "the Hermite-function Laplace transform",
            b: params.b(),
        });
    }
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::param("u", u, "must be nonnegative and finite"));
    }
    if !(x > 0.0 && x <= params.q0()) {
        return Err(Error::param("x", x, "level must lie in (0, q0]"));
    }
    if !(params.sigma() > 0.0) {
        return Err(Error::param("sigma", params.sigma(), "must be positive"));
    }
    if u == 0.0 {
        return Ok(1.0);
    }
    let nu = -u / params.d0();
    let scale = params.d0().sqrt() / params.sigma();
    let start = ln_hermite_function(nu, params.q0() * scale)?;
    let level = ln_hermite_function(nu, x * scale)?;
    Ok((start - level).exp())
}
