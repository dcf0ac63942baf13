use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::grid::{Path, TimeGrid};
use super::noise::NoiseSpec;
use crate::decline::{ArpsParams, ModelKind};
use crate::error::Result;

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Explicit Euler-Maruyama on the SDE itself.
    #[serde(rename = "em")]
    EulerMaruyama,
    /// Sampling from the closed-form solution; exact at grid points.
    #[serde(rename = "exact")]
    Exact,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::EulerMaruyama => "em",
            Scheme::Exact => "exact",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "em" | "euler" | "euler-maruyama" => Ok(Scheme::EulerMaruyama),
            "exact" => Ok(Scheme::Exact),
            other => Err(format!("unknown scheme `{other}` (expected em or exact)")),
        }
    }
}

/// Per-step coefficients precomputed for one grid, shared by every path.
///
/// The state carried between steps depends on the kernel:
/// - constant-volatility exact: `X_t = (1 + b d0 t)^(1/b) Q_t`, a martingale
///   with independent Gaussian increments of variance `sigma^2 (tau(t) - tau(s))`;
/// - linear-volatility exact: the driving Brownian motion `B_t`;
/// - Euler-Maruyama: `Q_t` itself.
#[derive(Debug, Clone)]
pub(crate) enum Stepper {
    ConstExact {
        q0: f64,
        /// `(1 + b d0 t_i)^(-1/b)`.
        decay: Vec<f64>,
        /// `sigma sqrt(tau(t_{i+1}) - tau(t_i))`.
        increment_sd: Vec<f64>,
    },
    LinearExact {
        sigma: f64,
        /// Arps rate `q_{t_i}`.
        rate: Vec<f64>,
        /// `-sigma^2 t_i / 2`.
        compensator: Vec<f64>,
        /// `sqrt(t_{i+1} - t_i)`.
        increment_sd: Vec<f64>,
    },
    Euler {
        q0: f64,
        sigma: f64,
        model: ModelKind,
        /// `d0 dt_i / (1 + b d0 t_i)`.
        drift: Vec<f64>,
        /// `sqrt(dt_i)`.
        sqrt_dt: Vec<f64>,
    },
}

impl Stepper {
    pub(crate) fn new(params: &ArpsParams, model: ModelKind, scheme: Scheme, grid: &TimeGrid) -> Self {
        let t = grid.points();
        let steps = 0..grid.steps();
        match (scheme, model) {
            (Scheme::Exact, ModelKind::ConstantVol) => Stepper::ConstExact {
                q0: params.q0(),
                decay: t.iter().map(|&ti| (-params.log_decline(ti)).exp()).collect(),
                increment_sd: steps
                    .map(|i| params.sigma() * params.tau_increment(t[i], t[i + 1]).sqrt())
                    .collect(),
            },
            (Scheme::Exact, ModelKind::LinearVol) => Stepper::LinearExact {
                sigma: params.sigma(),
                rate: t.iter().map(|&ti| params.rate(ti)).collect(),
                compensator: t.iter().map(|&ti| -0.5 * params.sigma2() * ti).collect(),
                increment_sd: steps.map(|i| grid.step_size(i).sqrt()).collect(),
            },
            (Scheme::EulerMaruyama, _) => Stepper::Euler {
                q0: params.q0(),
                sigma: params.sigma(),
                model,
                drift: steps
                    .clone()
                    .map(|i| {
                        params.d0() * grid.step_size(i) / (1.0 + params.b() * params.d0() * t[i])
                    })
                    .collect(),
                sqrt_dt: steps.map(|i| grid.step_size(i).sqrt()).collect(),
            },
        }
    }

    pub(crate) fn initial_state(&self) -> f64 {
        match self {
            Stepper::ConstExact { q0, .. } | Stepper::Euler { q0, .. } => *q0,
            Stepper::LinearExact { .. } => 0.0,
        }
    }

    /// Advances the state from grid point `i` to `i + 1` with normal draw `z`.
    #[inline]
    pub(crate) fn advance(&self, i: usize, state: f64, z: f64) -> f64 {
        match self {
            Stepper::ConstExact { increment_sd, .. } => state + increment_sd[i] * z,
            Stepper::LinearExact { increment_sd, .. } => state + increment_sd[i] * z,
            Stepper::Euler {
                sigma,
                model,
                drift,
                sqrt_dt,
                ..
            } => state - drift[i] * state + model.volatility(*sigma, state) * sqrt_dt[i] * z,
        }
    }

    /// Production rate at grid point `i` for the given state.
    #[inline]
    pub(crate) fn value(&self, i: usize, state: f64) -> f64 {
        match self {
            Stepper::ConstExact { decay, .. } => decay[i] * state,
            Stepper::LinearExact {
                sigma,
                rate,
                compensator,
                ..
            } => rate[i] * (sigma * state + compensator[i]).exp(),
            Stepper::Euler { .. } => state,
        }
    }
}

/// Simulates one path driven by the stream addressed by `noise`.
///
/// Reusing the same `noise` across parameter sets gives common random
/// numbers: step `i` always consumes the `i`-th draw of the stream.
pub fn simulate_path(
    params: &ArpsParams,
    model: ModelKind,
    scheme: Scheme,
    grid: &TimeGrid,
    noise: NoiseSpec,
) -> Result<Path> {
    simulate_path_with_noise(params, model, scheme, grid, noise.normals())
}

/// Same as [`simulate_path`] with caller-supplied standard normal draws.
pub fn simulate_path_with_noise<I: IntoIterator<Item = f64>>(
    params: &ArpsParams,
    model: ModelKind,
    scheme: Scheme,
    grid: &TimeGrid,
    normals: I,
) -> Result<Path> {
    let stepper = Stepper::new(params, model, scheme, grid);
    let mut values = Vec::with_capacity(grid.len());
    fill_path(&stepper, normals, &mut values, grid.len());
    Path::new(grid.clone(), values)
}

pub(crate) fn fill_path<I: IntoIterator<Item = f64>>(
    stepper: &Stepper,
    normals: I,
    out: &mut Vec<f64>,
    len: usize,
) {
    let mut state = stepper.initial_state();
    out.push(stepper.value(0, state));
    for (i, z) in normals.into_iter().take(len - 1).enumerate() {
        state = stepper.advance(i, state, z);
        out.push(stepper.value(i + 1, state));
    }
}
