use rayon::prelude::*;

use super::check_mc_args;
use super::estimate::{FptConfig, FptEstimate, FptMethod};
use crate::decline::{ArpsParams, ModelKind};
use crate::error::Result;
use crate::sim::{NoiseSpec, Scheme, Stepper, TimeGrid};

/// Settings of a direct Monte Carlo hitting-time run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub x: f64,
    pub horizon: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub bridge: bool,
    pub scheme: Scheme,
}

/// Direct Monte Carlo estimate of the hitting time of `x`, stepping the
/// closed-form solution on a uniform grid.
///
/// A path is recorded as hitting at `t_{i+1}` when `Q_{i+1} <= x`. With
/// `bridge` on, a step whose endpoints both lie above `x` still counts as a
/// hit with the Brownian-bridge crossing probability for that step, which
/// removes the `O(sqrt(dt))` bias of watching the path only at grid points.
#[allow(clippy::too_many_arguments)]
pub fn fpt_mc(
    params: &ArpsParams,
    model: ModelKind,
    x: f64,
    horizon: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
    bridge: bool,
) -> Result<FptEstimate> {
    fpt_mc_with(
        params,
        model,
        &McSettings {
            x,
            horizon,
            dt,
            n_paths,
            seed,
            bridge,
            scheme: Scheme::Exact,
        },
    )
}

/// [`fpt_mc`] with an explicit stepping scheme.
pub fn fpt_mc_with(params: &ArpsParams, model: ModelKind, s: &McSettings) -> Result<FptEstimate> {
    let config = FptConfig {
        params: *params,
        model,
        method: FptMethod::Direct,
        scheme: s.scheme,
        x: s.x,
        horizon: s.horizon,
        dt: s.dt,
        n_paths: s.n_paths,
        seed: s.seed,
        bridge: s.bridge,
    };
    if check_mc_args(params, s.x, s.horizon, s.dt, s.n_paths)? {
        return FptEstimate::from_samples(config, vec![(0.0, false); s.n_paths]);
    }
    let grid = TimeGrid::uniform(s.dt, s.horizon)?;
    let stepper = Stepper::new(params, model, s.scheme, &grid);
    let crossing = Crossing::new(&stepper, s.x);
    let hits = (0..s.n_paths)
        .into_par_iter()
        .map(|p| {
            first_passage(
                &stepper,
                &crossing,
                &grid,
                s.x,
                NoiseSpec::new(s.seed, p as u64),
                s.bridge,
            )
        })
        .collect();
    FptEstimate::from_samples(config, hits)
}

/// Per-step inverse of the bridge variance, `2 / var_i`, in whichever
/// coordinates the crossing test is carried out.
enum Crossing {
    /// Rate coordinates with the exact conditional variance of the step.
    Rate { x: f64, inv_var: Vec<f64> },
    /// Log-rate coordinates: exact for the linear boundary at `b = 0`.
    LogRate { ln_x: f64, inv_var: Vec<f64> },
    /// Rate coordinates with the volatility frozen at the left endpoint.
    Frozen {
        x: f64,
        model: ModelKind,
        sigma: f64,
        inv_dt: Vec<f64>,
    },
}

impl Crossing {
    fn new(stepper: &Stepper, x: f64) -> Self {
        match stepper {
            Stepper::ConstExact {
                decay, increment_sd, ..
            } => Crossing::Rate {
                x,
                // In X = Q / g coordinates the step is a Brownian increment
                // and the level becomes x / g, so the crossing exponent is
                // 2 (Q_i - x)(Q_{i+1} - x) / (g_i g_{i+1} sd_i^2).
                inv_var: increment_sd
                    .iter()
                    .enumerate()
                    .map(|(i, sd)| 2.0 / (decay[i] * decay[i + 1] * sd * sd))
                    .collect(),
            },
            Stepper::LinearExact {
                sigma, increment_sd, ..
            } => Crossing::LogRate {
                ln_x: x.ln(),
                inv_var: increment_sd
                    .iter()
                    .map(|sd| 2.0 / (sigma * sigma * sd * sd))
                    .collect(),
            },
            Stepper::Euler {
                sigma,
                model,
                sqrt_dt,
                ..
            } => Crossing::Frozen {
                x,
                model: *model,
                sigma: *sigma,
                inv_dt: sqrt_dt.iter().map(|s| 2.0 / (s * s)).collect(),
            },
        }
    }

    /// Probability that the bridge from `q` to `q_next` dips to the level
    /// during step `i`, given both endpoints lie above it.
    #[inline]
    fn probability(&self, i: usize, q: f64, q_next: f64) -> f64 {
        let exponent = match self {
            Crossing::Rate { x, inv_var } => (q - x) * (q_next - x) * inv_var[i],
            Crossing::LogRate { ln_x, inv_var } => (q.ln() - ln_x) * (q_next.ln() - ln_x) * inv_var[i],
            Crossing::Frozen {
                x,
                model,
                sigma,
                inv_dt,
            } => {
                let a = model.volatility(*sigma, q);
                (q - x) * (q_next - x) * inv_dt[i] / (a * a)
            }
        };
        // exp underflows to zero well before this; skipping saves the draw.
        if exponent > 745.0 || exponent.is_nan() {
            0.0
        } else {
            (-exponent).exp()
        }
    }
}

fn first_passage(
    stepper: &Stepper,
    crossing: &Crossing,
    grid: &TimeGrid,
    x: f64,
    noise: NoiseSpec,
    bridge: bool,
) -> (f64, bool) {
    let t = grid.points();
    let mut normals = noise.normals();
    let mut uniforms = noise.uniforms();
    let mut state = stepper.initial_state();
    let mut q = stepper.value(0, state);
    for i in 0..grid.steps() {
        state = stepper.advance(i, state, normals.draw());
        let q_next = stepper.value(i + 1, state);
        if q_next <= x {
            return (t[i + 1], false);
        }
        if bridge {
            let p = crossing.probability(i, q, q_next);
            if p > 0.0 && uniforms.at(i as u64) < p {
                return (t[i + 1], false);
            }
        }
        q = q_next;
    }
    (grid.horizon(), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn level_at_or_above_start_is_hit_immediately() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.5, 1.0).unwrap();
        for x in [380.0, 500.0] {
            let est = fpt_mc(&p, ModelKind::ConstantVol, x, 100.0, 1.0, 5, 1, true).unwrap();
            assert!(est.samples.iter().all(|&t| t == 0.0));
            assert_eq!(est.n_censored, 0);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.5, 1.0).unwrap();
        assert!(fpt_mc(&p, ModelKind::ConstantVol, 100.0, 100.0, 0.0, 5, 1, true).is_err());
        assert!(fpt_mc(&p, ModelKind::ConstantVol, 100.0, -1.0, 1.0, 5, 1, true).is_err());
        assert!(fpt_mc(&p, ModelKind::ConstantVol, 0.0, 100.0, 1.0, 5, 1, true).is_err());
        assert!(fpt_mc(&p, ModelKind::ConstantVol, 100.0, 100.0, 1.0, 0, 1, true).is_err());
    }

    #[test]
    fn noiseless_exponential_decline_hits_deterministically() {
        // ln(380 / 100) / 3e-4 = 4450.0
        let p = ArpsParams::new(380.0, 3e-4, 0.0, 1e-9).unwrap();
        let est = fpt_mc(&p, ModelKind::ConstantVol, 100.0, 6000.0, 0.5, 20, 3, true).unwrap();
        for t in &est.samples {
            assert_relative_eq!(*t, 4450.0, epsilon = 0.5);
        }
    }

    #[test]
    fn censored_when_horizon_is_short() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.0, 0.01).unwrap();
        let est = fpt_mc(&p, ModelKind::LinearVol, 100.0, 5.0, 0.5, 50, 3, true).unwrap();
        assert!(est.n_censored > 40);
        assert!(est.samples.iter().all(|&t| t <= 5.0));
    }

    #[test]
    fn deterministic_across_runs() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.3, 1.0).unwrap();
        let run = || fpt_mc(&p, ModelKind::ConstantVol, 100.0, 20000.0, 5.0, 64, 8, true).unwrap();
        assert_eq!(run().samples, run().samples);
    }
}
