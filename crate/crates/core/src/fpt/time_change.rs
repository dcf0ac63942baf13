use rayon::prelude::*;

use super::check_mc_args;
use super::estimate::{FptConfig, FptEstimate, FptMethod};
use crate::decline::{c1_unchecked, ArpsParams, ModelKind};
use crate::error::{Error, Result};
use crate::sim::{NoiseSpec, Scheme};

/// Boundary values beyond this many steps are computed on the fly.
const BOUNDARY_TABLE_CAP: usize = 1 << 20;

/// Hitting time of the constant-volatility model through the time change.
///
/// With `X_t = q0 + sigma W_{tau(t)}`, the rate reaches `x` exactly when the
/// Brownian motion `W` falls to `c1(r)` in the `tau` clock. `W` is stepped on
/// a uniform `tau` grid of spacing `dtau` up to `tau(horizon)`, crossings
/// between grid points are caught with the Brownian-bridge probability for
/// the chord of `c1`, and each hit is mapped back with `tau^-1`.
pub fn fpt_time_change_model1(
    params: &ArpsParams,
    x: f64,
    horizon: f64,
    dtau: f64,
    n_paths: usize,
    seed: u64,
) -> Result<FptEstimate> {
    let config = FptConfig {
        params: *params,
        model: ModelKind::ConstantVol,
        method: FptMethod::TimeChange,
        scheme: Scheme::Exact,
        x,
        horizon,
        dt: dtau,
        n_paths,
        seed,
        bridge: true,
    };
    if check_mc_args(params, x, horizon, dtau, n_paths)? {
        return FptEstimate::from_samples(config, vec![(0.0, false); n_paths]);
    }
    if params.sigma() == 0.0 {
        return Err(Error::param("sigma", 0.0, "time change needs sigma > 0"));
    }
    let clock = TauClock::new(params, x, horizon, dtau)?;
    let hits = (0..n_paths)
        .into_par_iter()
        .map(|p| clock.first_passage(NoiseSpec::new(seed, p as u64)))
        .collect();
    FptEstimate::from_samples(config, hits)
}

struct TauClock {
    params: ArpsParams,
    x: f64,
    horizon: f64,
    dtau: f64,
    r_max: f64,
    steps: usize,
    boundary: Vec<f64>,
}

impl TauClock {
    fn new(params: &ArpsParams, x: f64, horizon: f64, dtau: f64) -> Result<Self> {
        let r_max = params.tau(horizon);
        let steps_f = (r_max / dtau).ceil();
        if !(steps_f.is_finite() && steps_f < usize::MAX as f64 / 2.0) {
            return Err(Error::ResourceExhausted(format!(
                "{steps_f} steps in the tau clock"
            )));
        }
        let steps = (steps_f as usize).max(1);
        let mut clock = Self {
            params: *params,
            x,
            horizon,
            dtau,
            r_max,
            steps,
            boundary: Vec::new(),
        };
        let table = (steps + 1).min(BOUNDARY_TABLE_CAP);
        clock.boundary = (0..table).map(|i| clock.c1(clock.r(i))).collect();
        Ok(clock)
    }

    #[inline]
    fn r(&self, i: usize) -> f64 {
        if i >= self.steps {
            self.r_max
        } else {
            i as f64 * self.dtau
        }
    }

    #[inline]
    fn c1(&self, r: f64) -> f64 {
        c1_unchecked(&self.params, self.x, r)
    }

    #[inline]
    fn boundary_at(&self, i: usize) -> f64 {
        match self.boundary.get(i) {
            Some(&c) => c,
            None => self.c1(self.r(i)),
        }
    }

    fn first_passage(&self, noise: NoiseSpec) -> (f64, bool) {
        let mut normals = noise.normals();
        let mut uniforms = noise.uniforms();
        let mut w = 0.0;
        let mut gap = -self.boundary_at(0);
        for i in 0..self.steps {
            let dr = self.r(i + 1) - self.r(i);
            w += dr.sqrt() * normals.draw();
            let next_gap = w - self.boundary_at(i + 1);
            let hit = next_gap <= 0.0 || {
                let exponent = 2.0 * gap * next_gap / dr;
                exponent <= 745.0 && uniforms.at(i as u64) < (-exponent).exp()
            };
            if hit {
                let t = self.params.tau_inv(self.r(i + 1)).min(self.horizon);
                return (t, false);
            }
            gap = next_gap;
        }
        (self.horizon, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decline::boundary_c1;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_boundary_is_square_root() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.0, 1.0).unwrap();
        for r in [0.0f64, 10.0, 1e4, 1e6] {
            let expected = 100.0 * (1.0f64 + 2.0 * 3e-4 * r).sqrt() - 380.0;
            assert_relative_eq!(boundary_c1(&p, 100.0, r).unwrap(), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn hits_map_inside_the_horizon() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.5, 1.0).unwrap();
        let est = fpt_time_change_model1(&p, 100.0, 3000.0, 50.0, 200, 4).unwrap();
        assert!(est.samples.iter().all(|&t| (0.0..=3000.0).contains(&t)));
        assert!(est.n_censored < 200);
        let all_hit = fpt_time_change_model1(&p, 400.0, 3000.0, 50.0, 3, 4).unwrap();
        assert!(all_hit.samples.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn needs_volatility() {
        let p = ArpsParams::new(380.0, 3e-4, 0.5, 0.0).unwrap();
        assert!(fpt_time_change_model1(&p, 100.0, 3000.0, 50.0, 3, 4).is_err());
    }
}
