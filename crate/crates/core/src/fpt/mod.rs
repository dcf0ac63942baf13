//! First-passage times `T = inf{t : Q_t <= x}` of the production rate.

mod bounds;
mod durbin;
mod estimate;
mod mc;
mod order;
mod time_change;

pub use bounds::{fpt_ig_model2_b0, mean_fpt_bounds, MeanFptBounds};
pub use durbin::{durbin_density, durbin_value, DensityCurve, DurbinForm};
pub use estimate::{FptConfig, FptEstimate, FptMethod, QuantileEstimate, REPORTED_QUANTILES};
pub use mc::{fpt_mc, fpt_mc_with, McSettings};
pub use order::{stochastic_order_check, stochastic_order_check_with, OrderTest, OrderingReport};
pub use time_change::fpt_time_change_model1;

use crate::decline::ArpsParams;
use crate::error::{Error, Result};

/// Shared argument checks for the simulation estimators. Returns `true` when
/// the level is already reached at `t = 0`.
fn check_mc_args(params: &ArpsParams, x: f64, horizon: f64, dt: f64, n_paths: usize) -> Result<bool> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::param("x", x, "level must be positive and finite"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", horizon, "must be positive and finite"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", dt, "must be positive and finite"));
    }
    if n_paths == 0 {
        return Err(Error::param("paths", 0.0, "must be positive"));
    }
    Ok(x >= params.q0())
}
