//! Reproducible path simulation.

mod ensemble;
mod grid;
mod noise;
mod scheme;

pub use ensemble::{simulate_ensemble, PathEnsemble};
pub use grid::{cumulative_path, Path, TimeGrid};
pub use noise::{gaussian_increments, NoiseSpec, NormalStream, UniformStream};
pub use scheme::{simulate_path, simulate_path_with_noise, Scheme};

pub(crate) use scheme::Stepper;
