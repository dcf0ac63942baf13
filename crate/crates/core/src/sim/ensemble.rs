use rayon::prelude::*;
use serde::Serialize;

use super::grid::{Path, TimeGrid};
use super::noise::NoiseSpec;
use super::scheme::{fill_path, Scheme, Stepper};
use crate::decline::{ArpsParams, ModelKind};
use crate::error::{Error, Result};

/// Many paths on one grid, stored row-major (`path * grid.len() + step`).
#[derive(Debug, Clone, Serialize)]
pub struct PathEnsemble {
    pub params: ArpsParams,
    pub model: ModelKind,
    pub scheme: Scheme,
    pub seed: u64,
    pub n_paths: usize,
    pub grid: TimeGrid,
    #[serde(skip)]
    values: Vec<f64>,
    /// Sample mean at each grid time.
    pub mean: Vec<f64>,
    /// Unbiased sample variance at each grid time.
    pub variance: Vec<f64>,
    /// Paths that dropped below zero somewhere. Euler-Maruyama paths are not
    /// reflected, so for the linear-volatility model this is a diagnostic of
    /// a step that is too coarse.
    pub paths_below_zero: usize,
}

impl PathEnsemble {
    pub fn path(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn to_path(&self, i: usize) -> Path {
        Path {
            grid: self.grid.clone(),
            values: self.path(i).to_vec(),
        }
    }

    /// Values of every path at grid index `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().skip(j).step_by(self.grid.len()).copied().collect()
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.grid.len())
    }
}

/// Simulates `n_paths` paths; path `p` is driven by stream `p` of `seed`,
/// so results do not depend on the number of worker threads.
pub fn simulate_ensemble(
    params: &ArpsParams,
    model: ModelKind,
    scheme: Scheme,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    if n_paths == 0 {
        return Err(Error::param("paths", 0.0, "must be positive"));
    }
    let len = grid.len();
    let total = n_paths
        .checked_mul(len)
        .ok_or_else(|| Error::ResourceExhausted(format!("{n_paths} paths x {len} steps")))?;
    let mut values: Vec<f64> = Vec::new();
    values
        .try_reserve_exact(total)
        .map_err(|_| Error::ResourceExhausted(format!("{total} path values")))?;
    values.resize(total, 0.0);

    let stepper = Stepper::new(params, model, scheme, grid);
    values.par_chunks_mut(len).enumerate().for_each_init(
        || Vec::with_capacity(len),
        |buf, (p, row)| {
            buf.clear();
            fill_path(&stepper, NoiseSpec::new(seed, p as u64).normals(), buf, len);
            row.copy_from_slice(buf);
        },
    );

    let n = n_paths as f64;
    let mut mean = vec![0.0; len];
    for row in values.chunks_exact(len) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut variance = vec![0.0; len];
    if n_paths > 1 {
        for row in values.chunks_exact(len) {
            for ((s, v), m) in variance.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        variance.iter_mut().for_each(|s| *s /= n - 1.0);
    }

    let paths_below_zero = values
        .chunks_exact(len)
        .filter(|row| row.iter().any(|&v| v < 0.0))
        .count();

    Ok(PathEnsemble {
        params: *params,
        model,
        scheme,
        seed,
        n_paths,
        grid: grid.clone(),
        values,
        mean,
        variance,
        paths_below_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::simulate_path;

    #[test]
    fn ensemble_rows_match_single_paths() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.5, 1.0).unwrap();
        let grid = TimeGrid::uniform(25.0, 500.0).unwrap();
        let ens = simulate_ensemble(&p, ModelKind::ConstantVol, Scheme::Exact, &grid, 8, 42).unwrap();
        for i in 0..8 {
            let single =
                simulate_path(&p, ModelKind::ConstantVol, Scheme::Exact, &grid, NoiseSpec::new(42, i as u64))
                    .unwrap();
            assert_eq!(ens.path(i), single.values.as_slice());
        }
        let col = ens.column(3);
        assert_eq!(col.len(), 8);
        assert_eq!(col[5], ens.path(5)[3]);
        assert_eq!(ens.variance[0], 0.0);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let p = ArpsParams::with_sigma2(380.0, 3e-4, 0.0, 0.01).unwrap();
        let grid = TimeGrid::uniform(10.0, 300.0).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_ensemble(&p, ModelKind::LinearVol, Scheme::EulerMaruyama, &grid, 64, 9))
                .unwrap()
        };
        let a = run(1);
        let b = run(3);
        assert!(a.paths().eq(b.paths()));
        assert_eq!(a.mean, b.mean);
    }

    #[test]
    fn zero_paths_rejected() {
        let p = ArpsParams::new(1.0, 1.0, 0.0, 0.1).unwrap();
        let grid = TimeGrid::uniform(1.0, 2.0).unwrap();
        assert!(simulate_ensemble(&p, ModelKind::LinearVol, Scheme::Exact, &grid, 0, 1).is_err());
    }
}
