use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Strictly increasing simulation times starting at 0. Cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Arc<[f64]>,
}

impl Serialize for TimeGrid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        match points.first() {
            Some(&0.0) => {}
            _ => return Err(Error::InvalidGrid("grid must start at t = 0".into())),
        }
        if let Some(bad) = points.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite time {bad}")));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "times must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self {
            points: points.into(),
        })
    }

    /// `0, dt, 2 dt, ...` up to `horizon`; a shorter last step is appended
    /// when `horizon` is not a multiple of `dt`.
    pub fn uniform(dt: f64, horizon: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", dt, "must be positive and finite"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param("horizon", horizon, "must be positive and finite"));
        }
        let ratio = horizon / dt;
        let full = (ratio * (1.0 + 1e-12)).floor() as usize;
        let mut points: Vec<f64> = (0..=full).map(|i| i as f64 * dt).collect();
        let last = points.last_mut().expect("grid holds t = 0");
        if horizon - *last > 1e-9 * dt {
            points.push(horizon);
        } else {
            *last = horizon;
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().expect("grid is nonempty")
    }

    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn step_size(&self, i: usize) -> f64 {
        self.points[i + 1] - self.points[i]
    }
}

/// One sampled trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl Path {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }
}

/// Running trapezoidal integral `int_0^t Q_u du` on the path's grid.
pub fn cumulative_path(path: &Path) -> Path {
    let t = path.grid.points();
    let mut acc = 0.0;
    let mut values = Vec::with_capacity(path.values.len());
    values.push(0.0);
    for (i, w) in path.values.windows(2).enumerate() {
        acc += 0.5 * (w[0] + w[1]) * (t[i + 1] - t[i]);
        values.push(acc);
    }
    Path {
        grid: path.grid.clone(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![1.0, 2.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(TimeGrid::uniform(0.0, 1.0).is_err());
        assert!(TimeGrid::uniform(1.0, -1.0).is_err());
    }

    #[test]
    fn uniform_grid() {
        let g = TimeGrid::uniform(0.1, 1.0).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.horizon(), 1.0);
        let g = TimeGrid::uniform(1.0, 2.5).unwrap();
        assert_eq!(g.points(), &[0.0, 1.0, 2.0, 2.5]);
        let g = TimeGrid::uniform(1.0, 10_000.0).unwrap();
        assert_eq!(g.len(), 10_001);
        assert_eq!(g.points()[5000], 5000.0);
    }

    #[test]
    fn cumulative_of_constant_is_exact() {
        let g = TimeGrid::uniform(0.25, 10.0).unwrap();
        let p = Path::new(g.clone(), vec![3.0; g.len()]).unwrap();
        let c = cumulative_path(&p);
        assert_eq!(c.values[0], 0.0);
        assert_eq!(*c.values.last().unwrap(), 30.0);
        assert!(Path::new(g, vec![1.0]).is_err());
    }
}
