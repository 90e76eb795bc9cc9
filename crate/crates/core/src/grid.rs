use serde::Serialize;

use crate::error::{invalid, Result};

/// Uniform grid `x_i = a + i h`, `i = 0..=cells`, on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    /// Number of cells `M`; the grid has `M - 1` interior nodes.
    pub cells: usize,
    pub h: f64,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(invalid(format!("grid needs finite a < b, got [{a}, {b}]")));
        }
        if cells < 4 {
            return Err(invalid(format!("grid needs at least 4 cells, got {cells}")));
        }
        Ok(Self {
            a,
            b,
            cells,
            h: (b - a) / cells as f64,
        })
    }

    /// Grid on `[a, b]` whose spacing is the given `h`, rounded to a whole
    /// number of cells.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(invalid(format!("grid spacing must be positive, got {h}")));
        }
        let cells = ((b - a) / h).round();
        if !(cells >= 1.0) {
            return Err(invalid(format!("spacing {h} too coarse for [{a}, {b}]")));
        }
        Self::new(a, b, cells as usize)
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.cells {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.node(i)).collect()
    }

    pub fn interior_len(&self) -> usize {
        self.cells - 1
    }
}

/// Uniform time levels `t_n = n tau`, `n = 0..=steps`, on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub horizon: f64,
    pub steps: usize,
    pub tau: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("time horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(invalid("time grid needs at least one step"));
        }
        Ok(Self {
            horizon,
            steps,
            tau: horizon / steps as f64,
        })
    }

    /// Smallest step count whose step does not exceed `target_tau`.
    pub fn with_max_step(horizon: f64, target_tau: f64) -> Result<Self> {
        if !(target_tau > 0.0) {
            return Err(invalid(format!("time step must be positive, got {target_tau}")));
        }
        let steps = (horizon / target_tau - 1e-9).ceil().max(1.0);
        Self::new(horizon, steps as usize)
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.steps {
            self.horizon
        } else {
            n as f64 * self.tau
        }
    }
}
