use serde::Serialize;

use crate::error::{invalid, Result};

/// Which endpoint a one-sided operator integrates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    /// Integrates over `[a, x]`; couples each node to its left neighbours.
    Left,
    /// Integrates over `[x, b]`; couples each node to its right neighbours.
    Right,
}

impl Side {
    pub fn mirror(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Fractional order, tempering rate and diffusivity of a tempered operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperedParams {
    pub alpha: f64,
    pub lambda: f64,
    pub diffusivity: f64,
}

impl TemperedParams {
    /// Requires `1 < alpha < 2`, `lambda >= 0` and `diffusivity >= 0`.
    pub fn new(alpha: f64, lambda: f64, diffusivity: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(invalid(format!("alpha must lie in (1, 2), got {alpha}")));
        }
        Self::check_rest(lambda, diffusivity)?;
        Ok(Self {
            alpha,
            lambda,
            diffusivity,
        })
    }

    /// Like [`TemperedParams::new`] but also accepts the closed endpoints
    /// `alpha = 1` and `alpha = 2`, where the coefficient formulas stay valid.
    /// Solvers and operator assembly reject such parameters.
    pub fn with_closed_order(alpha: f64, lambda: f64, diffusivity: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&alpha) {
            return Err(invalid(format!("alpha must lie in [1, 2], got {alpha}")));
        }
        Self::check_rest(lambda, diffusivity)?;
        Ok(Self {
            alpha,
            lambda,
            diffusivity,
        })
    }

    fn check_rest(lambda: f64, diffusivity: f64) -> Result<()> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        if !(diffusivity >= 0.0 && diffusivity.is_finite()) {
            return Err(invalid(format!(
                "diffusivity must be finite and >= 0, got {diffusivity}"
            )));
        }
        Ok(())
    }

    pub fn has_open_order(&self) -> bool {
        self.alpha > 1.0 && self.alpha < 2.0
    }

    pub(crate) fn ensure_open_order(&self) -> Result<()> {
        if self.has_open_order() {
            Ok(())
        } else {
            Err(invalid(format!(
                "alpha must lie strictly inside (1, 2) for assembly, got {}",
                self.alpha
            )))
        }
    }
}
