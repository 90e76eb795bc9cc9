//! Matrix assembly for the quasi-compact schemes on uniform grids.
//!
//! Interior unknowns are `U_1, ..., U_{M-1}`. The left-sided scheme reads
//!
//! ```text
//! (B - P) U^{n+1} = B U^n + tau B F^{n+1} + H^{n+1}
//! ```
//!
//! and the right-sided one uses `B^T`, `P^T` and the reversed boundary vector
//! of the mirrored problem.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::calculus::{tempered_weights, WeightTable};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::linalg::Tridiagonal;
use crate::params::{Side, TemperedParams};

/// Tridiagonal compact operator `(e^{-lambda h}/6, 2/3, e^{lambda h}/6)` for the
/// left side; the right side is its transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactMatrixB {
    pub side: Side,
    pub lambda_h: f64,
    pub bands: Tridiagonal,
}

impl CompactMatrixB {
    pub fn dim(&self) -> usize {
        self.bands.dim()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.bands.to_dense()
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        self.bands.mul_vec(v)
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        self.bands.solve(rhs)
    }

    pub fn sub(&self) -> f64 {
        self.bands.sub.first().copied().unwrap_or(0.0)
    }

    pub fn diag(&self) -> f64 {
        self.bands.diag[0]
    }

    pub fn sup(&self) -> f64 {
        self.bands.sup.first().copied().unwrap_or(0.0)
    }
}

/// Stencil weights `(west, centre, east)` of the compact operator.
pub fn compact_stencil(side: Side, lambda: f64, h: f64) -> (f64, f64, f64) {
    let lh = lambda * h;
    match side {
        Side::Left => ((-lh).exp() / 6.0, 2.0 / 3.0, lh.exp() / 6.0),
        Side::Right => (lh.exp() / 6.0, 2.0 / 3.0, (-lh).exp() / 6.0),
    }
}

pub fn assemble_b(side: Side, grid: &Grid1D, lambda: f64) -> CompactMatrixB {
    let (west, centre, east) = compact_stencil(side, lambda, grid.h);
    CompactMatrixB {
        side,
        lambda_h: lambda * grid.h,
        bands: Tridiagonal::toeplitz(grid.interior_len(), west, centre, east),
    }
}

/// Compact operator acting on all `M + 1` nodal values and returning the
/// `M - 1` interior results, as an `(M - 1) x (M + 1)` matrix. Used for data
/// such as source terms that are known on the boundary too.
pub fn compact_extended(side: Side, grid: &Grid1D, lambda: f64) -> DMatrix<f64> {
    let (west, centre, east) = compact_stencil(side, lambda, grid.h);
    let n = grid.interior_len();
    let mut m = DMatrix::zeros(n, n + 2);
    for i in 0..n {
        m[(i, i)] = west;
        m[(i, i + 1)] = centre;
        m[(i, i + 2)] = east;
    }
    m
}

/// Dense spatial matrix `P = K s (A - alpha lambda^{alpha-1} C + lambda^alpha (alpha-1) B)`,
/// where `s` is the time step when it is folded in and `1` otherwise.
#[derive(Debug, Clone)]
pub struct SystemMatrixP {
    pub side: Side,
    pub params: TemperedParams,
    pub grid: Grid1D,
    /// `Some(tau)` when the time step is folded into the matrix.
    pub tau: Option<f64>,
    pub matrix: DMatrix<f64>,
}

impl SystemMatrixP {
    /// `K tau` (or `K` when no time step is folded in).
    pub fn scale(&self) -> f64 {
        self.params.diffusivity * self.tau.unwrap_or(1.0)
    }

    /// `P / (K tau)`, the discrete operator itself.
    pub fn unscaled(&self) -> DMatrix<f64> {
        unscaled_operator(self.side, &self.params, &self.grid)
            .expect("parameters were validated at assembly")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// The discrete operator `_L D~_h^{alpha,lambda}` (or its right counterpart)
/// restricted to interior nodes with homogeneous boundary values.
pub fn unscaled_operator(side: Side, params: &TemperedParams, grid: &Grid1D) -> Result<DMatrix<f64>> {
    params.ensure_open_order()?;
    let n = grid.interior_len();
    let h = grid.h;
    let weights = tempered_weights(params, h, grid.cells.max(2))?;
    let (alpha, lambda) = (params.alpha, params.lambda);
    let lh = lambda * h;
    let frac = h.powf(-alpha);
    let drift = alpha * lambda.powf(alpha - 1.0) / (2.0 * h);
    let zeroth = lambda.powf(alpha) * (alpha - 1.0);
    let (west, centre, east) = compact_stencil(Side::Left, lambda, h);

    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=(i + 1).min(n - 1) {
            // Row i couples to U_{i-k+1} through w_k.
            let k = i + 1 - j;
            m[(i, j)] = frac * weights.get(k);
        }
        m[(i, i)] += zeroth * centre;
        if i + 1 < n {
            m[(i, i + 1)] += -drift * lh.exp() + zeroth * east;
        }
        if i > 0 {
            m[(i, i - 1)] += drift * (-lh).exp() + zeroth * west;
        }
    }
    Ok(match side {
        Side::Left => m,
        Side::Right => m.transpose(),
    })
}

fn warn_if_unstable(params: &TemperedParams, grid: &Grid1D) {
    let lh = params.lambda * grid.h;
    if lh > 1.0 {
        log::warn!(
            "lambda h = {lh} exceeds 1; the scheme is outside its proven stability range"
        );
    }
}

/// `P` with the time step folded in, as used by the implicit Euler schemes.
pub fn assemble_p(side: Side, params: &TemperedParams, grid: &Grid1D, tau: f64) -> Result<SystemMatrixP> {
    if !(tau > 0.0) {
        return Err(invalid(format!("time step must be positive, got {tau}")));
    }
    warn_if_unstable(params, grid);
    let matrix = unscaled_operator(side, params, grid)? * (params.diffusivity * tau);
    Ok(SystemMatrixP {
        side,
        params: *params,
        grid: *grid,
        tau: Some(tau),
        matrix,
    })
}

/// `P` without the time step, for schemes that apply `tau` themselves
/// (operator splitting and ADI).
pub fn assemble_operator(side: Side, params: &TemperedParams, grid: &Grid1D) -> Result<SystemMatrixP> {
    warn_if_unstable(params, grid);
    let matrix = unscaled_operator(side, params, grid)? * params.diffusivity;
    Ok(SystemMatrixP {
        side,
        params: *params,
        grid: *grid,
        tau: None,
        matrix,
    })
}

/// Boundary data entering one time step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundaryStep {
    /// `U_0^n` and `U_0^{n+1}`.
    pub left_now: f64,
    pub left_next: f64,
    /// `U_M^n` and `U_M^{n+1}`.
    pub right_now: f64,
    pub right_next: f64,
    /// `f_0^{n+1}` and `f_M^{n+1}`.
    pub source_left: f64,
    pub source_right: f64,
}

impl BoundaryStep {
    /// The same data seen from the reflected grid.
    pub fn mirrored(&self) -> Self {
        Self {
            left_now: self.right_now,
            left_next: self.right_next,
            right_now: self.left_now,
            right_next: self.left_next,
            source_left: self.source_right,
            source_right: self.source_left,
        }
    }
}

/// Per-step boundary contribution moved to the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVectorH {
    pub side: Side,
    pub values: DVector<f64>,
}

/// Collects every term of the scheme that involves `U_0` or `U_M`.
///
/// Requires `weights` to hold `w_0, ..., w_M` for the grid's `(alpha, lambda, h)`.
pub fn assemble_h(
    side: Side,
    params: &TemperedParams,
    grid: &Grid1D,
    tau: f64,
    data: &BoundaryStep,
    weights: &WeightTable,
) -> Result<BoundaryVectorH> {
    let m = grid.cells;
    if weights.len() < m + 1 {
        return Err(Error::ShortWeightTable {
            needed: m + 1,
            have: weights.len(),
        });
    }
    if (weights.h - grid.h).abs() > 1e-14 * grid.h
        || weights.params.alpha != params.alpha
        || weights.params.lambda != params.lambda
    {
        return Err(invalid("weight table does not match the grid parameters"));
    }
    let left_data = match side {
        Side::Left => *data,
        Side::Right => data.mirrored(),
    };
    let mut values = left_boundary_vector(params, grid, tau, &left_data, weights);
    if side == Side::Right {
        values = DVector::from_iterator(values.len(), values.iter().rev().copied());
    }
    Ok(BoundaryVectorH { side, values })
}

fn left_boundary_vector(
    params: &TemperedParams,
    grid: &Grid1D,
    tau: f64,
    data: &BoundaryStep,
    weights: &WeightTable,
) -> DVector<f64> {
    let n = grid.interior_len();
    let h = grid.h;
    let (alpha, lambda) = (params.alpha, params.lambda);
    let k_tau = params.diffusivity * tau;
    let frac = h.powf(-alpha);
    let drift = alpha * lambda.powf(alpha - 1.0) / (2.0 * h);
    let zeroth = lambda.powf(alpha) * (alpha - 1.0);
    let (west, _, east) = compact_stencil(Side::Left, lambda, h);
    let lh = lambda * h;

    let mut hv = DVector::zeros(n);
    // Column of U_0: weight w_{i+1} for row i (1-based), plus the first row's
    // compact and drift neighbours.
    for i in 0..n {
        hv[i] += k_tau * frac * weights.get(i + 2) * data.left_next;
    }
    hv[0] += west * (data.left_now - data.left_next + tau * data.source_left)
        + k_tau * (drift * (-lh).exp() + zeroth * west) * data.left_next;
    // U_M only touches the last row.
    hv[n - 1] += east * (data.right_now - data.right_next + tau * data.source_right)
        + k_tau * (frac * weights.get(0) - drift * lh.exp() + zeroth * east) * data.right_next;
    hv
}

/// Pointwise compact operator on interior nodes; `v` carries one ghost value at
/// each end, so the output is two entries shorter.
pub fn apply_compact(side: Side, lambda: f64, h: f64, v: &[f64]) -> Vec<f64> {
    let (west, centre, east) = compact_stencil(side, lambda, h);
    v.windows(3)
        .map(|w| west * w[0] + centre * w[1] + east * w[2])
        .collect()
}

/// Pointwise quasi-compact approximation of the normalized tempered derivative
/// at interior nodes `1..M`, given nodal values `v_0..v_M`.
///
/// Left side:
///
/// ```text
/// h^{-alpha} sum_{k=0}^{i+1} w_k v_{i-k+1}
///   - alpha lambda^{alpha-1} / (2h) (e^{lambda h} v_{i+1} - e^{-lambda h} v_{i-1})
///   + lambda^alpha (alpha - 1) (B v)_i
/// ```
///
/// The right side mirrors every shift.
pub fn apply_quasi_compact_derivative(
    side: Side,
    params: &TemperedParams,
    grid: &Grid1D,
    v: &[f64],
) -> Result<Vec<f64>> {
    params.ensure_open_order()?;
    let m = grid.cells;
    if v.len() != m + 1 {
        return Err(invalid(format!(
            "expected {} nodal values, got {}",
            m + 1,
            v.len()
        )));
    }
    let weights = tempered_weights(params, grid.h, m)?;
    let (alpha, lambda, h) = (params.alpha, params.lambda, grid.h);
    let frac = h.powf(-alpha);
    let drift = alpha * lambda.powf(alpha - 1.0) / (2.0 * h);
    let zeroth = lambda.powf(alpha) * (alpha - 1.0);
    let compact = apply_compact(side, lambda, h, v);
    let lh = lambda * h;

    let out = (1..m)
        .map(|i| {
            let (sum, advection) = match side {
                Side::Left => {
                    let sum: f64 = (0..=i + 1).map(|k| weights.get(k) * v[i + 1 - k]).sum();
                    (sum, lh.exp() * v[i + 1] - (-lh).exp() * v[i - 1])
                }
                Side::Right => {
                    let sum: f64 = (0..=m - i + 1).map(|k| weights.get(k) * v[i + k - 1]).sum();
                    (sum, lh.exp() * v[i - 1] - (-lh).exp() * v[i + 1])
                }
            };
            frac * sum - drift * advection + zeroth * compact[i - 1]
        })
        .collect();
    Ok(out)
}
