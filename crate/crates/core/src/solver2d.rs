//! D'yakonov ADI stepping for `u_t = D_x u + D_y u + f` on a rectangle with
//! left-sided tempered derivatives in both directions and zero boundary values.
//!
//! The interior unknowns form a matrix `U` with rows indexed by `x` and
//! columns by `y`. One step reads
//!
//! ```text
//! (B_x - tau/2 P_x) U*  = (B_x + tau/2 P_x) U^n (B_y + tau/2 P_y)^T + tau B_x F^{n+1/2} B_y^T
//! U^{n+1} (B_y - tau/2 P_y)^T = U*
//! ```
//!
//! where `P` carries the diffusivity but no time step.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, TimeGrid};
use crate::linalg::{max_abs, Factorized};
use crate::operators::{assemble_b, assemble_operator, compact_extended};
use crate::params::{Side, TemperedParams};
use crate::solver1d::BLOWUP_GROWTH;
use crate::spectral::stability_predicate;

pub type SurfaceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Source2DFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ProblemSpec2D {
    pub grid_x: Grid1D,
    pub grid_y: Grid1D,
    pub time: TimeGrid,
    pub params_x: TemperedParams,
    pub params_y: TemperedParams,
    pub initial: SurfaceFn,
    pub source: Source2DFn,
}

impl fmt::Debug for ProblemSpec2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec2D")
            .field("grid_x", &self.grid_x)
            .field("grid_y", &self.grid_y)
            .field("time", &self.time)
            .field("params_x", &self.params_x)
            .field("params_y", &self.params_y)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec2D {
    pub fn new(
        grid_x: Grid1D,
        grid_y: Grid1D,
        time: TimeGrid,
        params_x: TemperedParams,
        params_y: TemperedParams,
    ) -> Self {
        Self {
            grid_x,
            grid_y,
            time,
            params_x,
            params_y,
            initial: Arc::new(|_, _| 0.0),
            source: Arc::new(|_, _, _| 0.0),
        }
    }

    pub fn with_initial(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(f);
        self
    }

    pub fn with_source(mut self, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Arc::new(f);
        self
    }

    fn sample_full(&self, f: impl Fn(f64, f64) -> f64) -> DMatrix<f64> {
        let (xs, ys) = (self.grid_x.nodes(), self.grid_y.nodes());
        DMatrix::from_fn(xs.len(), ys.len(), |i, j| f(xs[i], ys[j]))
    }

    fn sample(&self, f: impl Fn(f64, f64) -> f64) -> DMatrix<f64> {
        let (xs, ys) = (self.grid_x.nodes(), self.grid_y.nodes());
        DMatrix::from_fn(self.grid_x.interior_len(), self.grid_y.interior_len(), |i, j| {
            f(xs[i + 1], ys[j + 1])
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution2D {
    pub grid_x: Grid1D,
    pub grid_y: Grid1D,
    pub time: TimeGrid,
    /// Interior values at the final time, `(M_x - 1) x (M_y - 1)`.
    pub values: DMatrix<f64>,
}

pub fn solve_adi(spec: &ProblemSpec2D) -> Result<Solution2D> {
    for (p, g) in [(&spec.params_x, &spec.grid_x), (&spec.params_y, &spec.grid_y)] {
        if !stability_predicate(p.lambda, g.h) {
            log::warn!("lambda h = {} > 1 in one direction; stability is not guaranteed", p.lambda * g.h);
        }
    }
    let p_x = assemble_operator(Side::Left, &spec.params_x, &spec.grid_x)?.matrix;
    let p_y = assemble_operator(Side::Left, &spec.params_y, &spec.grid_y)?.matrix;
    solve_adi_with_operators(spec, &p_x, &p_y)
}

/// ADI stepping with caller-supplied directional operators (no time step
/// folded in). [`solve_adi`] passes the assembled tempered operators.
pub fn solve_adi_with_operators(
    spec: &ProblemSpec2D,
    p_x: &DMatrix<f64>,
    p_y: &DMatrix<f64>,
) -> Result<Solution2D> {
    let half = 0.5 * spec.time.tau;
    let b_x = assemble_b(Side::Left, &spec.grid_x, spec.params_x.lambda).to_dense();
    let b_y = assemble_b(Side::Left, &spec.grid_y, spec.params_y.lambda).to_dense();

    let implicit_x = Factorized::new(&b_x - p_x * half)?;
    let implicit_y = Factorized::new(&b_y - p_y * half)?;
    let explicit_x = &b_x + p_x * half;
    let explicit_y_t = (&b_y + p_y * half).transpose();
    // The source is filtered by the compact operator including its boundary values.
    let filter_x = compact_extended(Side::Left, &spec.grid_x, spec.params_x.lambda);
    let filter_y_t = compact_extended(Side::Left, &spec.grid_y, spec.params_y.lambda).transpose();

    let mut u = spec.sample(|x, y| (spec.initial)(x, y));
    let limit = BLOWUP_GROWTH * u.amax().max(1.0);

    for step in 0..spec.time.steps {
        let t_half = 0.5 * (spec.time.time(step) + spec.time.time(step + 1));
        let f = spec.sample_full(|x, y| (spec.source)(x, y, t_half));
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularEvaluation(format!("source is not finite at t = {t_half}")));
        }
        let rhs = &explicit_x * &u * &explicit_y_t + (&filter_x * f * &filter_y_t) * spec.time.tau;
        let star = implicit_x.solve_matrix(&rhs)?;
        u = implicit_y.solve_matrix(&star.transpose())?.transpose();

        let m = max_abs(u.as_slice());
        if !m.is_finite() || m > limit {
            return Err(Error::Blowup {
                step: step + 1,
                max_abs: m,
            });
        }
    }
    Ok(Solution2D {
        grid_x: spec.grid_x,
        grid_y: spec.grid_y,
        time: spec.time,
        values: u,
    })
}
