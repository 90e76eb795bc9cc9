//! Implicit time stepping for one-dimensional tempered diffusion problems.
//!
//! * [`solve_left`]: `(B_l - P_l) U^{n+1} = B_l U^n + tau B_l F^{n+1} + H_l^{n+1}`
//!   with `u(a, t) = 0`.
//! * [`solve_right`]: the transposed scheme with `u(b, t) = 0`.
//! * [`solve_two_sided`]: operator splitting for the sum of both derivatives
//!   with homogeneous boundaries.
//!
//! All matrices are assembled and factored once per run.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::calculus::tempered_weights;
use crate::error::{invalid, Error, Result};
use crate::grid::{Grid1D, TimeGrid};
use crate::linalg::{max_abs, Factorized};
use crate::operators::{
    assemble_b, assemble_h, assemble_operator, assemble_p, apply_compact, BoundaryStep,
};
use crate::params::{Side, TemperedParams};
use crate::spectral::stability_predicate;

pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A run is declared blown up once `max |U|` exceeds this multiple of the
/// largest initial or boundary value (or of 1, whichever is larger).
pub const BLOWUP_GROWTH: f64 = 1e12;

/// Boundary traces above this magnitude count as nonzero where a homogeneous
/// condition is required.
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// Corner mismatches between initial and boundary data above this are logged.
pub const CORNER_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemSide {
    Left,
    Right,
    TwoSided,
}

#[derive(Clone)]
pub struct ProblemSpec1D {
    pub grid: Grid1D,
    pub time: TimeGrid,
    pub params: TemperedParams,
    pub side: ProblemSide,
    pub initial: SpaceFn,
    pub boundary_left: SpaceFn,
    pub boundary_right: SpaceFn,
    pub source: SourceFn,
    /// Store every time slice, not only the last one.
    pub keep_history: bool,
}

impl fmt::Debug for ProblemSpec1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec1D")
            .field("grid", &self.grid)
            .field("time", &self.time)
            .field("params", &self.params)
            .field("side", &self.side)
            .field("keep_history", &self.keep_history)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec1D {
    /// Problem with zero initial, boundary and source data.
    pub fn new(grid: Grid1D, time: TimeGrid, params: TemperedParams, side: ProblemSide) -> Self {
        Self {
            grid,
            time,
            params,
            side,
            initial: Arc::new(|_| 0.0),
            boundary_left: Arc::new(|_| 0.0),
            boundary_right: Arc::new(|_| 0.0),
            source: Arc::new(|_, _| 0.0),
            keep_history: false,
        }
    }

    pub fn with_initial(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(f);
        self
    }

    pub fn with_boundary_left(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary_left = Arc::new(f);
        self
    }

    pub fn with_boundary_right(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary_right = Arc::new(f);
        self
    }

    pub fn with_source(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Arc::new(f);
        self
    }

    pub fn with_history(mut self, keep: bool) -> Self {
        self.keep_history = keep;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution1D {
    pub grid: Grid1D,
    pub time: TimeGrid,
    /// `U^N` at all `M + 1` nodes, boundary nodes included.
    pub values: Vec<f64>,
    /// `U^0, ..., U^N` when requested.
    pub history: Option<Vec<Vec<f64>>>,
}

impl Solution1D {
    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }
}

/// `E = h v^T B v` over interior nodes of a full nodal vector.
pub fn discrete_energy(side: Side, grid: &Grid1D, lambda: f64, values: &[f64]) -> f64 {
    let b = assemble_b(side, grid, lambda);
    let v = DVector::from_column_slice(&values[1..values.len() - 1]);
    grid.h * v.dot(&b.mul_vec(&v))
}

pub fn solve(spec: &ProblemSpec1D) -> Result<Solution1D> {
    match spec.side {
        ProblemSide::Left => solve_left(spec),
        ProblemSide::Right => solve_right(spec),
        ProblemSide::TwoSided => solve_two_sided(spec),
    }
}

pub fn solve_left(spec: &ProblemSpec1D) -> Result<Solution1D> {
    if spec.side != ProblemSide::Left {
        return Err(invalid("solve_left needs a left-sided problem"));
    }
    solve_one_sided(spec, Side::Left)
}

pub fn solve_right(spec: &ProblemSpec1D) -> Result<Solution1D> {
    if spec.side != ProblemSide::Right {
        return Err(invalid("solve_right needs a right-sided problem"));
    }
    solve_one_sided(spec, Side::Right)
}

/// Tracks the data scale and rejects non-finite or runaway states.
struct BlowupGuard {
    limit: f64,
}

impl BlowupGuard {
    fn new(initial: &[f64]) -> Self {
        Self {
            limit: BLOWUP_GROWTH * max_abs(initial).max(1.0),
        }
    }

    fn widen(&mut self, boundary: f64) {
        self.limit = self.limit.max(BLOWUP_GROWTH * boundary.abs());
    }

    fn check(&self, step: usize, values: &[f64]) -> Result<()> {
        let m = max_abs(values);
        if !m.is_finite() || m > self.limit {
            Err(Error::Blowup { step, max_abs: m })
        } else {
            Ok(())
        }
    }
}

fn require_zero(value: f64, time: f64) -> Result<()> {
    if value.abs() > TRACE_TOLERANCE || !value.is_finite() {
        Err(Error::NonzeroTrace { time, value })
    } else {
        Ok(())
    }
}

fn advise_stability(params: &TemperedParams, grid: &Grid1D) {
    if !stability_predicate(params.lambda, grid.h) {
        log::warn!(
            "lambda h = {} > 1: stability is not guaranteed for this grid",
            params.lambda * grid.h
        );
    }
}

fn initial_state(spec: &ProblemSpec1D) -> Vec<f64> {
    let grid = &spec.grid;
    let mut u: Vec<f64> = grid.nodes().iter().map(|&x| (spec.initial)(x)).collect();
    let (left, right) = ((spec.boundary_left)(0.0), (spec.boundary_right)(0.0));
    for (node, trace, name) in [(0, left, "left"), (grid.cells, right, "right")] {
        if (u[node] - trace).abs() > CORNER_TOLERANCE {
            log::warn!(
                "initial value {} and {name} boundary trace {trace} disagree at t = 0",
                u[node]
            );
        }
        u[node] = trace;
    }
    u
}

/// Source value at a boundary node; a singular value there is replaced by 0.
fn boundary_source(spec: &ProblemSpec1D, x: f64, t: f64, warned: &mut bool) -> f64 {
    let v = (spec.source)(x, t);
    if v.is_finite() {
        v
    } else {
        if !*warned {
            log::warn!("source is not finite at boundary node x = {x}; using 0 there");
            *warned = true;
        }
        0.0
    }
}

fn interior_source(spec: &ProblemSpec1D, nodes: &[f64], t: f64) -> Result<DVector<f64>> {
    let n = nodes.len() - 2;
    let mut f = DVector::zeros(n);
    for i in 0..n {
        let v = (spec.source)(nodes[i + 1], t);
        if !v.is_finite() {
            return Err(Error::SingularEvaluation(format!(
                "source is not finite at x = {}, t = {t}",
                nodes[i + 1]
            )));
        }
        f[i] = v;
    }
    Ok(f)
}

fn solve_one_sided(spec: &ProblemSpec1D, side: Side) -> Result<Solution1D> {
    let (grid, time, params) = (spec.grid, spec.time, spec.params);
    params.ensure_open_order()?;
    advise_stability(&params, &grid);
    let m = grid.cells;
    let tau = time.tau;

    let b = assemble_b(side, &grid, params.lambda);
    let p = assemble_p(side, &params, &grid, tau)?;
    let lu = Factorized::new(b.to_dense() - &p.matrix)?;
    let weights = tempered_weights(&params, grid.h, m)?;
    let nodes = grid.nodes();

    let mut u = initial_state(spec);
    let homogeneous_node = match side {
        Side::Left => 0,
        Side::Right => m,
    };
    require_zero(u[homogeneous_node], 0.0)?;
    let mut guard = BlowupGuard::new(&u);
    let mut history = spec.keep_history.then(|| vec![u.clone()]);
    let mut warned = false;

    for step in 0..time.steps {
        let t1 = time.time(step + 1);
        let (left_next, right_next) = ((spec.boundary_left)(t1), (spec.boundary_right)(t1));
        require_zero(if side == Side::Left { left_next } else { right_next }, t1)?;
        guard.widen(left_next.max(right_next));

        let data = BoundaryStep {
            left_now: u[0],
            left_next,
            right_now: u[m],
            right_next,
            source_left: boundary_source(spec, nodes[0], t1, &mut warned),
            source_right: boundary_source(spec, nodes[m], t1, &mut warned),
        };
        let f = interior_source(spec, &nodes, t1)?;
        let current = DVector::from_column_slice(&u[1..m]);
        let h_vec = assemble_h(side, &params, &grid, tau, &data, &weights)?;
        let rhs = b.mul_vec(&(current + f * tau)) + h_vec.values;
        let next = lu.solve(&rhs)?;

        u[0] = left_next;
        u[m] = right_next;
        u[1..m].copy_from_slice(next.as_slice());
        guard.check(step + 1, &u)?;
        if let Some(h) = history.as_mut() {
            h.push(u.clone());
        }
    }
    Ok(Solution1D {
        grid,
        time,
        values: u,
        history,
    })
}

/// Splitting scheme for `u_t = D_left u + D_right u + f` with homogeneous
/// boundaries; the source is sampled at the temporal midpoint.
pub fn solve_two_sided(spec: &ProblemSpec1D) -> Result<Solution1D> {
    if spec.side != ProblemSide::TwoSided {
        return Err(invalid("solve_two_sided needs a two-sided problem"));
    }
    let (grid, time, params) = (spec.grid, spec.time, spec.params);
    params.ensure_open_order()?;
    advise_stability(&params, &grid);
    let m = grid.cells;
    let tau = time.tau;

    let b_l = assemble_b(Side::Left, &grid, params.lambda);
    let b_r = assemble_b(Side::Right, &grid, params.lambda);
    let p_l = assemble_operator(Side::Left, &params, &grid)?.matrix;
    let p_r = assemble_operator(Side::Right, &params, &grid)?.matrix;
    let explicit = b_l.to_dense() + &p_l * tau;
    let lu = Factorized::new(b_r.to_dense() - &p_r * tau)?;
    let nodes = grid.nodes();
    let mut warned = false;

    let mut u = initial_state(spec);
    require_zero(u[0], 0.0)?;
    require_zero(u[m], 0.0)?;
    let guard = BlowupGuard::new(&u);
    let mut history = spec.keep_history.then(|| vec![u.clone()]);

    for step in 0..time.steps {
        let t1 = time.time(step + 1);
        require_zero((spec.boundary_left)(t1), t1)?;
        require_zero((spec.boundary_right)(t1), t1)?;
        let t_half = 0.5 * (time.time(step) + t1);
        let mut half_f = DVector::zeros(m + 1);
        half_f.rows_mut(1, m - 1).copy_from(&interior_source(spec, &nodes, t_half)?);
        half_f[0] = boundary_source(spec, nodes[0], t_half, &mut warned);
        half_f[m] = boundary_source(spec, nodes[m], t_half, &mut warned);
        half_f *= 0.5 * tau;

        let current = DVector::from_column_slice(&u[1..m]);
        // Boundary source values enter through the compact stencil.
        let filtered_l = DVector::from_vec(apply_compact(Side::Left, params.lambda, grid.h, half_f.as_slice()));
        let filtered_r = DVector::from_vec(apply_compact(Side::Right, params.lambda, grid.h, half_f.as_slice()));
        let star = b_l.solve(&(&explicit * current + filtered_l))?;
        let next = lu.solve(&(b_r.mul_vec(&star) + filtered_r))?;

        u[1..m].copy_from_slice(next.as_slice());
        guard.check(step + 1, &u)?;
        if let Some(h) = history.as_mut() {
            h.push(u.clone());
        }
    }
    Ok(Solution1D {
        grid,
        time,
        values: u,
        history,
    })
}
