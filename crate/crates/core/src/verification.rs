//! Manufactured solutions, error norms and convergence studies.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::oracle::{gamma_ratio, quadrature_oracle};
use crate::error::{invalid, Error, Result};
use crate::grid::{Grid1D, TimeGrid};
use crate::params::{Side, TemperedParams};
use crate::solver1d::{self, ProblemSide, ProblemSpec1D, Solution1D};
use crate::solver2d::{self, ProblemSpec2D, Solution2D};

/// Number of series terms kept in the two-sided source.
pub const TWO_SIDED_SERIES_TERMS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseId {
    /// Left derivative, `u = e^{-t - lambda x} x^j`.
    #[serde(rename = "ex5_1")]
    LeftPower,
    /// Right derivative, `u = e^{-t + lambda x} (1 - x)^j`.
    #[serde(rename = "ex5_2")]
    RightPower,
    /// Two-dimensional left derivatives, ADI.
    #[serde(rename = "ex5_3")]
    Adi2D,
    /// Left plus right derivative, operator splitting.
    #[serde(rename = "ex5_4")]
    TwoSided,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::LeftPower, CaseId::RightPower, CaseId::Adi2D, CaseId::TwoSided];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::LeftPower => "ex5_1",
            CaseId::RightPower => "ex5_2",
            CaseId::Adi2D => "ex5_3",
            CaseId::TwoSided => "ex5_4",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown case '{s}' (expected ex5_1, ex5_2, ex5_3 or ex5_4)")))
    }
}

/// How the time step follows the mesh width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Coupling {
    /// `tau = h^3`.
    Cubic,
    /// `tau = h^{3/2}`.
    ThreeHalves,
    /// A fixed `tau` on every level.
    Fixed(f64),
}

impl Coupling {
    /// Target step; the actual step is `T / ceil(T / target)`.
    pub fn target(self, h: f64) -> f64 {
        match self {
            Coupling::Cubic => h.powi(3),
            Coupling::ThreeHalves => h.powf(1.5),
            Coupling::Fixed(tau) => tau,
        }
    }

    pub fn label(self) -> String {
        match self {
            Coupling::Cubic => "h3".into(),
            Coupling::ThreeHalves => "h32".into(),
            Coupling::Fixed(tau) => format!("fixed({tau})"),
        }
    }
}

/// One of the four manufactured problems with its parameters.
///
/// All problems live on `(0, 1)` (or `(0, 1)^2`) with unit diffusivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub alpha: f64,
    /// Order in `y`; only used by the two-dimensional case.
    pub beta: Option<f64>,
    pub lambda: f64,
    /// Power of the monomial factor; only used by the one-sided cases.
    pub j: u32,
}

impl ManufacturedCase {
    pub fn left_power(alpha: f64, lambda: f64, j: u32) -> Result<Self> {
        Self::checked(CaseId::LeftPower, alpha, None, lambda, j)
    }

    pub fn right_power(alpha: f64, lambda: f64, j: u32) -> Result<Self> {
        Self::checked(CaseId::RightPower, alpha, None, lambda, j)
    }

    pub fn adi_2d(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        Self::checked(CaseId::Adi2D, alpha, Some(beta), lambda, 4)
    }

    pub fn two_sided(alpha: f64, lambda: f64) -> Result<Self> {
        Self::checked(CaseId::TwoSided, alpha, None, lambda, 4)
    }

    /// Builds any case; `beta` and `j` fall back to the customary defaults
    /// (`beta = alpha`, `j = 5`) when irrelevant or absent.
    pub fn new(id: CaseId, alpha: f64, beta: Option<f64>, lambda: f64, j: Option<u32>) -> Result<Self> {
        match id {
            CaseId::LeftPower => Self::left_power(alpha, lambda, j.unwrap_or(5)),
            CaseId::RightPower => Self::right_power(alpha, lambda, j.unwrap_or(5)),
            CaseId::Adi2D => Self::adi_2d(alpha, beta.unwrap_or(alpha), lambda),
            CaseId::TwoSided => Self::two_sided(alpha, lambda),
        }
    }

    fn checked(id: CaseId, alpha: f64, beta: Option<f64>, lambda: f64, j: u32) -> Result<Self> {
        TemperedParams::new(alpha, lambda, 1.0)?;
        if let Some(b) = beta {
            TemperedParams::new(b, lambda, 1.0)?;
        }
        if j < 1 {
            return Err(invalid("the monomial power j must be at least 1"));
        }
        Ok(Self {
            id,
            alpha,
            beta,
            lambda,
            j,
        })
    }

    pub fn params(&self) -> TemperedParams {
        TemperedParams::new(self.alpha, self.lambda, 1.0).expect("validated at construction")
    }

    pub fn params_y(&self) -> TemperedParams {
        TemperedParams::new(self.beta.unwrap_or(self.alpha), self.lambda, 1.0)
            .expect("validated at construction")
    }

    pub fn horizon(&self) -> f64 {
        match self.id {
            CaseId::LeftPower | CaseId::RightPower => 0.1,
            CaseId::Adi2D | CaseId::TwoSided => 1.0,
        }
    }

    pub fn default_coupling(&self) -> Coupling {
        match self.id {
            CaseId::Adi2D => Coupling::ThreeHalves,
            _ => Coupling::Cubic,
        }
    }

    pub fn is_2d(&self) -> bool {
        self.id == CaseId::Adi2D
    }

    /// Exact solution of a one-dimensional case.
    pub fn exact(&self, x: f64, t: f64) -> f64 {
        let (l, j) = (self.lambda, self.j as i32);
        match self.id {
            CaseId::LeftPower => (-t - l * x).exp() * x.powi(j),
            CaseId::RightPower => (-t + l * x).exp() * (1.0 - x).powi(j),
            CaseId::TwoSided => (-t - l * x).exp() * (x * (1.0 - x)).powi(4),
            CaseId::Adi2D => panic!("the two-dimensional case needs exact_2d"),
        }
    }

    pub fn exact_2d(&self, x: f64, y: f64, t: f64) -> f64 {
        (-t - self.lambda * (x + y)).exp() * x.powi(4) * (1.0 - x) * y.powi(4) * (1.0 - y)
    }

    /// Source term of a one-dimensional case.
    pub fn source(&self, x: f64, t: f64) -> f64 {
        let (a, l, j) = (self.alpha, self.lambda, self.j as f64);
        let ji = self.j as i32;
        match self.id {
            CaseId::LeftPower => {
                let frac = gamma_ratio(j + 1.0, a) * x.powf(j - a);
                let drift = a * l.powf(a - 1.0) * (j * x.powi(ji - 1) - l * x.powi(ji));
                -(-t - l * x).exp() * (x.powi(ji) + frac - drift - l.powf(a) * x.powi(ji))
            }
            CaseId::RightPower => {
                let y = 1.0 - x;
                let frac = gamma_ratio(j + 1.0, a) * y.powf(j - a);
                let drift = a * l.powf(a - 1.0) * (l * y.powi(ji) - j * y.powi(ji - 1));
                -(-t + l * x).exp() * (y.powi(ji) + frac + drift - l.powf(a) * y.powi(ji))
            }
            CaseId::TwoSided => two_sided_source(a, l, TWO_SIDED_SERIES_TERMS, x, t),
            CaseId::Adi2D => panic!("the two-dimensional case needs source_2d"),
        }
    }

    pub fn source_2d(&self, x: f64, y: f64, t: f64) -> f64 {
        let (a, b, l) = (self.alpha, self.beta.unwrap_or(self.alpha), self.lambda);
        // Each bracket is the power-rule derivative of s^k minus the tempering
        // corrections, for k = 4 and k = 5.
        let along = |s: f64, order: f64, k: i32| {
            let kf = k as f64;
            gamma_ratio(kf + 1.0, order) * s.powf(kf - order)
                - order * l.powf(order - 1.0) * (kf * s.powi(k - 1) - l * s.powi(k))
                - l.powf(order) * s.powi(k)
        };
        let x_part = (x.powi(4) + along(x, a, 4)) - (x.powi(5) + along(x, a, 5));
        let y_part = along(y, b, 4) - along(y, b, 5);
        -(-t - l * x - l * y).exp() * (x_part * y.powi(4) * (1.0 - y) + y_part * x.powi(4) * (1.0 - x))
    }

    /// Problem description for a one-dimensional case on a uniform grid.
    pub fn problem_1d(&self, h: f64, coupling: Coupling) -> Result<ProblemSpec1D> {
        if self.is_2d() {
            return Err(invalid("ex5_3 is two-dimensional"));
        }
        let grid = Grid1D::with_spacing(0.0, 1.0, h)?;
        let time = TimeGrid::with_max_step(self.horizon(), coupling.target(grid.h))?;
        let side = match self.id {
            CaseId::LeftPower => ProblemSide::Left,
            CaseId::RightPower => ProblemSide::Right,
            _ => ProblemSide::TwoSided,
        };
        let (c, c0, c1, cs) = (*self, *self, *self, *self);
        let spec = ProblemSpec1D::new(grid, time, self.params(), side).with_initial(move |x| c.exact(x, 0.0));
        let spec = if self.id == CaseId::TwoSided {
            let f = TwoSidedSource::new(self.alpha, self.lambda, TWO_SIDED_SERIES_TERMS);
            spec.with_source(move |x, t| f.eval(x, t))
        } else {
            spec.with_source(move |x, t| cs.source(x, t))
        };
        Ok(match self.id {
            CaseId::LeftPower => spec.with_boundary_right(move |t| c1.exact(1.0, t)),
            CaseId::RightPower => spec.with_boundary_left(move |t| c0.exact(0.0, t)),
            _ => spec,
        })
    }

    pub fn problem_2d(&self, h: f64, coupling: Coupling) -> Result<ProblemSpec2D> {
        if !self.is_2d() {
            return Err(invalid(format!("{} is one-dimensional", self.id)));
        }
        let grid = Grid1D::with_spacing(0.0, 1.0, h)?;
        let time = TimeGrid::with_max_step(self.horizon(), coupling.target(grid.h))?;
        let (c, cs) = (*self, *self);
        Ok(ProblemSpec2D::new(grid, grid, time, self.params(), self.params_y())
            .with_initial(move |x, y| c.exact_2d(x, y, 0.0))
            .with_source(move |x, y, t| cs.source_2d(x, y, t)))
    }

    /// Largest `|u_t - L u - f|` over `samples` interior space-time points,
    /// with `L u` evaluated by the quadrature oracle.
    pub fn residual(&self, samples: usize, tol: f64) -> Result<f64> {
        let p = self.params();
        let py = self.params_y();
        let mut worst: f64 = 0.0;
        for k in 0..samples {
            let (x, y, t) = sample_point(k, self.horizon());
            let r = match self.id {
                CaseId::LeftPower | CaseId::RightPower => {
                    let side = if self.id == CaseId::LeftPower { Side::Left } else { Side::Right };
                    let endpoint = if side == Side::Left { 0.0 } else { 1.0 };
                    let d = quadrature_oracle(side, &p, endpoint, |s| self.exact(s, t), x, tol)?;
                    -self.exact(x, t) - d - self.source(x, t)
                }
                CaseId::TwoSided => {
                    let dl = quadrature_oracle(Side::Left, &p, 0.0, |s| self.exact(s, t), x, tol)?;
                    let dr = quadrature_oracle(Side::Right, &p, 1.0, |s| self.exact(s, t), x, tol)?;
                    -self.exact(x, t) - dl - dr - self.source(x, t)
                }
                CaseId::Adi2D => {
                    let dx = quadrature_oracle(Side::Left, &p, 0.0, |s| self.exact_2d(s, y, t), x, tol)?;
                    let dy = quadrature_oracle(Side::Left, &py, 0.0, |s| self.exact_2d(x, s, t), y, tol)?;
                    -self.exact_2d(x, y, t) - dx - dy - self.source_2d(x, y, t)
                }
            };
            worst = worst.max(r.abs());
        }
        Ok(worst)
    }
}

/// Deterministic low-discrepancy points in `(0.05, 0.95)^2 x (0, T)`.
fn sample_point(k: usize, horizon: f64) -> (f64, f64, f64) {
    const G: [f64; 3] = [0.819_172_513_396_164_4, 0.671_043_606_703_789_2, 0.549_700_477_901_970_7];
    let frac = |g: f64| ((k as f64 + 1.0) * g + 0.5).fract();
    (0.05 + 0.9 * frac(G[0]), 0.05 + 0.9 * frac(G[1]), horizon * frac(G[2]))
}

/// Source of the two-sided problem with the right-derivative part expanded
/// as a power series truncated after `n_terms` terms:
///
/// ```text
/// f = -e^{-t} [ e^{-lambda x} ( x^4 (1-x)^4 + sum_m c_m G(5+m, alpha) x^{4+m-alpha} - 2 lambda^alpha x^4 (1-x)^4 )
///             + e^{lambda (x-2)} sum_{j<=n} (2 lambda)^j / j! sum_m c_m G(5+m+j, alpha) (1-x)^{j+4+m-alpha} ]
/// ```
///
/// with `c_m = (-1)^m C(4, m)` and `G(a, alpha) = Gamma(a) / Gamma(a - alpha)`.
pub fn two_sided_source(alpha: f64, lambda: f64, n_terms: usize, x: f64, t: f64) -> f64 {
    const C: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];
    let bump = (x * (1.0 - x)).powi(4);
    let left: f64 = (0..5)
        .map(|m| C[m] * gamma_ratio(5.0 + m as f64, alpha) * x.powf(4.0 + m as f64 - alpha))
        .sum();
    let y = 1.0 - x;
    let mut right = 0.0;
    let mut coef = 1.0;
    for j in 0..=n_terms {
        if j > 0 {
            coef *= 2.0 * lambda / j as f64;
        }
        if coef == 0.0 {
            break;
        }
        let jf = j as f64;
        let inner: f64 = (0..5)
            .map(|m| {
                let a = 5.0 + m as f64 + jf;
                C[m] * gamma_ratio(a, alpha) * y.powf(a - 1.0 - alpha)
            })
            .sum();
        right += coef * inner;
    }
    -(-t).exp()
        * ((-lambda * x).exp() * (bump + left - 2.0 * lambda.powf(alpha) * bump)
            + (lambda * (x - 2.0)).exp() * right)
}

/// [`two_sided_source`] with the double series regrouped into two polynomials,
/// `x^{4-alpha} p(x)` and `(1-x)^{4-alpha} q(1-x)`, whose coefficients are
/// computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedSource {
    alpha: f64,
    lambda: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl TwoSidedSource {
    pub fn new(alpha: f64, lambda: f64, n_terms: usize) -> Self {
        const C: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];
        let left = (0..5).map(|m| C[m] * gamma_ratio(5.0 + m as f64, alpha)).collect();
        let mut right = vec![0.0; n_terms + 5];
        let mut coef = 1.0;
        for j in 0..=n_terms {
            if j > 0 {
                coef *= 2.0 * lambda / j as f64;
            }
            for m in 0..5 {
                right[j + m] += coef * C[m] * gamma_ratio(5.0 + (m + j) as f64, alpha);
            }
        }
        Self {
            alpha,
            lambda,
            left,
            right,
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let horner = |c: &[f64], s: f64| c.iter().rev().fold(0.0, |acc, &v| acc * s + v);
        let (a, l) = (self.alpha, self.lambda);
        let y = 1.0 - x;
        let bump = (x * y).powi(4);
        let left = x.powf(4.0 - a) * horner(&self.left, x);
        let right = y.powf(4.0 - a) * horner(&self.right, y);
        -(-t).exp()
            * ((-l * x).exp() * (bump + left - 2.0 * l.powf(a) * bump) + (l * (x - 2.0)).exp() * right)
    }
}

/// Discrete `L^2` error `sqrt(h sum (u(x_i) - U_i)^2)` over interior nodes;
/// infinite when the numerical values are not finite.
pub fn error_norm_1d(solution: &Solution1D, exact: impl Fn(f64) -> f64) -> f64 {
    let grid = &solution.grid;
    let mut sum = 0.0;
    for i in 1..grid.cells {
        let u = solution.values[i];
        if !u.is_finite() {
            return f64::INFINITY;
        }
        sum += (exact(grid.node(i)) - u).powi(2);
    }
    (grid.h * sum).sqrt()
}

pub fn error_norm_2d(solution: &Solution2D, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let (gx, gy) = (&solution.grid_x, &solution.grid_y);
    let mut sum = 0.0;
    for i in 0..gx.interior_len() {
        for j in 0..gy.interior_len() {
            let u = solution.values[(i, j)];
            if !u.is_finite() {
                return f64::INFINITY;
            }
            sum += (exact(gx.node(i + 1), gy.node(j + 1)) - u).powi(2);
        }
    }
    (gx.h * gy.h * sum).sqrt()
}

/// Runs one case on one mesh and returns the final-time error.
///
/// A blown-up run reports an infinite error instead of failing.
pub fn solve_and_measure(case: &ManufacturedCase, h: f64, coupling: Coupling) -> Result<LevelResult> {
    let start = Instant::now();
    let outcome = if case.is_2d() {
        let spec = case.problem_2d(h, coupling)?;
        let t = spec.time;
        let res = solver2d::solve_adi(&spec).map(|s| error_norm_2d(&s, |x, y| case.exact_2d(x, y, t.horizon)));
        (spec.grid_x.h, t, res)
    } else {
        let spec = case.problem_1d(h, coupling)?;
        let t = spec.time;
        let res = solver1d::solve(&spec).map(|s| error_norm_1d(&s, |x| case.exact(x, t.horizon)));
        (spec.grid.h, t, res)
    };
    let (h, time, res) = outcome;
    let (error, failure) = match res {
        Ok(e) => (e, None),
        Err(err @ Error::Blowup { .. }) => (f64::INFINITY, Some(err.to_string())),
        Err(err) => return Err(err),
    };
    Ok(LevelResult {
        h,
        tau: time.tau,
        steps: time.steps,
        error,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    pub error: f64,
    pub wall_ms: f64,
    /// Set when the run blew up or otherwise failed.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    pub error: f64,
    /// `log2(e_prev / e)`; absent on the first row.
    pub rate: Option<f64>,
    pub wall_ms: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub case: ManufacturedCase,
    pub coupling: Coupling,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }
}

/// `log2(previous / current)`.
pub fn observed_rate(previous: f64, current: f64) -> f64 {
    (previous / current).log2()
}

/// Solves `case` on every mesh width in `levels` (in parallel) and tabulates
/// errors and successive rates. Failed levels are kept with an infinite error.
pub fn run_convergence_study(case: &ManufacturedCase, levels: &[f64], coupling: Coupling) -> Result<ConvergenceReport> {
    if levels.len() < 2 {
        return Err(invalid("a convergence study needs at least two levels"));
    }
    let results: Vec<LevelResult> = levels
        .par_iter()
        .map(|&h| {
            solve_and_measure(case, h, coupling).unwrap_or_else(|e| LevelResult {
                h,
                tau: f64::NAN,
                steps: 0,
                error: f64::NAN,
                wall_ms: 0.0,
                failure: Some(e.to_string()),
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for (k, r) in results.iter().enumerate() {
        rows.push(ConvergenceRow {
            h: r.h,
            tau: r.tau,
            steps: r.steps,
            error: r.error,
            rate: (k > 0).then(|| observed_rate(results[k - 1].error, r.error)),
            wall_ms: r.wall_ms,
            failure: r.failure.clone(),
        });
    }
    Ok(ConvergenceReport {
        case: *case,
        coupling,
        rows,
    })
}

/// The four halvings `0.1, 0.05, 0.025, 0.0125`.
pub fn standard_levels() -> Vec<f64> {
    (0..4).map(|k| 0.1 / f64::from(1u32 << k)).collect()
}
