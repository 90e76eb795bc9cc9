//! Numerical checks of the stability argument: definiteness of the symmetric
//! parts of `P` and `B`, Toeplitz symbol bounds, the `H+` splitting used when
//! `w_3 < 0`, and the `lambda h <= 1` predicate.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::calculus::{tempered_weights, w3_closed_form};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::operators::{assemble_b, unscaled_operator};
use crate::params::{Side, TemperedParams};

/// Eigenvalues closer to zero than this are treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Largest matrix handed to the dense eigen-solver.
pub const MAX_DIAGNOSTIC_DIM: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NegativeDefinite,
    Indefinite,
    PositiveDefinite,
}

impl Verdict {
    pub fn classify(min_eig: f64, max_eig: f64) -> Verdict {
        if max_eig < -ZERO_THRESHOLD {
            Verdict::NegativeDefinite
        } else if min_eig > ZERO_THRESHOLD {
            Verdict::PositiveDefinite
        } else {
            Verdict::Indefinite
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefinitenessReport {
    pub alpha: f64,
    pub lambda_h: f64,
    pub dim: usize,
    pub max_eig: f64,
    pub min_eig: f64,
    pub verdict: Verdict,
}

/// `(A + A^T) / 2`.
pub fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// All eigenvalues of a symmetric matrix in increasing order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() > MAX_DIAGNOSTIC_DIM {
        return Err(invalid(format!(
            "diagnostic matrices are limited to dimension {MAX_DIAGNOSTIC_DIM}, got {}",
            m.nrows()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric QR iteration did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn report(alpha: f64, lambda_h: f64, sym: &DMatrix<f64>) -> Result<DefinitenessReport> {
    let values = symmetric_eigenvalues(sym)?;
    let min_eig = values[0];
    let max_eig = values[values.len() - 1];
    Ok(DefinitenessReport {
        alpha,
        lambda_h,
        dim: sym.nrows(),
        max_eig,
        min_eig,
        verdict: Verdict::classify(min_eig, max_eig),
    })
}

/// Classifies the symmetric part of `P = K tau L`. Left and right variants share
/// it, so no side is needed. The verdict is only guaranteed for `lambda h <= 1`.
pub fn check_p_definiteness(params: &TemperedParams, grid: &Grid1D, tau: f64) -> Result<DefinitenessReport> {
    let p = unscaled_operator(Side::Left, params, grid)? * (params.diffusivity * tau);
    report(params.alpha, params.lambda * grid.h, &symmetric_part(&p))
}

/// Spectrum of `sym(B)` against the interval `(1/12, 2)` and its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompactBounds {
    pub report: DefinitenessReport,
    pub within_bounds: bool,
    /// Largest deviation between solver and closed-form eigenvalues.
    pub closed_form_deviation: f64,
}

/// `2/3 + (e^{lambda h} + e^{-lambda h}) cos(j pi / M) / 6` for `j = 1..M-1`, sorted.
pub fn compact_eigenvalues(lambda: f64, h: f64, cells: usize) -> Vec<f64> {
    let lh = lambda * h;
    let c = (lh.exp() + (-lh).exp()) / 6.0;
    let mut v: Vec<f64> = (1..cells)
        .map(|j| 2.0 / 3.0 + c * (j as f64 * std::f64::consts::PI / cells as f64).cos())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn check_b_bounds(lambda: f64, h: f64, cells: usize) -> Result<CompactBounds> {
    let grid = Grid1D::new(0.0, h * cells as f64, cells)?;
    let b = assemble_b(Side::Left, &grid, lambda).to_dense();
    let sym = symmetric_part(&b);
    let values = symmetric_eigenvalues(&sym)?;
    let closed = compact_eigenvalues(lambda, h, cells);
    let closed_form_deviation = values
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let report = report(0.0, lambda * h, &sym)?;
    Ok(CompactBounds {
        within_bounds: report.min_eig > 1.0 / 12.0 && report.max_eig < 2.0,
        closed_form_deviation,
        report,
    })
}

/// Fourier coefficients `t_0, t_1, ...` of the symmetric Toeplitz matrix
/// `sym(L)` on `grid`, where `L = P / (K tau)`.
pub fn symmetric_symbol_coefficients(params: &TemperedParams, grid: &Grid1D) -> Result<Vec<f64>> {
    let l = unscaled_operator(Side::Left, params, grid)?;
    let sym = symmetric_part(&l);
    Ok((0..sym.ncols()).map(|k| sym[(0, k)]).collect())
}

/// Range of the generating function `t_0 + 2 sum_k t_k cos(k x)` sampled on
/// `samples` points of `[-pi, pi]`.
pub fn symbol_range(coefficients: &[f64], samples: usize) -> (f64, f64) {
    let samples = samples.max(2);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in 0..samples {
        let x = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * s as f64 / (samples - 1) as f64;
        let f = coefficients[0]
            + 2.0
                * coefficients[1..]
                    .iter()
                    .enumerate()
                    .map(|(k, t)| t * ((k + 1) as f64 * x).cos())
                    .sum::<f64>();
        lo = lo.min(f);
        hi = hi.max(f);
    }
    (lo, hi)
}

/// Union of Gerschgorin discs of a real matrix, projected on the real axis.
pub fn gerschgorin_interval(m: &DMatrix<f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m.nrows() {
        let radius: f64 = (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
        lo = lo.min(m[(i, i)] - radius);
        hi = hi.max(m[(i, i)] + radius);
    }
    (lo, hi)
}

/// Nonnegative pentadiagonal correction that restores diagonal dominance of
/// `sym(L)` when its second off-diagonal is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct HPlusSplit {
    pub h_a: f64,
    pub h_b: f64,
    pub h_c: f64,
    pub matrix: DMatrix<f64>,
    /// Whether `sym(L) + H+` has a negative diagonal and strictly dominates it.
    pub combined_diagonally_dominant: bool,
    /// Whether every off-diagonal entry of `sym(L) + H+` is nonnegative.
    pub combined_offdiag_nonnegative: bool,
    pub symmetric_max_eig: f64,
    pub combined_max_eig: f64,
    pub hplus_min_eig: f64,
    pub hplus_max_eig: f64,
}

impl HPlusSplit {
    /// `f+(y) = h_a - 2 h_c + 2 h_b y + 4 h_c y^2`.
    pub fn generating_polynomial(&self, y: f64) -> f64 {
        self.h_a - 2.0 * self.h_c + 2.0 * self.h_b * y + 4.0 * self.h_c * y * y
    }

    /// `max eig(sym) <= max eig(sym + H+) + max eig(-H+)`.
    pub fn weyl_bound_holds(&self) -> bool {
        let slack = 1e-10 * self.symmetric_max_eig.abs().max(1.0);
        self.symmetric_max_eig <= self.combined_max_eig - self.hplus_min_eig + slack
    }
}

pub fn hplus_split(params: &TemperedParams, grid: &Grid1D) -> Result<HPlusSplit> {
    let w3 = tempered_weights(params, grid.h, 3)?.get(3);
    if w3 >= 0.0 {
        return Err(Error::RegimeMismatch { w3 });
    }
    let sym = symmetric_part(&unscaled_operator(Side::Left, params, grid)?);
    let n = sym.nrows();
    let h_c = -w3 / (2.0 * grid.h.powf(params.alpha));
    let (h_a, h_b) = (6.0 * h_c, -4.0 * h_c);
    let hplus = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => h_a,
        1 => h_b,
        2 => h_c,
        _ => 0.0,
    });
    let combined = &sym + &hplus;

    let mut dominant = true;
    let mut offdiag_nonnegative = true;
    for i in 0..n {
        let d = combined[(i, i)];
        let mut radius = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let v = combined[(i, j)];
            offdiag_nonnegative &= v >= -ZERO_THRESHOLD * d.abs();
            radius += v.abs();
        }
        dominant &= d < 0.0 && -d > radius;
    }

    let sym_eigs = symmetric_eigenvalues(&sym)?;
    let combined_eigs = symmetric_eigenvalues(&combined)?;
    let hplus_eigs = symmetric_eigenvalues(&hplus)?;
    Ok(HPlusSplit {
        h_a,
        h_b,
        h_c,
        matrix: hplus,
        combined_diagonally_dominant: dominant,
        combined_offdiag_nonnegative: offdiag_nonnegative,
        symmetric_max_eig: sym_eigs[n - 1],
        combined_max_eig: combined_eigs[n - 1],
        hplus_min_eig: hplus_eigs[0],
        hplus_max_eig: hplus_eigs[n - 1],
    })
}

/// Order in `(1, 2)` at which `w_3` changes sign: the root of
/// `3 a^3 + 17 a^2 + 6 a - 80`.
pub fn w3_sign_root() -> f64 {
    let cubic = |a: f64| ((3.0 * a + 17.0) * a + 6.0) * a - 80.0;
    let (mut lo, mut hi) = (1.0, 2.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if cubic(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign of `w_3` at `lambda = 0` is that of `-(alpha - 1)(3 alpha^3 + 17 alpha^2 + 6 alpha - 80)`.
pub fn w3_sign_quartic(alpha: f64) -> f64 {
    80.0 - 86.0 * alpha - 11.0 * alpha.powi(2) + 14.0 * alpha.powi(3) + 3.0 * alpha.powi(4)
}

/// Proven stability range `0 < h <= 1 / lambda`.
pub fn stability_predicate(lambda: f64, h: f64) -> bool {
    h > 0.0 && (lambda == 0.0 || lambda * h <= 1.0 + 4.0 * f64::EPSILON)
}

/// `w_3` at `lambda h` through its closed form, for quick regime checks.
pub fn w3_regime(alpha: f64, lambda_h: f64) -> f64 {
    w3_closed_form(alpha, lambda_h)
}
