//! Small dense and tridiagonal helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, LU, Dyn};

use crate::error::{Error, Result};

/// Tridiagonal matrix stored by bands. `sub[i]` sits at `(i+1, i)`,
/// `sup[i]` at `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn toeplitz(n: usize, sub: f64, diag: f64, sup: f64) -> Self {
        Self {
            sub: vec![sub; n.saturating_sub(1)],
            diag: vec![diag; n],
            sup: vec![sup; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            diag: self.diag.clone(),
            sup: self.sub.clone(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.sub[i];
                m[(i, i + 1)] = self.sup[i];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.sub[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * v[i + 1];
            }
            acc
        })
    }

    /// Thomas algorithm without pivoting.
    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot.abs() < f64::MIN_POSITIVE {
            return Err(Error::SingularMatrix);
        }
        if n > 1 {
            c[0] = self.sup[0] / pivot;
        }
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.sub[i - 1] * c[i - 1];
            if pivot.abs() < f64::MIN_POSITIVE {
                return Err(Error::SingularMatrix);
            }
            if i + 1 < n {
                c[i] = self.sup[i] / pivot;
            }
            d[i] = (rhs[i] - self.sub[i - 1] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(DVector::from_vec(d))
    }
}

/// LU factorization with partial pivoting, computed once and reused.
pub struct Factorized {
    lu: LU<f64, Dyn, Dyn>,
}

impl Factorized {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu.solve(rhs).ok_or(Error::SingularMatrix)
    }

    pub fn solve_matrix(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.lu.solve(rhs).ok_or(Error::SingularMatrix)
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}
