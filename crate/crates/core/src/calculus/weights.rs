//! Coefficient sequences of the shifted Grünwald–Letnikov tempered operators
//! and of the third-order quasi-compact combination built from them.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::params::TemperedParams;

/// Coefficients `g_k` of the binomial series of `(1 - z)^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrunwaldWeights {
    pub alpha: f64,
    pub values: Vec<f64>,
}

/// Returns `g_0, ..., g_n` for `0 < alpha <= 2`.
///
/// Uses the multiplicative recurrence `g_k = (k - 1 - alpha) / k * g_{k-1}`,
/// which stays finite for any `k` where a ratio of Gamma functions overflows
/// past `k ~ 170`.
pub fn grunwald_weights(alpha: f64, n: usize) -> Result<GrunwaldWeights> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid(format!("Grünwald order must lie in (0, 2], got {alpha}")));
    }
    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    for k in 1..=n {
        let kf = k as f64;
        let prev = values[k - 1];
        values.push((kf - 1.0 - alpha) / kf * prev);
    }
    Ok(GrunwaldWeights { alpha, values })
}

/// Weights `mu_{-1}, mu_0, mu_1` of the three shifted operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiCompactCoefficients {
    pub mu_minus: f64,
    pub mu_zero: f64,
    pub mu_plus: f64,
}

impl QuasiCompactCoefficients {
    pub fn sum(&self) -> f64 {
        self.mu_minus + self.mu_zero + self.mu_plus
    }

    /// The coefficient attached to shift `p` in `{-1, 0, 1}`.
    pub fn for_shift(&self, p: i32) -> f64 {
        match p {
            -1 => self.mu_minus,
            0 => self.mu_zero,
            1 => self.mu_plus,
            _ => 0.0,
        }
    }
}

/// Closed-form quadratics in `alpha`, accepted on the closed range `[1, 2]`.
pub fn quasi_compact_coefficients(alpha: f64) -> Result<QuasiCompactCoefficients> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(invalid(format!(
            "quasi-compact coefficients need alpha in [1, 2], got {alpha}"
        )));
    }
    let a2 = alpha * alpha;
    Ok(QuasiCompactCoefficients {
        mu_minus: (4.0 - 7.0 * alpha + 3.0 * a2) / 24.0,
        mu_zero: (8.0 + alpha - 3.0 * a2) / 12.0,
        mu_plus: (4.0 + 5.0 * alpha + 3.0 * a2) / 24.0,
    })
}

/// Leading coefficients of the power series of `((1 - e^{-z}) / z)^alpha e^{p z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionCoefficients {
    pub p: i32,
    /// `a_p^{alpha,0}`, `a_p^{alpha,1}`, `a_p^{alpha,2}`.
    pub values: [f64; 3],
}

pub fn expansion_coefficients(alpha: f64, p: i32) -> Result<ExpansionCoefficients> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid(format!("expansion order must lie in (0, 2], got {alpha}")));
    }
    let pf = p as f64;
    Ok(ExpansionCoefficients {
        p,
        values: [
            1.0,
            pf - alpha / 2.0,
            (alpha + 3.0 * alpha * alpha - 12.0 * alpha * pf + 12.0 * pf * pf) / 24.0,
        ],
    })
}

/// Tempered quasi-compact weights `w_0, ..., w_n` for one `(alpha, lambda, h)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightTable {
    pub params: TemperedParams,
    pub h: f64,
    pub values: Vec<f64>,
}

impl WeightTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn partial_sums(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }
}

/// Builds `w_0, ..., w_n`:
///
/// ```text
/// w_0 = mu_1 g_0 e^{lambda h}
/// w_1 = mu_1 g_1 + mu_0 g_0
/// w_k = (mu_1 g_k + mu_0 g_{k-1} + mu_{-1} g_{k-2}) e^{(1-k) lambda h},  k >= 2
/// ```
pub fn tempered_weights(params: &TemperedParams, h: f64, n: usize) -> Result<WeightTable> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("grid spacing must be positive, got {h}")));
    }
    if n < 2 {
        return Err(invalid(format!("weight table needs n >= 2, got {n}")));
    }
    let mu = quasi_compact_coefficients(params.alpha)?;
    let g = grunwald_weights(params.alpha, n)?.values;
    let lh = params.lambda * h;
    let mut values = Vec::with_capacity(n + 1);
    values.push(mu.mu_plus * g[0] * lh.exp());
    values.push(mu.mu_plus * g[1] + mu.mu_zero * g[0]);
    for k in 2..=n {
        let damp = ((1.0 - k as f64) * lh).exp();
        values.push((mu.mu_plus * g[k] + mu.mu_zero * g[k - 1] + mu.mu_minus * g[k - 2]) * damp);
    }
    Ok(WeightTable {
        params: *params,
        h,
        values,
    })
}

/// `sum_{k>=0} w_k = (mu_1 e^{lambda h} + mu_0 + mu_{-1} e^{-lambda h}) (1 - e^{-lambda h})^alpha`.
pub fn weight_sum_limit(params: &TemperedParams, h: f64) -> Result<f64> {
    let mu = quasi_compact_coefficients(params.alpha)?;
    let lh = params.lambda * h;
    Ok((mu.mu_plus * lh.exp() + mu.mu_zero + mu.mu_minus * (-lh).exp())
        * (1.0 - (-lh).exp()).powf(params.alpha))
}

/// Closed form of `w_2`.
pub fn w2_closed_form(alpha: f64, lambda_h: f64) -> f64 {
    let a = alpha;
    (-lambda_h).exp() / 48.0 * (8.0 - 50.0 * a + a * a + 14.0 * a.powi(3) + 3.0 * a.powi(4))
}

/// Closed form of `w_3`; changes sign at the root returned by
/// [`crate::spectral::w3_sign_root`].
pub fn w3_closed_form(alpha: f64, lambda_h: f64) -> f64 {
    let a = alpha;
    -(-2.0 * lambda_h).exp() / 144.0
        * a
        * (80.0 - 86.0 * a - 11.0 * a * a + 14.0 * a.powi(3) + 3.0 * a.powi(4))
}
