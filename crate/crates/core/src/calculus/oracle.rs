//! Reference evaluators for tempered fractional integrals and derivatives.
//!
//! Everything here works straight from the integral definitions by adaptive
//! quadrature and finite differences, independent of the grid operators.
//! The closed-form power rules give a second, exact route for monomials.

use crate::calculus::quadrature;
use crate::error::{invalid, Error, Result};
use crate::params::{Side, TemperedParams};

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `Gamma(a) / Gamma(a - shift)` through log-Gamma for `a - shift > 0`.
pub fn gamma_ratio(a: f64, shift: f64) -> f64 {
    (libm::lgamma(a) - libm::lgamma(a - shift)).exp()
}

/// Distance from `x` to the endpoint the operator integrates from.
fn reach(side: Side, endpoint: f64, x: f64) -> Result<f64> {
    let d = match side {
        Side::Left => x - endpoint,
        Side::Right => endpoint - x,
    };
    if d < 0.0 || !d.is_finite() {
        return Err(invalid(format!(
            "point {x} lies outside the {side:?}-sided domain with endpoint {endpoint}"
        )));
    }
    Ok(d)
}

fn step(side: Side, x: f64, r: f64) -> f64 {
    match side {
        Side::Left => x - r,
        Side::Right => x + r,
    }
}

/// Tempered fractional integral of order `order > 0`:
///
/// ```text
/// left:  e^{-lambda x} / Gamma(p) int_a^x (x - s)^{p-1} e^{lambda s} u(s) ds
/// right: e^{lambda x}  / Gamma(p) int_x^b (s - x)^{p-1} e^{-lambda s} u(s) ds
/// ```
///
/// Both are evaluated in the distance variable `r = |x - s|`, so the
/// exponentials combine into the bounded factor `e^{-lambda r}`. For `p < 1`
/// the kernel singularity at `r = 0` is removed with `r = w^{1/p}`.
pub fn tempered_integral<F: Fn(f64) -> f64>(
    side: Side,
    order: f64,
    lambda: f64,
    endpoint: f64,
    u: F,
    x: f64,
    tol: f64,
) -> Result<f64> {
    if !(order > 0.0) {
        return Err(invalid(format!("integral order must be positive, got {order}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let len = reach(side, endpoint, x)?;
    if len == 0.0 {
        return Ok(0.0);
    }
    let g = gamma(order);
    let raw = if order < 1.0 {
        let inv = 1.0 / order;
        let upper = len.powf(order);
        let body = |w: f64| {
            let r = w.powf(inv);
            (-lambda * r).exp() * u(step(side, x, r))
        };
        quadrature::integrate(body, 0.0, upper, tol * g * order)? / order
    } else {
        let body = |r: f64| r.powf(order - 1.0) * (-lambda * r).exp() * u(step(side, x, r));
        quadrature::integrate(body, 0.0, len, tol * g)?
    };
    Ok(raw / g)
}

/// Central difference of order `m` (1..=3), fourth-order accurate in `delta`.
fn central_difference<F: Fn(f64) -> Result<f64>>(f: &F, x: f64, delta: f64, m: usize) -> Result<f64> {
    let at = |k: i32| f(x + k as f64 * delta);
    Ok(match m {
        1 => (at(-2)? - 8.0 * at(-1)? + 8.0 * at(1)? - at(2)?) / (12.0 * delta),
        2 => (-at(-2)? + 16.0 * at(-1)? - 30.0 * at(0)? + 16.0 * at(1)? - at(2)?) / (12.0 * delta * delta),
        3 => {
            (at(-3)? - 8.0 * at(-2)? + 13.0 * at(-1)? - 13.0 * at(1)? + 8.0 * at(2)? - at(3)?)
                / (8.0 * delta.powi(3))
        }
        _ => return Err(invalid(format!("derivative order {m} not supported"))),
    })
}

/// Richardson-extrapolated central difference (sixth order in `delta`).
fn extrapolated_difference<F: Fn(f64) -> Result<f64>>(f: &F, x: f64, delta: f64, m: usize) -> Result<f64> {
    let coarse = central_difference(f, x, delta, m)?;
    let fine = central_difference(f, x, 0.5 * delta, m)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

/// Finite-difference spacing: scaled by `tol^{1/4}` and kept far enough from
/// the integration endpoint that every stencil node stays inside the domain.
fn stencil_spacing(tol: f64, room: f64, m: usize) -> Result<f64> {
    let half_width = if m == 3 { 3.0 } else { 2.0 };
    let cap = room / (2.0 * (half_width + 1.0));
    if !(cap > 0.0) {
        return Err(Error::SingularEvaluation(
            "derivative requested at the integration endpoint".into(),
        ));
    }
    Ok((0.5 * tol.powf(0.25)).min(cap))
}

/// Unnormalized tempered Riemann–Liouville derivative of any order `q > 0`
/// with `q <= 3`:
///
/// ```text
/// left:  e^{-lambda x} d^m/dx^m [ e^{lambda x} I_left^{(m-q,lambda)} u ]
/// right: (-1)^m e^{lambda x} d^m/dx^m [ e^{-lambda x} I_right^{(m-q,lambda)} u ]
/// ```
///
/// with `m = ceil(q)`. Integer orders differentiate `u` directly.
pub fn tempered_rl_derivative<F: Fn(f64) -> f64>(
    side: Side,
    order: f64,
    lambda: f64,
    endpoint: f64,
    u: F,
    x: f64,
    tol: f64,
) -> Result<f64> {
    if !(order > 0.0 && order <= 3.0) {
        return Err(invalid(format!("derivative order must lie in (0, 3], got {order}")));
    }
    let room = reach(side, endpoint, x)?;
    let m = order.ceil() as usize;
    let integer = (order - order.round()).abs() < 1e-14;
    let delta = stencil_spacing(tol, room, m)?;
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    // Inner quadrature must beat the finite-difference amplification 1/delta^m.
    let inner_tol = (tol * delta.powi(m as i32) * 1e-3).max(1e-17);
    let value = if integer {
        let f = |y: f64| Ok((sign * lambda * (y - x)).exp() * u(y));
        extrapolated_difference(&f, x, delta, m)?
    } else {
        let mu = m as f64 - order;
        let f = |y: f64| {
            let integral = tempered_integral(side, mu, lambda, endpoint, &u, y, inner_tol)?;
            Ok((sign * lambda * (y - x)).exp() * integral)
        };
        extrapolated_difference(&f, x, delta, m)?
    };
    Ok(if side == Side::Right && m % 2 == 1 {
        -value
    } else {
        value
    })
}

/// Normalized tempered derivative of order `alpha` in `(1, 2)`:
///
/// ```text
/// left:  D^{(alpha,lambda)} u - lambda^alpha u - alpha lambda^{alpha-1} u'
/// right: D^{(alpha,lambda)} u - lambda^alpha u + alpha lambda^{alpha-1} u'
/// ```
///
/// `u'` is taken by finite differences; `tol` is the absolute error target.
pub fn quadrature_oracle<F: Fn(f64) -> f64>(
    side: Side,
    params: &TemperedParams,
    endpoint: f64,
    u: F,
    x: f64,
    tol: f64,
) -> Result<f64> {
    let alpha = params.alpha;
    let lambda = params.lambda;
    let core = tempered_rl_derivative(side, alpha, lambda, endpoint, &u, x, tol)?;
    if lambda == 0.0 {
        return Ok(core);
    }
    let room = reach(side, endpoint, x)?;
    let delta = stencil_spacing(tol, room, 1)?;
    let slope = extrapolated_difference(&|y: f64| Ok(u(y)), x, delta, 1)?;
    let drift = alpha * lambda.powf(alpha - 1.0) * slope;
    let drift = match side {
        Side::Left => -drift,
        Side::Right => drift,
    };
    Ok(core - lambda.powf(alpha) * u(x) + drift)
}

/// Closed-form unnormalized derivative of the tempered monomial
/// `e^{-lambda x}(x-a)^j` (left) or `e^{lambda x}(b-x)^j` (right):
/// `Gamma(1+j)/Gamma(1+j-alpha) e^{-+lambda x} |x - endpoint|^{j-alpha}`.
pub fn exact_power_derivative(
    side: Side,
    params: &TemperedParams,
    endpoint: f64,
    j: u32,
    x: f64,
) -> Result<f64> {
    let alpha = params.alpha;
    let jf = j as f64;
    if jf - alpha <= -1.0 {
        return Err(invalid(format!("power rule needs j - alpha > -1 (j = {j}, alpha = {alpha})")));
    }
    let dist = reach(side, endpoint, x)?;
    if dist == 0.0 && jf < alpha {
        return Err(Error::SingularEvaluation(format!(
            "power rule with j = {j} < alpha = {alpha} is singular at the endpoint"
        )));
    }
    let damp = match side {
        Side::Left => (-params.lambda * x).exp(),
        Side::Right => (params.lambda * x).exp(),
    };
    Ok(gamma(1.0 + jf) / gamma(1.0 + jf - alpha) * damp * dist.powf(jf - alpha))
}

/// The tempered monomial whose derivative [`exact_power_derivative`] gives.
pub fn tempered_monomial(side: Side, lambda: f64, endpoint: f64, j: u32, x: f64) -> f64 {
    match side {
        Side::Left => (-lambda * x).exp() * (x - endpoint).powi(j as i32),
        Side::Right => (lambda * x).exp() * (endpoint - x).powi(j as i32),
    }
}

/// Normalized tempered derivative of the tempered monomial in closed form.
pub fn exact_power_normalized(
    side: Side,
    params: &TemperedParams,
    endpoint: f64,
    j: u32,
    x: f64,
) -> Result<f64> {
    let core = exact_power_derivative(side, params, endpoint, j, x)?;
    let (alpha, lambda) = (params.alpha, params.lambda);
    if lambda == 0.0 {
        return Ok(core);
    }
    let jf = j as f64;
    let value = tempered_monomial(side, lambda, endpoint, j, x);
    let lower = if j == 0 {
        0.0
    } else {
        jf * reach(side, endpoint, x)?.powi(j as i32 - 1)
    };
    let (slope, drift_sign) = match side {
        Side::Left => ((-lambda * x).exp() * lower - lambda * value, -1.0),
        Side::Right => (lambda * value - (lambda * x).exp() * lower, 1.0),
    };
    Ok(core - lambda.powf(alpha) * value + drift_sign * alpha * lambda.powf(alpha - 1.0) * slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(alpha: f64, lambda: f64) -> TemperedParams {
        TemperedParams::new(alpha, lambda, 1.0).unwrap()
    }

    #[test]
    fn power_rule_values() {
        let p = params(1.5, 0.0);
        let v = exact_power_derivative(Side::Left, &p, 0.0, 2, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 / gamma(1.5), max_relative = 1e-14);
        assert_relative_eq!(v, 2.256758, max_relative = 1e-6);

        let p = params(1.3, 0.7);
        let v = exact_power_derivative(Side::Left, &p, 0.0, 0, 0.4).unwrap_or(f64::NAN);
        // j = 0 violates j - alpha > -1.
        assert!(v.is_nan());
    }

    #[test]
    fn power_rule_singular_at_endpoint() {
        let p = params(1.5, 1.0);
        assert!(matches!(
            exact_power_derivative(Side::Left, &p, 0.0, 1, 0.0),
            Err(Error::SingularEvaluation(_))
        ));
        assert_eq!(exact_power_derivative(Side::Left, &p, 0.0, 3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn integral_of_order_one_is_plain_integral() {
        let v = tempered_integral(Side::Left, 1.0, 0.0, 0.0, f64::cos, 1.2, 1e-13).unwrap();
        assert!((v - 1.2f64.sin()).abs() < 1e-13);
        let v = tempered_integral(Side::Right, 1.0, 0.0, 2.0, f64::cos, 0.5, 1e-13).unwrap();
        assert!((v - (2f64.sin() - 0.5f64.sin())).abs() < 1e-13);
    }

    #[test]
    fn integral_mirror_symmetry() {
        let (a, b) = (0.0, 1.0);
        let u = |x: f64| (3.0 * x).sin() + x * x;
        let mirrored = |x: f64| u(a + b - x);
        for &x in &[0.2, 0.55, 0.9] {
            let right = tempered_integral(Side::Right, 0.6, 0.8, b, u, x, 1e-12).unwrap();
            let left = tempered_integral(Side::Left, 0.6, 0.8, a, mirrored, a + b - x, 1e-12).unwrap();
            assert!((right - left).abs() < 1e-12);
        }
    }

    #[test]
    fn untempered_monomial_derivative() {
        let p = params(1.5, 0.0);
        let x = 0.7;
        let v = quadrature_oracle(Side::Left, &p, 0.0, |s: f64| s.powi(3), x, 1e-8).unwrap();
        let exact = gamma(4.0) / gamma(2.5) * x.powf(1.5);
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
    }

    #[test]
    fn oracle_matches_normalized_power_rule() {
        let p = params(1.5, 1.0);
        let x = 0.6;
        let u = |s: f64| tempered_monomial(Side::Left, 1.0, 0.0, 5, s);
        let v = quadrature_oracle(Side::Left, &p, 0.0, u, x, 1e-7).unwrap();
        let exact = exact_power_normalized(Side::Left, &p, 0.0, 5, x).unwrap();
        assert!((v - exact).abs() < 1e-7, "{v} vs {exact}");

        let u = |s: f64| tempered_monomial(Side::Right, 1.0, 1.0, 5, s);
        let x = 0.5;
        let raw = tempered_rl_derivative(Side::Right, 1.5, 1.0, 1.0, u, x, 1e-8).unwrap();
        let exact = exact_power_derivative(Side::Right, &p, 1.0, 5, x).unwrap();
        assert!((raw - exact).abs() < 1e-8, "{raw} vs {exact}");
    }

    #[test]
    fn integer_order_derivative() {
        // D^{(1,lambda)} u = lambda u + u' on the left, lambda u - u' on the right.
        let lambda = 0.9;
        let x = 0.4;
        let left = tempered_rl_derivative(Side::Left, 1.0, lambda, 0.0, f64::sin, x, 1e-10).unwrap();
        assert!((left - (lambda * x.sin() + x.cos())).abs() < 1e-9);
        let right = tempered_rl_derivative(Side::Right, 1.0, lambda, 1.0, f64::sin, x, 1e-10).unwrap();
        assert!((right - (lambda * x.sin() - x.cos())).abs() < 1e-9);
    }

    #[test]
    fn derivative_at_endpoint_is_singular() {
        let p = params(1.5, 1.0);
        assert!(quadrature_oracle(Side::Left, &p, 0.0, f64::sin, 0.0, 1e-7).is_err());
    }
}
