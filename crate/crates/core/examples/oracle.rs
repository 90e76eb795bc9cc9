//! Quadrature evaluation of tempered derivatives compared with the power rule.

use tempered_qc::calculus::{exact_power_normalized, quadrature_oracle, tempered_monomial};
use tempered_qc::{Side, TemperedParams};

fn main() -> tempered_qc::Result<()> {
    let params = TemperedParams::new(1.7, 2.0, 1.0)?;
    for side in [Side::Left, Side::Right] {
        let endpoint = if side == Side::Left { 0.0 } else { 1.0 };
        for x in [0.25, 0.5, 0.75] {
            let u = |s: f64| tempered_monomial(side, params.lambda, endpoint, 4, s);
            let numeric = quadrature_oracle(side, &params, endpoint, u, x, 1e-10)?;
            let exact = exact_power_normalized(side, &params, endpoint, 4, x)?;
            println!("{side:?} x = {x}: quadrature {numeric:+.10e}, closed form {exact:+.10e}, diff {:.1e}", numeric - exact);
        }
    }
    Ok(())
}
