//! Tempered quasi-compact weights and their closed-form checks.

use tempered_qc::calculus::{tempered_weights, w2_closed_form, w3_closed_form, weight_sum_limit};
use tempered_qc::report::render_weights_table;
use tempered_qc::TemperedParams;

fn main() -> tempered_qc::Result<()> {
    let (alpha, lambda, h) = (1.5, 1.0, 0.1);
    let params = TemperedParams::new(alpha, lambda, 1.0)?;
    let table = tempered_weights(&params, h, 8)?;
    print!("{}", render_weights_table(&table)?);

    let lh = lambda * h;
    println!("w2 closed form {:+.12e}", w2_closed_form(alpha, lh));
    println!("w3 closed form {:+.12e}", w3_closed_form(alpha, lh));

    let long = tempered_weights(&params, h, 2000)?;
    let sum: f64 = long.values.iter().sum();
    println!("sum of 2001 weights {sum:+.12e}, limit {:+.12e}", weight_sum_limit(&params, h)?);
    Ok(())
}
