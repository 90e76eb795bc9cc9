//! Convergence study over four mesh halvings for the left-sided case.

use tempered_qc::report::render_convergence_table;
use tempered_qc::verification::{run_convergence_study, standard_levels, ManufacturedCase};

fn main() -> tempered_qc::Result<()> {
    for alpha in [1.1, 1.5, 1.9] {
        let case = ManufacturedCase::left_power(alpha, 1.0, 5)?;
        let study = run_convergence_study(&case, &standard_levels(), case.default_coupling())?;
        println!("{}", render_convergence_table(&study));
    }
    Ok(())
}
