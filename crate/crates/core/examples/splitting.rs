//! Two-sided tempered diffusion by operator splitting.

use tempered_qc::report::render_convergence_table;
use tempered_qc::verification::{run_convergence_study, ManufacturedCase};

fn main() -> tempered_qc::Result<()> {
    let case = ManufacturedCase::two_sided(1.5, 0.1)?;
    let study = run_convergence_study(&case, &[0.1, 0.05, 0.025], case.default_coupling())?;
    println!("{}", render_convergence_table(&study));
    Ok(())
}
