//! Two-dimensional tempered diffusion by the ADI scheme with tau = h^{3/2}.

use tempered_qc::report::render_convergence_table;
use tempered_qc::verification::{run_convergence_study, standard_levels, Coupling, ManufacturedCase};

fn main() -> tempered_qc::Result<()> {
    let case = ManufacturedCase::adi_2d(1.2, 1.5, 0.1)?;
    let study = run_convergence_study(&case, &standard_levels(), Coupling::ThreeHalves)?;
    println!("{}", render_convergence_table(&study));
    Ok(())
}
