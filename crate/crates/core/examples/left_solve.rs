//! Left-sided tempered diffusion with a manufactured solution, solved on
//! three meshes with tau = h^3.

use tempered_qc::solver1d::solve;
use tempered_qc::verification::{error_norm_1d, Coupling, ManufacturedCase};

fn main() -> tempered_qc::Result<()> {
    let case = ManufacturedCase::left_power(1.5, 1.0, 5)?;
    for h in [0.1, 0.05, 0.025] {
        let sol = solve(&case.problem_1d(h, Coupling::Cubic)?)?;
        let err = error_norm_1d(&sol, |x| case.exact(x, case.horizon()));
        println!("h = {h:<6} steps = {:<6} L2 error = {err:.4e}", sol.time.steps);
    }
    Ok(())
}
