//! Spectral diagnostics of the discrete operators, and a run that violates
//! the lambda h <= 1 condition.

use tempered_qc::spectral::{check_b_bounds, check_p_definiteness, hplus_split, w3_sign_root};
use tempered_qc::verification::{solve_and_measure, Coupling, ManufacturedCase};
use tempered_qc::{Grid1D, TemperedParams};

fn main() -> tempered_qc::Result<()> {
    let grid = Grid1D::new(0.0, 1.0, 40)?;
    for (alpha, lambda) in [(1.2, 10.0), (1.9, 40.0)] {
        let params = TemperedParams::new(alpha, lambda, 1.0)?;
        let p = check_p_definiteness(&params, &grid, grid.h.powi(3))?;
        let b = check_b_bounds(lambda, grid.h, grid.cells)?;
        println!(
            "alpha {alpha}, lambda h {}: sym(P) spectrum [{:.3e}, {:.3e}] {:?}; sym(B) in [{:.4}, {:.4}]",
            lambda * grid.h,
            p.min_eig,
            p.max_eig,
            p.verdict,
            b.report.min_eig,
            b.report.max_eig
        );
        if alpha > w3_sign_root() {
            let split = hplus_split(&params, &grid)?;
            println!(
                "  H+ split: diagonally dominant {}, Weyl bound holds {}",
                split.combined_diagonally_dominant,
                split.weyl_bound_holds()
            );
        }
    }

    let case = ManufacturedCase::left_power(1.9, 50.0, 5)?;
    let level = solve_and_measure(&case, 0.1, Coupling::Cubic)?;
    println!("lambda h = 5: error {:e} ({})", level.error, level.failure.unwrap_or_default());
    Ok(())
}
