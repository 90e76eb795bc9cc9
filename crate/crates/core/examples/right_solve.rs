//! A right-sided problem built by hand: a bump released under a right
//! tempered derivative with a nonzero trace at the left end.

use tempered_qc::solver1d::{solve, ProblemSide, ProblemSpec1D};
use tempered_qc::{Grid1D, TemperedParams, TimeGrid};

fn main() -> tempered_qc::Result<()> {
    let grid = Grid1D::new(0.0, 1.0, 40)?;
    let time = TimeGrid::new(0.05, 50)?;
    let params = TemperedParams::new(1.6, 5.0, 1.0)?;
    let spec = ProblemSpec1D::new(grid, time, params, ProblemSide::Right)
        .with_initial(|x| (-(x - 0.6f64).powi(2) / 0.01).exp() * (1.0 - x))
        .with_boundary_left(|t| 0.2 * t / 0.05);
    let sol = solve(&spec)?;
    for (x, u) in grid.nodes().iter().zip(&sol.values).step_by(5) {
        println!("x = {x:.3}  u = {u:+.6e}");
    }
    Ok(())
}
