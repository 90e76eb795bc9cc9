use proptest::prelude::*;

use tempered_qc::operators::assemble_p;
use tempered_qc::spectral::{
    check_b_bounds, check_p_definiteness, gerschgorin_interval, hplus_split, symbol_range, symmetric_eigenvalues,
    symmetric_part, symmetric_symbol_coefficients, w3_regime, w3_sign_root, Verdict,
};
use tempered_qc::{Error, Grid1D, Side, TemperedParams};

fn setup(alpha: f64, lh: f64, cells: usize) -> (TemperedParams, Grid1D) {
    let grid = Grid1D::new(0.0, 1.0, cells).unwrap();
    (TemperedParams::new(alpha, lh / grid.h, 1.3).unwrap(), grid)
}

#[test]
fn w3_changes_sign_at_the_cubic_root() {
    let root = w3_sign_root();
    assert!((root - 1.764_532_7).abs() < 1e-6);
    assert!(w3_regime(root - 1e-3, 0.5) > 0.0);
    assert!(w3_regime(root + 1e-3, 0.5) < 0.0);
}

#[test]
fn split_is_refused_when_w3_is_nonnegative() {
    let (params, grid) = setup(1.3, 0.5, 20);
    assert!(matches!(hplus_split(&params, &grid), Err(Error::RegimeMismatch { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn system_matrix_is_negative_definite(alpha in 1.01f64..1.99, lh in 0.0f64..=1.0, cells in 4usize..=80) {
        let (params, grid) = setup(alpha, lh, cells);
        let report = check_p_definiteness(&params, &grid, 0.01).unwrap();
        prop_assert_eq!(report.verdict, Verdict::NegativeDefinite, "max eig {}", report.max_eig);
        // Left and right matrices are transposes, so their symmetric parts coincide.
        let left = assemble_p(Side::Left, &params, &grid, 0.01).unwrap();
        let right = assemble_p(Side::Right, &params, &grid, 0.01).unwrap();
        let diff = (symmetric_part(&left.matrix) - symmetric_part(&right.matrix)).abs().max();
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn compact_matrix_spectrum_is_bounded(lh in 0.0f64..=1.0, cells in 4usize..=80) {
        let h = 1.0 / cells as f64;
        let bounds = check_b_bounds(lh / h, h, cells).unwrap();
        prop_assert!(bounds.within_bounds);
        prop_assert!(bounds.closed_form_deviation < 1e-12);
    }

    #[test]
    fn generating_function_brackets_the_spectrum(alpha in 1.01f64..1.99, lh in 0.0f64..=1.0, cells in 4usize..=60) {
        let (params, grid) = setup(alpha, lh, cells);
        let coeffs = symmetric_symbol_coefficients(&params, &grid).unwrap();
        let (lo, hi) = symbol_range(&coeffs, 10_000);
        let n = coeffs.len();
        let sym = nalgebra::DMatrix::from_fn(n, n, |i, j| coeffs[i.abs_diff(j)]);
        let eigs = symmetric_eigenvalues(&sym).unwrap();
        let slack = 1e-9 * lo.abs().max(hi.abs());
        prop_assert!(eigs[0] >= lo - slack && eigs[n - 1] <= hi + slack,
            "[{}, {}] outside [{}, {}]", eigs[0], eigs[n - 1], lo, hi);
        prop_assert!(hi < 0.0);
        let (g_lo, g_hi) = gerschgorin_interval(&sym);
        prop_assert!(g_lo <= eigs[0] + slack && eigs[n - 1] <= g_hi + slack);
    }

    #[test]
    fn hplus_split_satisfies_its_bounds(t in 0.0f64..1.0, lh in 0.0f64..=1.0, cells in 6usize..=60) {
        let alpha = w3_sign_root() + 1e-3 + t * (1.999 - w3_sign_root() - 1e-3);
        let (params, grid) = setup(alpha, lh, cells);
        let split = hplus_split(&params, &grid).unwrap();
        prop_assert!(split.h_c > 0.0);
        prop_assert!((split.h_a + 2.0 * split.h_b + 2.0 * split.h_c).abs() < 1e-12 * split.h_a);
        prop_assert!(split.generating_polynomial(1.0).abs() < 1e-12 * split.h_a);
        for k in 0..=100 {
            let y = -1.0 + 0.02 * k as f64;
            prop_assert!(split.generating_polynomial(y) >= -1e-12 * split.h_a);
        }
        prop_assert!(split.hplus_min_eig >= -1e-10 * split.h_a);
        prop_assert!(split.weyl_bound_holds());
        prop_assert!(split.combined_max_eig < 0.0);
    }
}
