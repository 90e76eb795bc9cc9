//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Maximum bisection depth before reporting non-convergence.
pub const MAX_DEPTH: usize = 120;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Returns `(kronrod estimate, |kronrod - gauss|, integral of |f|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs(), abs * half.abs())
}

struct Panel {
    lo: f64,
    hi: f64,
    depth: usize,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over `[a, b]` to absolute accuracy `tol`.
///
/// Globally adaptive: the panel with the largest error estimate is bisected
/// until the summed estimate drops below `tol` (or below the rounding floor of
/// the integral of `|f|`). A panel that would need more than [`MAX_DEPTH`]
/// bisections makes the whole call fail.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    let push = |heap: &mut BinaryHeap<Panel>, lo: f64, hi: f64, depth: usize| -> Result<(f64, f64)> {
        let (value, err, abs) = gk15(&f, lo, hi);
        if !value.is_finite() {
            return Err(Error::SingularEvaluation(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        heap.push(Panel { lo, hi, depth, value, err, abs });
        Ok((err, abs))
    };
    let (e, abs) = push(&mut heap, a, b, 0)?;
    total_err += e;
    total_abs += abs;
    loop {
        let floor = 64.0 * f64::EPSILON * total_abs;
        if total_err <= tol.max(floor) {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        if worst.depth >= MAX_DEPTH {
            return Err(Error::QuadratureNonConvergence {
                depth: worst.depth,
                estimate: total_err,
                target: tol,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (e1, a1) = push(&mut heap, worst.lo, mid, worst.depth + 1)?;
        let (e2, a2) = push(&mut heap, mid, worst.hi, worst.depth + 1)?;
        total_err += e1 + e2 - worst.err;
        total_abs += a1 + a2 - worst.abs;
    }
    // Kahan summation keeps many small panels from eroding accuracy.
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for p in heap.into_vec() {
        let y = p.value - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}
