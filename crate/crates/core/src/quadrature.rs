//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd-indexed Kronrod nodes, center last.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Intervals are bisected until the 7/15-point difference falls below their
/// share of `tol`, or below the rounding floor of the 15-point rule.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::default());
    }
    if !(a.is_finite() && b.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bad integration range [{a}, {b}] or tolerance {tol}")));
    }
    let width = (b - a).abs();
    let mut total = Complex64::default();
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (k, err, abs) = gk15(&f, lo, hi);
        let share = tol * (hi - lo).abs() / width;
        if err <= share || err <= 50.0 * f64::EPSILON * abs {
            total += k;
            continue;
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Numeric(format!(
                "quadrature did not converge on [{lo}, {hi}] (error estimate {err:e})"
            )));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((mid, hi, depth + 1));
        stack.push((lo, mid, depth + 1));
    }
    if !total.is_finite() {
        return Err(Error::Numeric("integrand produced a non-finite value".into()));
    }
    Ok(total)
}

/// Kronrod estimate, `|K15 - G7|`, and the Kronrod estimate of `int |f|`.
fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        kronrod += (f1 + f2) * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let k = kronrod * h;
    (k, (k - gauss * h).norm(), abs * h.abs())
}
