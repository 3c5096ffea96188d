// Shared by several integration test files; not every file uses every item.
#![allow(dead_code)]

use std::f64::consts::PI;

use dispersionlab::{Direction, SchemeSpec};
use num_complex::Complex64;

/// Direct double sum over the frequency nodes, written from the quadrature
/// formulas without FFTs.
///
/// Forward: `y_k = 1/(2N) sum_m sum_n x_n exp(-2 pi i q0(eta_m) s_n) exp(2 pi i eta_m s_k)`,
/// inverse: `y_k = 1/(2N) sum_m q0'(eta_m) sum_n x_n exp(-2 pi i eta_m s_n) exp(2 pi i q0(eta_m) s_k)`,
/// with `eta_m = m / (2N)` and `s_n = t0 / dt + n`.
pub fn brute_force(scheme: &SchemeSpec, direction: Direction, nodes: &[i64], t0: f64, x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let two_n = 2.0 * n as f64;
    let s = |k: usize| t0 / scheme.dt() + k as f64;
    let e = |phase: f64| Complex64::from_polar(1.0, 2.0 * PI * phase);
    (0..n)
        .map(|k| {
            let mut acc = Complex64::default();
            for &m in nodes {
                let eta = m as f64 / two_n;
                let (analysis, synthesis, weight) = match direction {
                    Direction::Forward => (scheme.q0(eta), eta, 1.0),
                    Direction::Inverse => (eta, scheme.q0(eta), scheme.q0_prime(eta)),
                    Direction::InverseAlt => unreachable!(),
                };
                let inner: Complex64 = x.iter().enumerate().map(|(j, &v)| v * e(-analysis * s(j))).sum();
                acc += weight * inner * e(synthesis * s(k));
            }
            acc / two_n
        })
        .collect()
}

pub fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Deterministic uniform noise on [-0.5, 0.5).
pub fn noise(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()
}
