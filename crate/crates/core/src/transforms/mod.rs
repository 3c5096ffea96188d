//! Discrete forward and inverse time dispersion transforms.
//!
//! Both transforms are quadratures over a frequency grid `omega_m = m / (2 N dt)`.
//! The forward transform (FTDT) pre-distorts a source so that a finite-difference
//! solve sees the right frequencies:
//!
//! ```text
//! b_m  = dt * sum_n f_n exp(-2 pi i q(omega_m) t_n)
//! g(t) = d_omega * sum_m b_m exp(2 pi i omega_m t)
//! ```
//!
//! The inverse transform (ITDT) maps the finite-difference solution back:
//!
//! ```text
//! a_m  = dt * sum_n v_n exp(-2 pi i omega_m t_n)
//! u(t) = d_omega * sum_m a_m q'(omega_m) exp(2 pi i q(omega_m) t)
//! ```
//!
//! With `d_omega = 1 / (2 N dt)` one of the two sums in each transform is a
//! length-`2N` DFT, which is how the dense matrices are built.

mod grid;
mod matrix;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scheme::{SchemeKind, SchemeSpec};
use crate::series::{Sample, TimeSeries};

pub use grid::FrequencyGrid;
pub use matrix::Matrix;

/// Largest `N` for which operators are stored as dense matrices.
pub const DENSE_LIMIT: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
    /// Inverse transform written as a sum over `q(Omega)`, central scheme only.
    InverseAlt,
}

impl std::str::FromStr for Direction {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" | "ftdt" => Ok(Self::Forward),
            "inverse" | "itdt" => Ok(Self::Inverse),
            "inverse_alt" | "inverse-alt" => Ok(Self::InverseAlt),
            other => invalid(format!("unknown direction {other:?}")),
        }
    }
}

/// One quadrature node. Phases are in cycles per sample.
#[derive(Debug, Clone, Copy)]
struct Node {
    bin: usize,
    analysis: f64,
    synthesis: f64,
    weight: f64,
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(Matrix),
    MatrixFree,
}

/// A discrete FTDT or ITDT for a fixed scheme, length and time origin.
#[derive(Clone)]
pub struct TransformOperator {
    direction: Direction,
    scheme: SchemeSpec,
    n: usize,
    t0: f64,
    grid: FrequencyGrid,
    nodes: Vec<Node>,
    storage: Storage,
}

impl std::fmt::Debug for TransformOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformOperator")
            .field("direction", &self.direction)
            .field("scheme", &self.scheme.name())
            .field("n", &self.n)
            .field("t0", &self.t0)
            .field("dense", &self.matrix().is_some())
            .finish()
    }
}

/// Builds the operator for samples at `n dt`, `n = 0..N`.
pub fn build_operator(scheme: &SchemeSpec, n: usize, direction: Direction) -> Result<TransformOperator> {
    TransformOperator::new(scheme, n, direction, 0.0)
}

/// The alternative ITDT, a quadrature over `xi_m = m / (2 N dt)` with `|m| <= N / pi`.
pub fn build_alt_inverse(scheme: &SchemeSpec, n: usize) -> Result<TransformOperator> {
    TransformOperator::new(scheme, n, Direction::InverseAlt, 0.0)
}

impl TransformOperator {
    /// Builds an operator for samples at `t0 + n dt`.
    ///
    /// The transforms are not shift invariant, so traces recorded at half
    /// steps need `t0 = dt / 2`.
    pub fn new(scheme: &SchemeSpec, n: usize, direction: Direction, t0: f64) -> Result<Self> {
        Self::with_storage(scheme, n, direction, t0, n <= DENSE_LIMIT)
    }

    /// Like [`TransformOperator::new`] but never materializes the matrix.
    pub fn matrix_free(scheme: &SchemeSpec, n: usize, direction: Direction, t0: f64) -> Result<Self> {
        Self::with_storage(scheme, n, direction, t0, false)
    }

    fn with_storage(scheme: &SchemeSpec, n: usize, direction: Direction, t0: f64, dense: bool) -> Result<Self> {
        if n < 2 {
            return invalid(format!("transform length must be at least 2, got {n}"));
        }
        if scheme.kind() == SchemeKind::Central && !n.is_multiple_of(2) {
            return invalid(format!("central-difference transforms need an even length, got {n}"));
        }
        if direction == Direction::InverseAlt && scheme.kind() != SchemeKind::Central {
            return invalid("the alternative inverse transform is only defined for the central scheme");
        }
        if !t0.is_finite() {
            return invalid("time origin must be finite");
        }
        let grid = FrequencyGrid::new(scheme, n, direction);
        let dt = scheme.dt();
        let two_n = 2.0 * n as f64;
        let nodes = grid
            .indices()
            .iter()
            .map(|&m| {
                let uniform = m as f64 / two_n;
                let omega = grid.omega(m);
                let (analysis, synthesis, weight) = match direction {
                    Direction::Forward => (scheme.q_raw(omega) * dt, uniform, 1.0),
                    Direction::Inverse => (uniform, scheme.q_raw(omega) * dt, scheme.q_prime_raw(omega)),
                    Direction::InverseAlt => (scheme.q_inv_raw(omega) * dt, uniform, 1.0),
                };
                Node { bin: grid.bin(m), analysis, synthesis, weight }
            })
            .collect();
        let mut op = Self {
            direction,
            scheme: scheme.clone(),
            n,
            t0,
            grid,
            nodes,
            storage: Storage::MatrixFree,
        };
        if dense {
            op.storage = Storage::Dense(op.assemble());
        }
        Ok(op)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn scheme(&self) -> &SchemeSpec {
        &self.scheme
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// The dense matrix, if materialized.
    pub fn matrix(&self) -> Option<&Matrix> {
        match &self.storage {
            Storage::Dense(m) => Some(m),
            Storage::MatrixFree => None,
        }
    }

    fn offset(&self) -> f64 {
        self.t0 / self.scheme.dt()
    }

    fn analysis_is_uniform(&self) -> bool {
        self.direction == Direction::Inverse
    }

    fn assemble(&self) -> Matrix {
        let n = self.n;
        let two_n = 2 * n;
        let s = self.offset();
        let fft = self.plan(two_n);
        let scale = 1.0 / two_n as f64;
        // Each line is a row (uniform analysis) or a column (uniform synthesis).
        let mut lines = vec![0.0; n * n];
        lines.par_chunks_mut(n).enumerate().for_each_init(
            || vec![Complex64::default(); two_n],
            |buf, (j, line)| {
                buf.fill(Complex64::default());
                let j = j as f64 + s;
                for node in &self.nodes {
                    let phase = if self.analysis_is_uniform() {
                        cycles(node.synthesis, j) - cycles(node.analysis, s)
                    } else {
                        cycles(node.synthesis, s) - cycles(node.analysis, j)
                    };
                    buf[node.bin] += node.weight * expi(phase);
                }
                fft.process(buf);
                for (out, z) in line.iter_mut().zip(buf.iter()) {
                    *out = z.re * scale;
                }
            },
        );
        if self.analysis_is_uniform() {
            Matrix::from_rows(n, lines)
        } else {
            let mut m = Matrix::zeros(n);
            let data = m.data_mut();
            data.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
                for (col, out) in row.iter_mut().enumerate() {
                    *out = lines[col * n + k];
                }
            });
            m
        }
    }

    /// Forward FFT for uniform analysis, unnormalized inverse otherwise.
    fn plan(&self, len: usize) -> Arc<dyn Fft<f64>> {
        let mut planner = FftPlanner::new();
        if self.analysis_is_uniform() {
            planner.plan_fft_forward(len)
        } else {
            planner.plan_fft_inverse(len)
        }
    }

    /// Applies the operator to a sampled signal.
    ///
    /// The series must have `N` samples, exactly the scheme's `dt`, and the
    /// origin the operator was built for.
    pub fn apply<T: Sample>(&self, x: &TimeSeries<T>) -> Result<TimeSeries<T>> {
        self.check(x)?;
        let y = match &self.storage {
            Storage::Dense(m) => m.apply(x.samples()),
            Storage::MatrixFree => self.apply_matrix_free(x.samples()),
        };
        Ok(x.with_samples(y))
    }

    /// Applies the operator to many traces in parallel.
    pub fn apply_many<T: Sample>(&self, xs: &[TimeSeries<T>]) -> Result<Vec<TimeSeries<T>>> {
        xs.par_iter().map(|x| self.apply(x)).collect()
    }

    /// Evaluates the quadrature sums without the matrix, one FFT plus an
    /// `O(N M)` non-uniform sum per call.
    pub fn apply_direct<T: Sample>(&self, x: &TimeSeries<T>) -> Result<TimeSeries<T>> {
        self.check(x)?;
        Ok(x.with_samples(self.apply_matrix_free(x.samples())))
    }

    fn check<T: Sample>(&self, x: &TimeSeries<T>) -> Result<()> {
        if x.len() != self.n {
            return invalid(format!("operator expects {} samples, got {}", self.n, x.len()));
        }
        if x.dt() != self.scheme.dt() {
            return invalid(format!("series dt {} differs from scheme dt {}", x.dt(), self.scheme.dt()));
        }
        if (x.t0() - self.t0).abs() > 1e-9 * self.scheme.dt() {
            return invalid(format!("series origin {} differs from operator origin {}", x.t0(), self.t0));
        }
        Ok(())
    }

    fn apply_matrix_free<T: Sample>(&self, x: &[T]) -> Vec<T> {
        let z: Vec<Complex64> = x.iter().map(|v| v.to_complex()).collect();
        let re = self.real_matrix_free(&z.iter().map(|z| z.re).collect::<Vec<_>>());
        let im = if z.iter().any(|z| z.im != 0.0) {
            self.real_matrix_free(&z.iter().map(|z| z.im).collect::<Vec<_>>())
        } else {
            vec![0.0; self.n]
        };
        re.into_iter().zip(im).map(|(a, b)| T::from_complex(Complex64::new(a, b))).collect()
    }

    /// `Re(K x)` for real `x`, which equals the dense real matrix applied to `x`.
    fn real_matrix_free(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let two_n = 2 * n;
        let s = self.offset();
        let scale = 1.0 / two_n as f64;
        let fft = self.plan(two_n);
        if self.analysis_is_uniform() {
            let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            buf.resize(two_n, Complex64::default());
            fft.process(&mut buf);
            let coeffs: Vec<(Complex64, f64)> = self
                .nodes
                .iter()
                .map(|nd| (buf[nd.bin] * nd.weight * expi(-cycles(nd.analysis, s)), nd.synthesis))
                .collect();
            let mut out = vec![0.0; n];
            out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
                let k0 = (c * CHUNK) as f64 + s;
                let mut acc = vec![Complex64::default(); chunk.len()];
                for &(coef, theta) in &coeffs {
                    let mut p = coef * expi(cycles(theta, k0));
                    let r = expi(theta);
                    for a in acc.iter_mut() {
                        *a += p;
                        p *= r;
                    }
                }
                for (o, a) in chunk.iter_mut().zip(acc) {
                    *o = a.re * scale;
                }
            });
            out
        } else {
            let sums: Vec<Complex64> = self
                .nodes
                .par_iter()
                .map(|nd| {
                    let r = expi(-nd.analysis);
                    let mut total = Complex64::default();
                    for (c, chunk) in x.chunks(CHUNK).enumerate() {
                        let mut p = expi(-cycles(nd.analysis, (c * CHUNK) as f64 + s));
                        for &v in chunk {
                            total += p * v;
                            p *= r;
                        }
                    }
                    total * nd.weight * expi(cycles(nd.synthesis, s))
                })
                .collect();
            let mut buf = vec![Complex64::default(); two_n];
            for (nd, b) in self.nodes.iter().zip(sums) {
                buf[nd.bin] += b;
            }
            fft.process(&mut buf);
            buf[..n].iter().map(|z| z.re * scale).collect()
        }
    }
}

/// Block length between exact phase evaluations in the recurrences.
const CHUNK: usize = 64;

/// `theta * j` reduced to `[-1/2, 1/2]` cycles.
fn cycles(theta: f64, j: f64) -> f64 {
    let x = theta * j;
    x - x.round()
}

fn expi(cycles: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * cycles).sin_cos();
    Complex64::new(c, s)
}

/// Multiplies the final `fraction` of the record by `(1 + cos(pi s)) / 2`,
/// with `s` running linearly from 0 to 1 over the tapered samples.
pub fn taper<T: Sample>(x: &TimeSeries<T>, fraction: f64) -> Result<TimeSeries<T>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return invalid(format!("taper fraction must lie in (0, 1), got {fraction}"));
    }
    let n = x.len();
    let count = ((fraction * n as f64).round() as usize).clamp(1, n);
    let start = n - count;
    let mut samples = x.samples().to_vec();
    for (i, v) in samples[start..].iter_mut().enumerate() {
        let s = if count == 1 { 1.0 } else { i as f64 / (count - 1) as f64 };
        *v = *v * taper_weight(s);
    }
    Ok(x.with_samples(samples))
}

/// The raised-cosine taper profile on `s` in `[0, 1]`.
pub fn taper_weight(s: f64) -> f64 {
    0.5 * (1.0 + (PI * s.clamp(0.0, 1.0)).cos())
}

/// One period of the non-matching-scheme kernel
/// `G(t) = d_omega * sum_m (2 pi i q~(omega_m) + C) / (2 pi i q(omega_m) + C) exp(2 pi i omega_m t)`
/// sampled at `t = k dt`, `k = 0..2N`.
///
/// The sum runs over the inverse-transform grid of `main`. `G` has period
/// `2 N dt`; negative lags wrap around.
pub fn g_kernel(main: &SchemeSpec, aux: &SchemeSpec, c: f64, n: usize) -> Result<TimeSeries<Complex64>> {
    if !c.is_finite() {
        return invalid("rate constant must be finite");
    }
    kernel(main, aux, n, |q, q_aux, _| {
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        (two_pi_i * q_aux + c) / (two_pi_i * q + c)
    })
}

/// The ratio form `G(t) = d_omega * sum_m q~(omega_m) / q(omega_m) exp(2 pi i omega_m t)`,
/// with `q~'(0) / q'(0)` at `omega = 0`.
pub fn g_kernel_ratio(main: &SchemeSpec, aux: &SchemeSpec, n: usize) -> Result<TimeSeries<Complex64>> {
    kernel(main, aux, n, |q, q_aux, omega| {
        if omega == 0.0 {
            Complex64::new(aux.q_prime_raw(0.0) / main.q_prime_raw(0.0), 0.0)
        } else {
            Complex64::new(q_aux / q, 0.0)
        }
    })
}

fn kernel(
    main: &SchemeSpec,
    aux: &SchemeSpec,
    n: usize,
    ratio: impl Fn(f64, f64, f64) -> Complex64,
) -> Result<TimeSeries<Complex64>> {
    if main.dt() != aux.dt() {
        return invalid(format!("schemes disagree on dt: {} vs {}", main.dt(), aux.dt()));
    }
    if aux.omega_max() < main.omega_max() * (1.0 - 1e-12) {
        return invalid("auxiliary scheme is not defined on the main scheme's frequency window");
    }
    if n < 2 || (main.kind() == SchemeKind::Central && !n.is_multiple_of(2)) {
        return invalid(format!("invalid kernel length {n}"));
    }
    let grid = FrequencyGrid::new(main, n, Direction::Inverse);
    let two_n = 2 * n;
    let mut buf = vec![Complex64::default(); two_n];
    for &m in grid.indices() {
        let omega = grid.omega(m);
        let value = ratio(main.q_raw(omega), aux.q_raw(omega.clamp(-aux.omega_max(), aux.omega_max())), omega);
        if !value.is_finite() {
            return Err(crate::Error::Numeric(format!("kernel symbol is singular at omega = {omega}")));
        }
        buf[grid.bin(m)] += value;
    }
    FftPlanner::new().plan_fft_inverse(two_n).process(&mut buf);
    let d_omega = grid.spacing();
    let samples = buf.into_iter().map(|z| z * d_omega).collect();
    TimeSeries::new(samples, main.dt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central() -> SchemeSpec {
        SchemeSpec::central_difference(0.02).unwrap()
    }

    #[test]
    fn rejects_odd_central_and_short() {
        assert!(build_operator(&central(), 101, Direction::Forward).is_err());
        assert!(build_operator(&central(), 1, Direction::Inverse).is_err());
        let lf = SchemeSpec::leapfrog(0.02).unwrap();
        assert!(build_operator(&lf, 101, Direction::Forward).is_ok());
        assert!(build_alt_inverse(&lf, 100).is_err());
    }

    #[test]
    fn alt_inverse_node_count() {
        let op = build_alt_inverse(&SchemeSpec::central_difference(0.02).unwrap(), 1000).unwrap();
        assert_eq!(*op.grid().indices().last().unwrap(), 318);
        assert_eq!(op.grid().indices().len(), 2 * 318 + 1);
    }

    #[test]
    fn grids_follow_the_scheme() {
        let c = FrequencyGrid::new(&central(), 10, Direction::Forward);
        assert_eq!(c.indices(), &[-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5]);
        let lf = SchemeSpec::leapfrog(0.02).unwrap();
        let inv = FrequencyGrid::new(&lf, 4, Direction::Inverse);
        assert_eq!(inv.indices(), &[-3, -2, -1, 0, 1, 2, 3, 4]);
        let fwd = FrequencyGrid::new(&lf, 4, Direction::Forward);
        assert_eq!(fwd.indices(), &[-4, -3, -2, -1, 0, 1, 2, 3]);
    }

    #[test]
    fn dense_and_matrix_free_agree() {
        let lf = SchemeSpec::leapfrog(0.01).unwrap();
        for (scheme, n) in [(central(), 200), (lf, 150)] {
            for dir in [Direction::Forward, Direction::Inverse] {
                for t0 in [0.0, 0.5 * scheme.dt()] {
                    let dense = TransformOperator::new(&scheme, n, dir, t0).unwrap();
                    let free = TransformOperator::matrix_free(&scheme, n, dir, t0).unwrap();
                    let x = TimeSeries::from_fn(n, scheme.dt(), t0, |t| {
                        Complex64::new((-(t - 1.0).powi(2) * 20.0).exp(), (3.0 * t).sin())
                    })
                    .unwrap();
                    let a = dense.apply(&x).unwrap();
                    let b = free.apply(&x).unwrap();
                    let err = crate::series::max_abs_diff(a.samples(), b.samples());
                    assert!(err < 1e-12, "{dir:?} {t0}: {err}");
                }
            }
        }
    }

    #[test]
    fn apply_checks_length_dt_and_origin() {
        let op = build_operator(&central(), 100, Direction::Inverse).unwrap();
        assert!(op.apply(&TimeSeries::<f64>::zeros(99, 0.02).unwrap()).is_err());
        assert!(op.apply(&TimeSeries::<f64>::zeros(100, 0.01).unwrap()).is_err());
        let shifted = TimeSeries::with_origin(vec![0.0; 100], 0.02, 0.01).unwrap();
        assert!(op.apply(&shifted).is_err());
        let y = op.apply(&TimeSeries::<f64>::zeros(100, 0.02).unwrap()).unwrap();
        assert!(y.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn taper_profile() {
        let x = TimeSeries::new(vec![1.0; 1000], 0.02).unwrap();
        let y = taper(&x, 0.1).unwrap();
        assert!(y.samples()[..900].iter().all(|&v| v == 1.0));
        assert_eq!(y.samples()[999], 0.0);
        let z = taper(&x, 0.101).unwrap();
        assert!((z.samples()[949] - 0.5).abs() < 1e-15);
        assert!(taper(&x, 0.0).is_err());
        assert!(taper(&x, 1.0).is_err());
    }

    #[test]
    fn matching_schemes_give_the_grid_delta() {
        let s = central();
        let n = 200;
        let g = g_kernel(&s, &s, 3.0, n).unwrap();
        let grid = FrequencyGrid::new(&s, n, Direction::Inverse);
        for k in [0usize, 1, 7, 200, 399] {
            let t = k as f64 * s.dt();
            let direct: Complex64 =
                grid.indices().iter().map(|&m| expi(grid.omega(m) * t)).sum::<Complex64>() * grid.spacing();
            assert!((g.samples()[k] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_rejects_mismatched_dt() {
        let a = SchemeSpec::central_difference(0.02).unwrap();
        let b = SchemeSpec::leapfrog(0.01).unwrap();
        assert!(g_kernel(&a, &b, 1.0, 100).is_err());
        // leapfrog's window is wider than the central one, but not the reverse
        let lf = SchemeSpec::leapfrog(0.02).unwrap();
        assert!(g_kernel(&a, &lf, 1.0, 100).is_ok());
        assert!(g_kernel(&lf, &a, 1.0, 100).is_err());
    }
}
