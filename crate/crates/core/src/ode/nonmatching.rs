//! A 2x2 system whose second equation uses a different time stencil.
//!
//! ```text
//! u1' = L11 u1 + L12 u2 + f1
//! u2' = L21 u1 - C u2
//! ```
//!
//! The first equation is discretized with central differences, the second
//! with the leapfrog stencil. After `v_i = FTDT(u_i)` the first equation
//! holds exactly, the second only once `L21 v1` is convolved with `G`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{exp_convolution, GaussianSource, ORACLE_TOL};
use crate::error::{invalid, Result};
use crate::scheme::{SchemeKind, SchemeSpec};
use crate::transforms::{g_kernel, Direction, FrequencyGrid};

/// Constant coefficients of the toy system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToySystem {
    pub l11: f64,
    pub l12: f64,
    pub l21: f64,
    pub c: f64,
}

impl Default for ToySystem {
    /// Eigenvalues -2 and -5.
    fn default() -> Self {
        Self { l11: -3.0, l12: 1.0, l21: 2.0, c: 4.0 }
    }
}

impl ToySystem {
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let (a, d) = (self.l11, -self.c);
        let tr = a + d;
        let disc = Complex64::new((a - d).powi(2) + 4.0 * self.l12 * self.l21, 0.0).sqrt();
        [(tr + disc) * 0.5, (tr - disc) * 0.5]
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.l11, self.l12, self.l21, self.c].iter().all(|x| x.is_finite()) {
            return invalid("toy system coefficients must be finite");
        }
        let [l1, l2] = self.eigenvalues();
        if l1.re > 0.0 || l2.re > 0.0 {
            return invalid(format!("toy system is unstable: eigenvalues {l1} and {l2}"));
        }
        if (l1 - l2).norm() < 1e-9 * (1.0 + l1.norm()) {
            return invalid("toy system needs distinct eigenvalues");
        }
        Ok(())
    }

    /// Solution driven by `f1 = amplitude * src`, from zero data.
    fn solve(&self, src: &GaussianSource, amplitude: f64, t: f64) -> Result<[Complex64; 2]> {
        if amplitude == 0.0 {
            return Ok([Complex64::default(); 2]);
        }
        let lam = self.eigenvalues();
        let mut u = [Complex64::default(); 2];
        for k in 0..2 {
            let other = lam[1 - k];
            let denom = lam[k] - other;
            // first column of the spectral projector (L - other) / (lam_k - other)
            let p0 = (Complex64::new(self.l11, 0.0) - other) / denom;
            let p1 = Complex64::new(self.l21, 0.0) / denom;
            let conv = exp_convolution(src, lam[k], t, ORACLE_TOL)? * amplitude;
            u[0] += p0 * conv;
            u[1] += p1 * conv;
        }
        Ok(u)
    }
}

/// Which stencil discretizes the auxiliary equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxStencil {
    Leapfrog,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonmatchingSetup {
    pub system: ToySystem,
    pub source: GaussianSource,
    /// Forcing scale; 0 gives the zero solution.
    pub amplitude: f64,
    pub n: usize,
    pub dt: f64,
    pub aux: AuxStencil,
}

impl Default for NonmatchingSetup {
    fn default() -> Self {
        Self {
            system: ToySystem::default(),
            source: GaussianSource { mu: 5.0, sigma2: 0.1, a: 0.0 },
            amplitude: 1.0,
            n: 1000,
            dt: 0.02,
            aux: AuxStencil::Leapfrog,
        }
    }
}

/// Maximum residuals over the record `t = k dt`, `k = 0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonmatchingReport {
    pub residual_main: f64,
    pub residual_aux_with_g: f64,
    pub residual_aux_without_g: f64,
    /// `max |v2|`, for scale.
    pub v2_max: f64,
}

/// Checks the transformed equations on `v_i = FTDT(u_i)`.
///
/// The `v_i` are evaluated as the trigonometric polynomials the discrete
/// FTDT defines, so half-step stencils can be applied exactly. The
/// convolution is a `2N`-point sum over one period of `v1` and `G`.
pub fn verify_nonmatching(setup: &NonmatchingSetup) -> Result<NonmatchingReport> {
    setup.system.validate()?;
    setup.source.validate()?;
    if !setup.amplitude.is_finite() {
        return invalid("forcing amplitude must be finite");
    }
    let (n, dt) = (setup.n, setup.dt);
    let main = SchemeSpec::central_difference(dt)?;
    let aux = match setup.aux {
        AuxStencil::Leapfrog => SchemeSpec::leapfrog(dt)?,
        AuxStencil::Central => main.clone(),
    };
    if n < 2 || n % 2 != 0 {
        return invalid(format!("record length must be even and at least 2, got {n}"));
    }
    let sys = setup.system;

    let u: Vec<[Complex64; 2]> = (0..n)
        .into_par_iter()
        .map(|k| sys.solve(&setup.source, setup.amplitude, k as f64 * dt))
        .collect::<Result<_>>()?;
    let f1: Vec<Complex64> = (0..n).map(|k| setup.source.eval(k as f64 * dt) * setup.amplitude).collect();
    let u1: Vec<Complex64> = u.iter().map(|x| x[0]).collect();
    let u2: Vec<Complex64> = u.iter().map(|x| x[1]).collect();

    let grid = FrequencyGrid::new(&main, n, Direction::Forward);
    let coeffs = |x: &[Complex64]| -> Vec<Complex64> {
        grid.indices()
            .par_iter()
            .map(|&m| {
                let q = main.q_raw(grid.omega(m));
                x.iter()
                    .enumerate()
                    .map(|(k, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * q * k as f64 * dt))
                    .sum::<Complex64>()
                    * dt
            })
            .collect()
    };
    let (b1, b2, bf) = (coeffs(&u1), coeffs(&u2), coeffs(&f1));

    let v1 = evaluate(&grid, &b1, 0.0);
    let v2 = evaluate(&grid, &b2, 0.0);
    let g1 = evaluate(&grid, &bf, 0.0);
    let (lo, hi) = aux_offsets(&aux);
    let v2_lo = evaluate(&grid, &b2, lo * dt);
    let v2_hi = evaluate(&grid, &b2, hi * dt);
    let aux_weight = aux_weight(&aux);

    let g = g_kernel(&main, &aux, sys.c, n)?;
    let g = g.samples();
    let two_n = 2 * n;
    let conv: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|k| (0..two_n).map(|j| v1[j] * g[(k + two_n - j) % two_n]).sum::<Complex64>() * dt)
        .collect();

    let mut report = NonmatchingReport {
        residual_main: 0.0,
        residual_aux_with_g: 0.0,
        residual_aux_without_g: 0.0,
        v2_max: 0.0,
    };
    for k in 0..n {
        let next = v1[(k + 1) % two_n];
        let prev = v1[(k + two_n - 1) % two_n];
        let main_res = (next - prev) / (2.0 * dt) - v1[k] * sys.l11 - v2[k] * sys.l12 - g1[k];
        let d_aux = (v2_hi[k] - v2_lo[k]) * aux_weight;
        let with_g = d_aux - conv[k] * sys.l21 + v2[k] * sys.c;
        let without_g = d_aux - v1[k] * sys.l21 + v2[k] * sys.c;
        report.residual_main = report.residual_main.max(main_res.norm());
        report.residual_aux_with_g = report.residual_aux_with_g.max(with_g.norm());
        report.residual_aux_without_g = report.residual_aux_without_g.max(without_g.norm());
        report.v2_max = report.v2_max.max(v2[k].norm());
    }
    Ok(report)
}

/// Offsets of the two-point stencil, in steps.
fn aux_offsets(s: &SchemeSpec) -> (f64, f64) {
    match s.kind() {
        SchemeKind::Leapfrog => (-0.5, 0.5),
        _ => (-1.0, 1.0),
    }
}

fn aux_weight(s: &SchemeSpec) -> f64 {
    let (lo, hi) = aux_offsets(s);
    1.0 / ((hi - lo) * s.dt())
}

/// `d_omega * sum_m b_m exp(2 pi i omega_m (k dt + shift))` for `k = 0..2N`.
fn evaluate(grid: &FrequencyGrid, b: &[Complex64], shift: f64) -> Vec<Complex64> {
    let two_n = 2 * grid.n();
    let mut buf = vec![Complex64::default(); two_n];
    for (&m, &bm) in grid.indices().iter().zip(b) {
        let omega = grid.omega(m);
        buf[grid.bin(m)] += bm * Complex64::from_polar(1.0, 2.0 * PI * omega * shift);
    }
    FftPlanner::new().plan_fft_inverse(two_n).process(&mut buf);
    let d = grid.spacing();
    buf.into_iter().map(|z| z * d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> NonmatchingSetup {
        NonmatchingSetup { n: 400, dt: 0.05, ..Default::default() }
    }

    #[test]
    fn default_system_eigenvalues() {
        let mut l = ToySystem::default().eigenvalues().map(|z| z.re);
        l.sort_by(f64::total_cmp);
        assert!((l[0] + 5.0).abs() < 1e-12 && (l[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn unstable_rejected() {
        let s = NonmatchingSetup { system: ToySystem { l11: 1.0, ..Default::default() }, ..small() };
        assert!(verify_nonmatching(&s).is_err());
    }

    #[test]
    fn zero_forcing_gives_zero_residuals() {
        let r = verify_nonmatching(&NonmatchingSetup { amplitude: 0.0, ..small() }).unwrap();
        assert_eq!(r.residual_main, 0.0);
        assert_eq!(r.residual_aux_with_g, 0.0);
        assert_eq!(r.residual_aux_without_g, 0.0);
    }

    #[test]
    fn matching_schemes_need_no_convolution() {
        let r = verify_nonmatching(&NonmatchingSetup { aux: AuxStencil::Central, ..small() }).unwrap();
        assert!((r.residual_aux_with_g - r.residual_aux_without_g).abs() < 1e-12, "{r:?}");
        assert!(r.residual_aux_with_g < 1e-8);
    }
}
