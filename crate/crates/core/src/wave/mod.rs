//! Staggered-grid elastic and viscoelastic wave simulation.
//!
//! Velocities live at integer time steps and stresses and memory variables at
//! half steps, so the time stencil is the leapfrog one. Space uses half-order 6
//! staggered differences. Both 1D (`nz == 1`) and 2D P-SV grids are supported.

mod experiment;
mod model;
mod sim;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use experiment::{
    memory_residual_scan, run_correction_experiment, CorrectionReport, MemoryResidualRow, MemoryScan, ModelSpec,
    Prepared, ReceiverError, WaveConfig,
};
pub use model::{GridModel, ModelDescriptor};
pub use sim::{run_simulation, Receiver, SimOptions, SimOutput, SimState, Simulator, Sponge};

/// Half-order 6 staggered first-derivative weights `alpha_1..alpha_6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StencilWeights {
    pub alpha: [f64; 6],
}

impl StencilWeights {
    /// The weights as printed, truncated to 4 digits. Their first moment
    /// `sum alpha_l (2l - 1)` is 0.999.
    pub const TABLE: Self = Self { alpha: [1.2508, -0.1203, 0.0321, -0.0101, 0.0030, -0.0007] };

    /// The printed weights shifted by `1/36000` each, so that a linear ramp is
    /// differentiated exactly. Rounded to 4 digits they equal the table and
    /// `sum |alpha_l|` is unchanged.
    pub fn consistent() -> Self {
        let shift = (1.0 - Self::TABLE.first_moment()) / 36.0;
        let mut alpha = Self::TABLE.alpha;
        for a in &mut alpha {
            *a += shift;
        }
        Self { alpha }
    }

    pub fn abs_sum(&self) -> f64 {
        self.alpha.iter().map(|a| a.abs()).sum()
    }

    /// `sum alpha_l (2l - 1)`, which must be 1 for a consistent derivative.
    pub fn first_moment(&self) -> f64 {
        self.alpha.iter().enumerate().map(|(l, a)| a * (2 * l + 1) as f64).sum()
    }

    /// Staggered derivative at `x_j` of samples `f(x_j + (l - 1/2) h)` and
    /// `f(x_j - (l - 1/2) h)` supplied by `plus(l)`, `minus(l)` for `l = 1..=6`.
    #[inline]
    pub fn derivative(&self, h: f64, plus: impl Fn(usize) -> f64, minus: impl Fn(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for (l, a) in self.alpha.iter().enumerate() {
            acc += a * (plus(l + 1) - minus(l + 1));
        }
        acc / h
    }
}

impl Default for StencilWeights {
    fn default() -> Self {
        Self::consistent()
    }
}

/// Largest stable leapfrog step,
/// `1 / (vmax sqrt((sum |alpha| / dx)^2 + (sum |alpha| / dz)^2))`.
///
/// Pass `dz = f64::INFINITY` for a 1D grid.
pub fn cfl_max_dt(vmax: f64, dx: f64, dz: f64, w: &StencilWeights) -> f64 {
    let s = w.abs_sum();
    let gx = s / dx;
    let gz = if dz.is_finite() { s / dz } else { 0.0 };
    1.0 / (vmax * (gx * gx + gz * gz).sqrt())
}

/// `(1 - 2 pi^2 f^2 (t - d)^2) exp(-pi^2 f^2 (t - d)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ricker {
    pub fpeak: f64,
    pub delay: f64,
}

impl Ricker {
    pub fn new(fpeak: f64, delay: f64) -> crate::Result<Self> {
        if !(fpeak > 0.0 && fpeak.is_finite() && delay.is_finite()) {
            return crate::error::invalid(format!("Ricker wavelet needs fpeak > 0, got {fpeak}"));
        }
        Ok(Self { fpeak, delay })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = (PI * self.fpeak * (t - self.delay)).powi(2);
        (1.0 - 2.0 * x) * (-x).exp()
    }
}

pub fn ricker(fpeak: f64, delay: f64) -> crate::Result<Ricker> {
    Ricker::new(fpeak, delay)
}

/// Relaxation times for `n` mechanisms with relaxation frequencies
/// log-spaced over `[fpeak / 4, 4 fpeak]`, `tau = 1 / (2 pi f)`.
pub fn default_tau_sigma(n: usize, fpeak: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0 / (2.0 * PI * fpeak)],
        _ => (0..n)
            .map(|k| {
                let f = fpeak / 4.0 * 16f64.powf(k as f64 / (n - 1) as f64);
                1.0 / (2.0 * PI * f)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_round_to_the_table() {
        let w = StencilWeights::consistent();
        for (a, b) in w.alpha.iter().zip(StencilWeights::TABLE.alpha) {
            assert_abs_diff_eq!((a * 1e4).round() / 1e4, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(w.first_moment(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(StencilWeights::TABLE.first_moment(), 0.999, epsilon = 1e-12);
        assert_abs_diff_eq!(w.abs_sum(), 1.417, epsilon = 1e-12);
    }

    #[test]
    fn ramp_slope_is_exact() {
        let w = StencilWeights::consistent();
        let h = 12.5;
        let f = |x: f64| 3.0 * x - 7.0;
        let x0 = 100.0;
        let d = w.derivative(h, |l| f(x0 + (l as f64 - 0.5) * h), |l| f(x0 - (l as f64 - 0.5) * h));
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn cfl_values() {
        let w = StencilWeights::default();
        let dt = cfl_max_dt(4700.0, 12.5, 12.5, &w);
        assert!((1.30e-3..=1.34e-3).contains(&dt), "{dt}");
        let one_d = cfl_max_dt(4700.0, 12.5, f64::INFINITY, &w);
        assert_abs_diff_eq!(one_d, 12.5 / (4700.0 * w.abs_sum()), epsilon = 1e-18);
        assert_abs_diff_eq!(cfl_max_dt(4700.0, 25.0, 25.0, &w), 2.0 * dt, epsilon = 1e-15);
    }

    #[test]
    fn ricker_values() {
        let r = ricker(15.0, 0.15).unwrap();
        assert_eq!(r.eval(0.15), 1.0);
        let zero = 0.15 + 1.0 / (2f64.sqrt() * PI * 15.0);
        assert!(r.eval(zero).abs() < 1e-15);
        assert_abs_diff_eq!(zero, 0.165, epsilon = 1e-3);
        let x = (PI * 15.0 * 0.15f64).powi(2);
        assert_abs_diff_eq!(r.eval(0.0), (1.0 - 2.0 * x) * (-x).exp(), epsilon = 1e-30);
        assert!(r.eval(0.0).abs() < 1e-3);
        assert!(ricker(0.0, 0.1).is_err());
    }

    #[test]
    fn relaxation_times_span_the_band() {
        let t = default_tau_sigma(3, 15.0);
        assert_abs_diff_eq!(t[0], 1.0 / (2.0 * PI * 3.75), epsilon = 1e-15);
        assert_abs_diff_eq!(t[1], 1.0 / (2.0 * PI * 15.0), epsilon = 1e-15);
        assert_abs_diff_eq!(t[2], 1.0 / (2.0 * PI * 60.0), epsilon = 1e-15);
    }
}
