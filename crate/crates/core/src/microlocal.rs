//! Gaussian wave packets and where the transforms move them in phase space.
//!
//! With `h = dt` and normalized frequency `eta = omega h`, the inverse
//! transform of the central scheme moves a packet centered at `(t0, eta0)` to
//! `chi(t0, eta0) = (t0 / q0'(eta0), q0(eta0))` and the forward transform to
//! `chi^{-1}(t0, eta0)`. Centers are estimated by modulus-squared centroids.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ode::{analytic_samples, GaussianSource};
use crate::scheme::SchemeSpec;
use crate::series::TimeSeries;
use crate::transforms::{Direction, TransformOperator};

/// Half width of the window a packet needs, in units of `sqrt(h)`.
pub const WINDOW_SIGMAS: f64 = 8.0;

/// `(2/h)^{1/4} exp(2 pi i (t - t0) eta0 / h) exp(-pi (t - t0)^2 / h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavePacket {
    pub t0: f64,
    pub eta0: f64,
    pub h: f64,
}

impl WavePacket {
    pub fn new(t0: f64, eta0: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite() && t0.is_finite() && eta0.is_finite()) {
            return invalid(format!("wave packet needs finite t0, eta0 and h > 0, got ({t0}, {eta0}, {h})"));
        }
        Ok(Self { t0, eta0, h })
    }

    pub fn amplitude(&self) -> f64 {
        (2.0 / self.h).powf(0.25)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let s = t - self.t0;
        Complex64::from_polar(self.amplitude() * (-PI * s * s / self.h).exp(), 2.0 * PI * s * self.eta0 / self.h)
    }

    /// `[t0 - 8 sqrt(h), t0 + 8 sqrt(h)]`.
    pub fn window(&self) -> (f64, f64) {
        let w = WINDOW_SIGMAS * self.h.sqrt();
        (self.t0 - w, self.t0 + w)
    }
}

/// Samples the packet at `start + k dt`, `k = 0..n`.
pub fn sample_packet(p: &WavePacket, n: usize, dt: f64, start: f64) -> Result<TimeSeries<Complex64>> {
    let (lo, hi) = p.window();
    let end = start + (n.max(1) - 1) as f64 * dt;
    if start > lo || end < hi {
        return invalid(format!("grid [{start}, {end}] does not cover the packet window [{lo}, {hi}]"));
    }
    TimeSeries::from_fn(n, dt, start, |t| p.eval(t))
}

/// `F_h(f)(eta) = h^{-1/2} F(f)(eta / h)` on the DFT grid `eta_k = k / N`,
/// shifted to `[-1/2, 1/2)`. The returned series is indexed by `eta`: its
/// `dt` is the spacing `1 / N` and its `t0` the first frequency.
pub fn scaled_fourier(x: &TimeSeries<Complex64>, h: f64) -> Result<TimeSeries<Complex64>> {
    let dt = x.dt();
    if (h - dt).abs() > 1e-12 * dt {
        return invalid(format!("scaled Fourier transform needs h = dt, got h = {h}, dt = {dt}"));
    }
    let n = x.len();
    if n == 0 {
        return invalid("empty signal");
    }
    let mut buf = x.samples().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let scale = dt / h.sqrt();
    let out = (0..n)
        .map(|j| {
            let k = (j + n - half) % n;
            let eta = (j as f64 - half as f64) / n as f64;
            buf[k] * Complex64::from_polar(scale, -2.0 * PI * eta * x.t0() / h)
        })
        .collect();
    TimeSeries::with_origin(out, 1.0 / n as f64, -(half as f64) / n as f64)
}

/// A point `(t, eta)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: f64,
    pub eta: f64,
}

impl PhasePoint {
    /// Largest componentwise relative deviation from `target`.
    pub fn relative_error(&self, target: &PhasePoint) -> f64 {
        ((self.t - target.t) / target.t).abs().max(((self.eta - target.eta) / target.eta).abs())
    }
}

/// Modulus-squared centroids in time and in normalized frequency.
pub fn estimate_center(x: &TimeSeries<Complex64>, h: f64) -> Result<PhasePoint> {
    let t = centroid(x).ok_or_else(|| crate::Error::InvalidArgument("all-zero signal has no center".into()))?;
    let f = scaled_fourier(x, h)?;
    let eta = centroid(&f).ok_or_else(|| crate::Error::InvalidArgument("all-zero spectrum".into()))?;
    Ok(PhasePoint { t, eta })
}

fn centroid(x: &TimeSeries<Complex64>) -> Option<f64> {
    let (mut m0, mut m1) = (0.0, 0.0);
    for (t, z) in x.times().zip(x.samples()) {
        let w = z.norm_sqr();
        m0 += w;
        m1 += w * t;
    }
    (m0 > 0.0).then(|| m1 / m0)
}

/// Share of `|x|^2` with `|t - center.t| > dt_radius`, plus the share of
/// `|F_h x|^2` with `|eta - center.eta| > eta_radius`.
pub fn mass_outside(x: &TimeSeries<Complex64>, h: f64, center: &PhasePoint, t_radius: f64, eta_radius: f64) -> Result<f64> {
    let share = |s: &TimeSeries<Complex64>, c: f64, r: f64| {
        let total: f64 = s.samples().iter().map(|z| z.norm_sqr()).sum();
        let out: f64 = s.times().zip(s.samples()).filter(|(t, _)| (t - c).abs() > r).map(|(_, z)| z.norm_sqr()).sum();
        if total > 0.0 {
            out / total
        } else {
            0.0
        }
    };
    let f = scaled_fourier(x, h)?;
    Ok(share(x, center.t, t_radius) + share(&f, center.eta, eta_radius))
}

/// `chi(t, eta) = (t / q0'(eta), q0(eta))`.
pub fn chi(scheme: &SchemeSpec, p: PhasePoint) -> PhasePoint {
    PhasePoint { t: p.t / scheme.q0_prime(p.eta), eta: scheme.q0(p.eta) }
}

/// `chi^{-1}(t, xi) = (t q0'(q0^{-1}(xi)), q0^{-1}(xi))`.
pub fn chi_inv(scheme: &SchemeSpec, p: PhasePoint) -> PhasePoint {
    let eta = scheme.q0_inv(p.eta);
    PhasePoint { t: p.t * scheme.q0_prime(eta), eta }
}

/// Inner products `<x, phi_(t, eta)>` over a grid of probe packets; returns
/// the probe with the largest modulus. Slow, meant for verification.
pub fn probe_center(x: &TimeSeries<Complex64>, h: f64, ts: &[f64], etas: &[f64]) -> Result<(PhasePoint, f64)> {
    if ts.is_empty() || etas.is_empty() {
        return invalid("probe grid is empty");
    }
    let best = ts
        .par_iter()
        .flat_map(|&t| etas.par_iter().map(move |&eta| (t, eta)))
        .map(|(t, eta)| {
            let probe = WavePacket { t0: t, eta0: eta, h };
            let ip: Complex64 = x.times().zip(x.samples()).map(|(s, z)| z * probe.eval(s).conj()).sum::<Complex64>() * x.dt();
            (PhasePoint { t, eta }, ip.norm())
        })
        .reduce(|| (PhasePoint { t: f64::NAN, eta: f64::NAN }, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    Ok(best)
}

/// Centers of the transformed packet at one `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketRow {
    pub dt: f64,
    pub itdt_center: PhasePoint,
    pub ftdt_center: PhasePoint,
    pub itdt_error: f64,
    pub ftdt_error: f64,
    /// [`mass_outside`] around the predicted centers.
    pub itdt_outside: f64,
    pub ftdt_outside: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketReport {
    pub t0: f64,
    pub eta0: f64,
    pub itdt_target: PhasePoint,
    pub ftdt_target: PhasePoint,
    pub rows: Vec<PacketRow>,
}

/// Neighbourhood used for [`PacketRow::itdt_outside`] and `ftdt_outside`.
pub const OUTSIDE_T_RADIUS: f64 = 0.1;
pub const OUTSIDE_ETA_RADIUS: f64 = 0.01;

/// For each `dt`, samples the packet with `h = dt` on `[0, t_max)`, applies
/// the central-scheme transforms and estimates the centers.
pub fn packet_ladder(t0: f64, eta0: f64, dt_list: &[f64], t_max: f64) -> Result<PacketReport> {
    if dt_list.is_empty() {
        return invalid("dt list is empty");
    }
    let reference = SchemeSpec::central_difference(dt_list[0])?;
    let start = PhasePoint { t: t0, eta: eta0 };
    if eta0.is_nan() || eta0.abs() >= 0.25 {
        return invalid(format!("eta0 must lie in (-1/4, 1/4), got {eta0}"));
    }
    let itdt_target = chi(&reference, start);
    let ftdt_target = chi_inv(&reference, start);
    let jobs: Vec<(f64, usize, WavePacket)> = dt_list
        .iter()
        .map(|&dt| {
            let n = (t_max / dt).round() as usize;
            if n < 2 || !n.is_multiple_of(2) {
                return invalid(format!("t_max / dt must be an even integer, got {}", t_max / dt));
            }
            let p = WavePacket::new(t0, eta0, dt)?;
            let (lo, _) = p.window();
            // transformed packets are wider by up to 1 / q0'
            let w = 1.5 * WINDOW_SIGMAS * dt.sqrt();
            let fit = |c: PhasePoint| c.t - w >= 0.0 && c.t + w <= t_max;
            if lo < 0.0 || !fit(itdt_target) || !fit(ftdt_target) {
                return invalid(format!("record [0, {t_max}) is too short for the packet at dt = {dt}"));
            }
            Ok((dt, n, p))
        })
        .collect::<Result<_>>()?;
    let rows = jobs
        .par_iter()
        .map(|&(dt, n, p)| {
            let scheme = SchemeSpec::central_difference(dt)?;
            let x = sample_packet(&p, n, dt, 0.0)?;
            let inv = TransformOperator::matrix_free(&scheme, n, Direction::Inverse, 0.0)?.apply(&x)?;
            let fwd = TransformOperator::matrix_free(&scheme, n, Direction::Forward, 0.0)?.apply(&x)?;
            let (ci, cf) = (estimate_center(&inv, dt)?, estimate_center(&fwd, dt)?);
            Ok(PacketRow {
                dt,
                itdt_center: ci,
                ftdt_center: cf,
                itdt_error: ci.relative_error(&itdt_target),
                ftdt_error: cf.relative_error(&ftdt_target),
                itdt_outside: mass_outside(&inv, dt, &itdt_target, OUTSIDE_T_RADIUS, OUTSIDE_ETA_RADIUS)?,
                ftdt_outside: mass_outside(&fwd, dt, &ftdt_target, OUTSIDE_T_RADIUS, OUTSIDE_ETA_RADIUS)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PacketReport { t0, eta0, itdt_target, ftdt_target, rows })
}

/// `sup_{t <= 0} |FTDT(u)|` at one `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub dt: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub rows: Vec<LemmaRow>,
    /// `log2(sup(dt_k) / sup(dt_{k+1}))`, an empirical rate per halving.
    pub log2_ratios: Vec<f64>,
}

/// Samples the analytic solution of `u' + u = f` on `[0, t_max)`, prepends
/// `N/2` zero samples for negative times and applies the central-scheme
/// FTDT built at the extended length with its origin at `-N/2 dt`.
pub fn lemma_init_check(src: &GaussianSource, dt_list: &[f64], t_max: f64) -> Result<LemmaReport> {
    src.validate()?;
    let rows = dt_list
        .par_iter()
        .map(|&dt| {
            let n = (t_max / dt).round() as usize;
            if n < 4 || !n.is_multiple_of(4) || ((n as f64) * dt - t_max).abs() > 1e-9 * t_max {
                return invalid(format!("t_max / dt must be a multiple of 4, got {}", t_max / dt));
            }
            let u = analytic_samples(src, n, dt)?;
            lemma_sup(u.samples(), dt)
        })
        .collect::<Result<Vec<_>>>()?;
    let log2_ratios = rows.windows(2).map(|w| (w[0].sup / w[1].sup).log2()).collect();
    Ok(LemmaReport { rows, log2_ratios })
}

/// The extension and sup for given samples of `u` on `[0, N dt)`.
pub fn lemma_sup(u: &[Complex64], dt: f64) -> Result<LemmaRow> {
    let n = u.len();
    let pad = n / 2;
    let mut ext = vec![Complex64::default(); pad];
    ext.extend_from_slice(u);
    let origin = -(pad as f64) * dt;
    let x = TimeSeries::with_origin(ext, dt, origin)?;
    let scheme = SchemeSpec::central_difference(dt)?;
    let v = TransformOperator::new(&scheme, x.len(), Direction::Forward, origin)?.apply(&x)?;
    let sup = v.samples()[..=pad].iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(LemmaRow { dt, sup })
}
