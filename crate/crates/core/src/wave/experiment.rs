use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::GridModel;
use super::sim::{run_with, Receiver, SimOptions, SimOutput, Simulator};
use super::{cfl_max_dt, default_tau_sigma, Ricker};
use crate::error::{invalid, Result};
use crate::scheme::SchemeSpec;
use crate::series::{rms_diff, TimeSeries};
use crate::transforms::{taper, Direction, TransformOperator};

/// Where the material grid comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Homogeneous {
        nx: usize,
        nz: usize,
        dx: f64,
        dz: f64,
        rho: f64,
        vp: f64,
        vs: f64,
        /// Omit both for an elastic model.
        #[serde(default)]
        qp: Option<f64>,
        #[serde(default)]
        qs: Option<f64>,
        #[serde(default)]
        n_mechanisms: usize,
        /// Defaults to relaxation frequencies log-spaced over `[f/4, 4f]`.
        #[serde(default)]
        tau_sigma: Option<Vec<f64>>,
    },
    /// A model descriptor written by [`GridModel::write`].
    File { path: PathBuf },
}

impl ModelSpec {
    pub fn build(&self, fpeak: f64) -> Result<GridModel> {
        match self {
            ModelSpec::Homogeneous { nx, nz, dx, dz, rho, vp, vs, qp, qs, n_mechanisms, tau_sigma } => {
                let q = match (qp, qs) {
                    (None, None) => {
                        if *n_mechanisms != 0 {
                            return invalid("relaxation mechanisms need qp and qs");
                        }
                        None
                    }
                    (Some(p), Some(s)) => Some((*p, *s)),
                    _ => return invalid("give both qp and qs, or neither"),
                };
                let tau = tau_sigma.clone().unwrap_or_else(|| default_tau_sigma(*n_mechanisms, fpeak));
                if q.is_some() && tau.len() != *n_mechanisms {
                    return invalid(format!("{} relaxation times for {n_mechanisms} mechanisms", tau.len()));
                }
                GridModel::homogeneous(*nx, *nz, *dx, *dz, *rho, *vp, *vs, q, tau)
            }
            ModelSpec::File { path } => GridModel::read(path),
        }
    }
}

fn default_cfl_fraction() -> f64 {
    0.95
}

fn default_fine_factor() -> usize {
    50
}

/// A dispersion-correction experiment: coarse runs with and without the
/// transforms against a fine reference run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub model: ModelSpec,
    pub source: Receiver,
    pub receivers: Vec<Receiver>,
    pub wavelet: Ricker,
    pub t_max: f64,
    /// Coarse step as a fraction of the CFL limit, unless `dt` is given.
    #[serde(default = "default_cfl_fraction")]
    pub cfl_fraction: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    /// Reference step is `dt / fine_factor`.
    #[serde(default = "default_fine_factor")]
    pub fine_factor: usize,
    /// Taper applied to coarse traces before the inverse transform.
    #[serde(default)]
    pub taper_fraction: Option<f64>,
    #[serde(default)]
    pub options: SimOptions,
}

impl WaveConfig {
    /// 1D homogeneous elastic line, 1200 cells of 10 m.
    pub fn wave1d_elastic() -> Self {
        Self {
            model: ModelSpec::Homogeneous {
                nx: 1200,
                nz: 1,
                dx: 10.0,
                dz: 10.0,
                rho: 2000.0,
                vp: 2000.0,
                vs: 1000.0,
                qp: None,
                qs: None,
                n_mechanisms: 0,
                tau_sigma: None,
            },
            source: Receiver::new(300, 0),
            receivers: vec![Receiver::new(350, 0), Receiver::new(500, 0), Receiver::new(650, 0)],
            wavelet: Ricker { fpeak: 15.0, delay: 0.1 },
            t_max: 2.2,
            cfl_fraction: 0.95,
            dt: None,
            fine_factor: 50,
            taper_fraction: None,
            options: SimOptions::default(),
        }
    }

    /// Small 2D viscoelastic block with uniform Q = 50 and three mechanisms.
    /// The record ends before the first edge reflection reaches a receiver.
    pub fn wave2d_visco() -> Self {
        Self {
            model: ModelSpec::Homogeneous {
                nx: 121,
                nz: 121,
                dx: 10.0,
                dz: 10.0,
                rho: 2000.0,
                vp: 2000.0,
                vs: 1155.0,
                qp: Some(50.0),
                qs: Some(50.0),
                n_mechanisms: 3,
                tau_sigma: None,
            },
            source: Receiver::new(60, 60),
            receivers: vec![Receiver::new(85, 60), Receiver::new(60, 35), Receiver::new(78, 78)],
            wavelet: Ricker { fpeak: 15.0, delay: 0.1 },
            t_max: 0.45,
            cfl_fraction: 0.95,
            dt: None,
            fine_factor: 50,
            taper_fraction: None,
            options: SimOptions::default(),
        }
    }

    /// Checks everything that can be checked before any time stepping.
    pub fn prepare(&self) -> Result<Prepared> {
        Ricker::new(self.wavelet.fpeak, self.wavelet.delay)?;
        let model = self.model.build(self.wavelet.fpeak)?;
        let cfl = model_cfl(&model, &self.options);
        let dt = match self.dt {
            Some(dt) => dt,
            None => {
                if !(self.cfl_fraction > 0.0 && self.cfl_fraction <= 1.0) {
                    return invalid(format!("cfl_fraction must be in (0, 1], got {}", self.cfl_fraction));
                }
                self.cfl_fraction * cfl
            }
        };
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return invalid(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.fine_factor == 0 {
            return invalid("fine_factor must be at least 1");
        }
        if let Some(f) = self.taper_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return invalid(format!("taper fraction must be in (0, 1], got {f}"));
            }
        }
        if self.receivers.is_empty() {
            return invalid("at least one receiver is needed");
        }
        let n = (self.t_max / dt).round() as usize;
        if n < 2 {
            return invalid(format!("t_max = {} covers fewer than 2 steps of {dt}", self.t_max));
        }
        let coarse = Simulator::new(&model, dt, &self.options.weights, &self.options.sponge)?;
        let fine = Simulator::new(&model, dt / self.fine_factor as f64, &self.options.weights, &self.options.sponge)?;
        for &r in self.receivers.iter().chain([&self.source]) {
            coarse.check_receiver(r)?;
        }
        Ok(Prepared { model, cfl, n, coarse, fine })
    }
}

/// A validated experiment ready to run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: GridModel,
    pub cfl: f64,
    pub n: usize,
    coarse: Simulator,
    fine: Simulator,
}

fn model_cfl(model: &GridModel, options: &SimOptions) -> f64 {
    let dz = if model.is_1d() { f64::INFINITY } else { model.dz };
    cfl_max_dt(model.vmax(), model.dx, dz, &options.weights)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverError {
    pub receiver: Receiver,
    pub rms_uncorrected: f64,
    pub rms_corrected: f64,
}

/// RMS errors against the fine reference. Totals are sums over receivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub dt: f64,
    pub cfl_dt: f64,
    pub fine_dt: f64,
    pub n_steps: usize,
    pub rms_uncorrected: f64,
    pub rms_corrected: f64,
    pub reduction: f64,
    pub receivers: Vec<ReceiverError>,
    pub runtime_seconds: f64,
    #[serde(skip)]
    pub reference: Vec<TimeSeries<f64>>,
    #[serde(skip)]
    pub uncorrected: Vec<TimeSeries<f64>>,
    #[serde(skip)]
    pub corrected: Vec<TimeSeries<f64>>,
}

/// Runs the coarse uncorrected, coarse corrected and fine reference
/// simulations. The corrected run is driven by the forward transform of the
/// wavelet and its traces are mapped back with the inverse transform at the
/// half-step origin.
pub fn run_correction_experiment(cfg: &WaveConfig) -> Result<CorrectionReport> {
    let start = Instant::now();
    let p = cfg.prepare()?;
    let (n, dt, ff) = (p.n, p.coarse.dt(), cfg.fine_factor);
    let ricker = cfg.wavelet;
    let wavelet = TimeSeries::from_fn(n, dt, 0.0, |t| ricker.eval(t))?;
    let fine_wavelet = TimeSeries::from_fn(n * ff, p.fine.dt(), 0.0, |t| ricker.eval(t))?;
    let scheme = SchemeSpec::leapfrog(dt)?;
    let forward = TransformOperator::new(&scheme, n, Direction::Forward, 0.0)?;
    let inverse = TransformOperator::new(&scheme, n, Direction::Inverse, 0.5 * dt)?;
    let distorted = forward.apply(&wavelet)?;

    let run = |sim: &Simulator, w: &TimeSeries<f64>, steps: usize| -> Result<SimOutput> {
        run_with(sim, &p.model, cfg.source, w, &cfg.receivers, steps)
    };
    let ((plain, filtered), fine) = rayon::join(
        || rayon::join(|| run(&p.coarse, &wavelet, n), || run(&p.coarse, &distorted, n)),
        || run(&p.fine, &fine_wavelet, n * ff),
    );
    let (plain, filtered, fine) = (plain?, filtered?, fine?);

    let corrected: Vec<TimeSeries<f64>> = filtered
        .pressure
        .par_iter()
        .map(|tr| match cfg.taper_fraction {
            Some(f) => inverse.apply(&taper(tr, f)?),
            None => inverse.apply(tr),
        })
        .collect::<Result<_>>()?;
    let reference: Vec<TimeSeries<f64>> =
        fine.pressure.iter().map(|tr| subsample(tr, ff, n, dt)).collect::<Result<_>>()?;

    let receivers: Vec<ReceiverError> = cfg
        .receivers
        .iter()
        .enumerate()
        .map(|(r, &receiver)| ReceiverError {
            receiver,
            rms_uncorrected: rms_diff(plain.pressure[r].samples(), reference[r].samples()),
            rms_corrected: rms_diff(corrected[r].samples(), reference[r].samples()),
        })
        .collect();
    let rms_uncorrected: f64 = receivers.iter().map(|r| r.rms_uncorrected).sum();
    let rms_corrected: f64 = receivers.iter().map(|r| r.rms_corrected).sum();
    Ok(CorrectionReport {
        dt,
        cfl_dt: p.cfl,
        fine_dt: p.fine.dt(),
        n_steps: n,
        rms_uncorrected,
        rms_corrected,
        reduction: rms_uncorrected / rms_corrected,
        receivers,
        runtime_seconds: start.elapsed().as_secs_f64(),
        reference,
        uncorrected: plain.pressure,
        corrected,
    })
}

/// Fine samples at `(k + 1/2) dt / ff` taken at the coarse times
/// `(n + 1/2) dt`, averaging the two neighbors when `ff` is even.
fn subsample(fine: &TimeSeries<f64>, ff: usize, n: usize, dt: f64) -> Result<TimeSeries<f64>> {
    let f = fine.samples();
    let v = (0..n)
        .map(|k| {
            if ff % 2 == 1 {
                f[ff * k + ff / 2]
            } else {
                0.5 * (f[ff * k + ff / 2 - 1] + f[ff * k + ff / 2])
            }
        })
        .collect();
    TimeSeries::with_origin(v, dt, 0.5 * dt)
}

/// One row of the memory-variable scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryResidualRow {
    pub dt: f64,
    pub residual: f64,
    /// Share of the recorded memory-variable energy below 40 Hz.
    pub energy_below_40hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryScan {
    pub rows: Vec<MemoryResidualRow>,
    /// `residual(dt_k) / residual(dt_{k+1})`; `None` when a residual is zero.
    pub ratios: Vec<Option<f64>>,
}

/// For each `dt`, runs the uncorrected wavelet and bounds the term by which
/// the averaged memory update departs from the continuous relation,
///
/// ```text
/// |R(w)| (1 - cos(pi w dt)) |2 i sin(pi w dt) tau / (dt + 2 i sin(pi w dt) tau)|
/// ```
///
/// maximized over receivers, mechanisms and `0 < w <= 4 fpeak`. `R` is the
/// DFT of the recorded `r_xx` trace with `dt` quadrature weights.
pub fn memory_residual_scan(cfg: &WaveConfig, dt_list: &[f64]) -> Result<MemoryScan> {
    if dt_list.is_empty() {
        return invalid("dt list is empty");
    }
    if dt_list.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("dt list must be strictly descending");
    }
    let ricker = cfg.wavelet;
    let setups: Vec<(f64, Prepared)> = dt_list
        .iter()
        .map(|&dt| WaveConfig { dt: Some(dt), fine_factor: 1, ..cfg.clone() }.prepare().map(|p| (dt, p)))
        .collect::<Result<_>>()?;
    let band = 4.0 * ricker.fpeak;
    let freqs: Vec<f64> = (1..=400).map(|k| band * k as f64 / 400.0).collect();
    let rows: Vec<MemoryResidualRow> = setups
        .par_iter()
        .map(|(dt, p)| {
            let w = TimeSeries::from_fn(p.n, *dt, 0.0, |t| ricker.eval(t))?;
            let out = run_with(&p.coarse, &p.model, cfg.source, &w, &cfg.receivers, p.n)?;
            let mut residual: f64 = 0.0;
            let mut below = 0.0;
            let mut total = 0.0;
            for traces in &out.memory {
                for (r, tau) in traces.iter().zip(&p.model.tau_sigma) {
                    for &f in &freqs {
                        let s = (PI * f * dt).sin();
                        let factor = Complex64::new(0.0, 2.0 * s * tau) / Complex64::new(*dt, 2.0 * s * tau);
                        let v = dft(r, f).norm() * (1.0 - (PI * f * dt).cos()) * factor.norm();
                        residual = residual.max(v);
                    }
                    let (b, t) = band_energy(r, 40.0);
                    below += b;
                    total += t;
                }
            }
            Ok(MemoryResidualRow {
                dt: *dt,
                residual,
                energy_below_40hz: if total > 0.0 { below / total } else { 1.0 },
            })
        })
        .collect::<Result<_>>()?;
    let ratios = rows
        .windows(2)
        .map(|w| (w[1].residual > 0.0).then(|| w[0].residual / w[1].residual))
        .collect();
    Ok(MemoryScan { rows, ratios })
}

/// `dt sum_n x_n exp(-2 pi i f t_n)`.
fn dft(x: &TimeSeries<f64>, f: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, -2.0 * PI * f * x.dt());
    let mut z = Complex64::from_polar(1.0, -2.0 * PI * f * x.t0());
    let mut acc = Complex64::default();
    for (k, &v) in x.samples().iter().enumerate() {
        if k % 64 == 0 {
            z = Complex64::from_polar(1.0, -2.0 * PI * f * x.time(k));
        }
        acc += z * v;
        z *= step;
    }
    acc * x.dt()
}

/// Spectral energy below `cutoff` Hz and in total, over the positive DFT bins.
fn band_energy(x: &TimeSeries<f64>, cutoff: f64) -> (f64, f64) {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * x.dt());
    let (mut below, mut total) = (0.0, 0.0);
    for (k, z) in buf.iter().enumerate().take(n / 2 + 1) {
        let e = z.norm_sqr();
        total += e;
        if k as f64 * df <= cutoff {
            below += e;
        }
    }
    (below, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_prepare() {
        for cfg in [WaveConfig::wave1d_elastic(), WaveConfig::wave2d_visco()] {
            let p = cfg.prepare().unwrap();
            assert!((p.coarse.dt() - 0.95 * p.cfl).abs() < 1e-15);
        }
    }

    #[test]
    fn bad_configs_fail_before_running() {
        let mut c = WaveConfig::wave1d_elastic();
        c.receivers.push(Receiver::new(1199, 0));
        assert!(c.prepare().is_err());
        let mut c = WaveConfig::wave1d_elastic();
        c.cfl_fraction = 1.2;
        assert!(c.prepare().is_err());
        let mut c = WaveConfig::wave1d_elastic();
        c.dt = Some(1.0);
        assert!(c.prepare().is_err());
        let json = serde_json::to_string(&WaveConfig::wave2d_visco()).unwrap();
        let back: WaveConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, WaveConfig::wave2d_visco());
        assert!(serde_json::from_str::<WaveConfig>(&json.replacen("\"t_max\"", "\"tmax\"", 1)).is_err());
    }

    #[test]
    fn subsample_picks_matching_times() {
        let fine = TimeSeries::from_fn(40, 0.25, 0.125, |t| t).unwrap();
        let s = subsample(&fine, 4, 10, 1.0).unwrap();
        for (k, v) in s.samples().iter().enumerate() {
            assert!((v - (k as f64 + 0.5)).abs() < 1e-15);
        }
        let fine = TimeSeries::from_fn(30, 1.0 / 3.0, 1.0 / 6.0, |t| t).unwrap();
        let s = subsample(&fine, 3, 10, 1.0).unwrap();
        assert!((s.samples()[4] - 4.5).abs() < 1e-14);
    }

    #[test]
    fn dft_of_a_cosine() {
        let x = TimeSeries::from_fn(1000, 1e-3, 5e-4, |t| (2.0 * PI * 20.0 * t).cos()).unwrap();
        assert!((dft(&x, 20.0).norm() - 0.5).abs() < 1e-3);
        let (b, t) = band_energy(&x, 40.0);
        assert!(b / t > 0.999);
    }
}
