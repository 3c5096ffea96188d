//! The scalar model problem `u' + u = f` with a modulated Gaussian source.
//!
//! The analytic solution is the causal convolution `u = e^{-t} * f`, evaluated
//! by adaptive quadrature. Finite-difference solutions are compared against it
//! with and without dispersion correction.

mod nonmatching;

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature;
use crate::scheme::SchemeSpec;
use crate::series::{Sample, TimeSeries};
use crate::transforms::{build_operator, taper, Direction, FrequencyGrid};

pub use nonmatching::{verify_nonmatching, AuxStencil, NonmatchingReport, NonmatchingSetup, ToySystem};

/// Absolute tolerance of the analytic oracle.
pub const ORACLE_TOL: f64 = 1e-15;

/// Half-width of the source support in standard deviations.
const SUPPORT_SIGMAS: f64 = 12.0;

/// `f(t) = (2 pi sigma2)^{-1/2} exp(-(t - mu)^2 / (2 sigma2)) exp(2 pi i a (t - mu))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSource {
    pub mu: f64,
    pub sigma2: f64,
    pub a: f64,
}

pub fn gaussian_source(mu: f64, sigma2: f64, a: f64) -> Result<GaussianSource> {
    GaussianSource::new(mu, sigma2, a)
}

impl GaussianSource {
    pub fn new(mu: f64, sigma2: f64, a: f64) -> Result<Self> {
        let s = Self { mu, sigma2, a };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return invalid(format!("sigma2 must be positive, got {}", self.sigma2));
        }
        if !(self.mu.is_finite() && self.a.is_finite()) {
            return invalid("source mean and modulation must be finite");
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn peak(&self) -> f64 {
        1.0 / (2.0 * PI * self.sigma2).sqrt()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let d = t - self.mu;
        let envelope = (-d * d / (2.0 * self.sigma2)).exp() * self.peak();
        Complex64::from_polar(envelope, 2.0 * PI * self.a * d)
    }

    /// `[mu - 12 sigma, mu + 12 sigma]`, outside which `|f| < 1e-31 peak`.
    pub fn support(&self) -> (f64, f64) {
        let w = SUPPORT_SIGMAS * self.sigma();
        (self.mu - w, self.mu + w)
    }

    /// Samples at `n dt`, `n = 0..len`.
    pub fn sample(&self, len: usize, dt: f64) -> Result<TimeSeries<Complex64>> {
        TimeSeries::from_fn(len, dt, 0.0, |t| self.eval(t))
    }
}

/// `u(t) = int_{-inf}^t e^{-(t - s)} f(s) ds`, the causal solution of `u' + u = f`.
pub fn analytic_solution(src: &GaussianSource, t: f64) -> Result<Complex64> {
    exp_convolution(src, Complex64::new(-1.0, 0.0), t, ORACLE_TOL)
}

/// `int_{-inf}^t e^{lambda (t - s)} f(s) ds` with the source truncated to its
/// 12-sigma support.
pub fn exp_convolution(src: &GaussianSource, lambda: Complex64, t: f64, tol: f64) -> Result<Complex64> {
    let (lo, hi) = src.support();
    if t <= lo {
        return Ok(Complex64::default());
    }
    let end = t.min(hi);
    let inner = quadrature::integrate(|s| (lambda * (end - s)).exp() * src.eval(s), lo, end, tol)?;
    Ok(inner * (lambda * (t - end)).exp())
}

/// Analytic solution at `n dt`, `n = 0..len`.
pub fn analytic_samples(src: &GaussianSource, len: usize, dt: f64) -> Result<TimeSeries<Complex64>> {
    let samples = (0..len)
        .into_par_iter()
        .map(|n| analytic_solution(src, n as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(samples, dt)
}

/// Central differences for `D v + v = g`:
/// `v_{n+1} = v_{n-1} + 2 dt (g_n - v_n)` from `v_{-1} = v_0 = 0`.
pub fn solve_central_fd<T: Sample>(g: &TimeSeries<T>) -> TimeSeries<T> {
    let (v, _) = central_fd_with_tail(g);
    v
}

/// Also returns `v_N`, one step past the record.
fn central_fd_with_tail<T: Sample>(g: &TimeSeries<T>) -> (TimeSeries<T>, T) {
    let dt = g.dt();
    let n = g.len();
    let mut v = vec![T::default(); n + 1];
    let mut prev = T::default();
    for k in 0..n {
        let next = prev + (g.samples()[k] - v[k]) * (2.0 * dt);
        prev = v[k];
        v[k + 1] = next;
    }
    let tail = v.pop().unwrap_or_default();
    (g.with_samples(v), tail)
}

/// `v_{n+1} = v_n + dt (f_n - v_n)`, `v_0 = 0`.
pub fn solve_forward_euler<T: Sample>(f: &TimeSeries<T>) -> TimeSeries<T> {
    let dt = f.dt();
    let mut v = Vec::with_capacity(f.len());
    let mut cur = T::default();
    for &fk in f.samples() {
        v.push(cur);
        cur = cur + (fk - cur) * dt;
    }
    f.with_samples(v)
}

/// How well `(2 pi i q(omega_m) + 1) a_m(v) = a_m(g)` holds on the central grid.
///
/// Finite records add a summation-by-parts term
/// `(v_N z^{1-N} + v_{N-1} z^{-N}) / 2`, `z = exp(2 pi i omega_m dt)`,
/// which `corrected` includes and `raw` omits. Residuals are divided by
/// `max_m |a_m(g)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremResidual {
    pub raw: f64,
    pub corrected: f64,
    pub boundary: f64,
    pub scale: f64,
}

/// Solves `D v + v = g` by central differences and checks the coefficient identity.
pub fn theorem_residual<T: Sample>(g: &TimeSeries<T>) -> Result<TheoremResidual> {
    let scheme = SchemeSpec::central_difference(g.dt())?;
    let n = g.len();
    if !n.is_multiple_of(2) {
        return invalid("the central grid needs an even record length");
    }
    let (v, v_tail) = central_fd_with_tail(g);
    let grid = FrequencyGrid::new(&scheme, n, Direction::Inverse);
    let coeff = |x: &[T], omega: f64| -> Complex64 {
        x.iter()
            .enumerate()
            .map(|(k, s)| s.to_complex() * Complex64::from_polar(1.0, -2.0 * PI * omega * k as f64 * g.dt()))
            .sum::<Complex64>()
            * g.dt()
    };
    let v_last = v.samples()[n - 1].to_complex();
    let v_tail = v_tail.to_complex();
    let rows: Vec<(f64, f64, f64, f64)> = grid
        .indices()
        .par_iter()
        .map(|&m| {
            let omega = grid.omega(m);
            let av = coeff(v.samples(), omega);
            let ag = coeff(g.samples(), omega);
            let lhs = (Complex64::new(1.0, 2.0 * PI * scheme.q_raw(omega))) * av;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let z = Complex64::from_polar(1.0, 2.0 * PI * omega * g.dt());
            let boundary = (v_tail * z + v_last) * (0.5 * sign);
            ((lhs - ag).norm(), (lhs + boundary - ag).norm(), boundary.norm(), ag.norm())
        })
        .collect();
    let fold = |f: fn(&(f64, f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let scale = fold(|r| r.3);
    if scale == 0.0 {
        return Ok(TheoremResidual { raw: 0.0, corrected: 0.0, boundary: 0.0, scale });
    }
    Ok(TheoremResidual {
        raw: fold(|r| r.0) / scale,
        corrected: fold(|r| r.1) / scale,
        boundary: fold(|r| r.2) / scale,
        scale,
    })
}

/// Parameters of one model-problem run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeConfig {
    pub mu: f64,
    pub sigma2: f64,
    pub a: f64,
    pub dt: f64,
    pub t_max: f64,
    #[serde(default)]
    pub taper_fraction: Option<f64>,
}

impl OdeConfig {
    pub fn source(&self) -> Result<GaussianSource> {
        GaussianSource::new(self.mu, self.sigma2, self.a)
    }

    /// Number of samples `t_max / dt`.
    pub fn n_samples(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return invalid(format!("t_max must be positive, got {}", self.t_max));
        }
        let ratio = self.t_max / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio {
            return invalid(format!("t_max / dt = {ratio} is not an integer"));
        }
        let n = n as usize;
        if n < 2 || !n.is_multiple_of(2) {
            return invalid(format!("t_max / dt = {n} must be an even count of at least 2"));
        }
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        self.source()?;
        self.n_samples()?;
        if let Some(f) = self.taper_fraction {
            if !(f > 0.0 && f < 1.0) {
                return invalid(format!("taper_fraction must lie in (0, 1), got {f}"));
            }
        }
        Ok(())
    }
}

/// Error of one method against the analytic solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodError {
    pub name: String,
    /// Over the whole record.
    pub max_error: f64,
    pub rms_error: f64,
    /// Over `[0, window_end]`.
    pub max_error_window: f64,
    pub rms_error_window: f64,
    #[serde(skip)]
    pub error: Option<TimeSeries<f64>>,
}

impl MethodError {
    pub fn new<T: Sample>(name: &str, approx: &TimeSeries<T>, exact: &TimeSeries<T>, window_end: f64) -> Self {
        let err: Vec<f64> = approx.samples().iter().zip(exact.samples()).map(|(&a, &b)| (a - b).modulus()).collect();
        let in_window = approx.times().take_while(|&t| t <= window_end * (1.0 + 1e-12)).count();
        let max = |e: &[f64]| e.iter().copied().fold(0.0, f64::max);
        let rms = |e: &[f64]| {
            if e.is_empty() {
                0.0
            } else {
                (e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64).sqrt()
            }
        };
        Self {
            name: name.to_string(),
            max_error: max(&err),
            rms_error: rms(&err),
            max_error_window: max(&err[..in_window]),
            rms_error_window: rms(&err[..in_window]),
            error: Some(approx.with_samples(err)),
        }
    }
}

/// Per-method errors of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub window_end: f64,
    pub methods: Vec<MethodError>,
    pub runtime_seconds: f64,
}

impl ErrorReport {
    pub fn method(&self, name: &str) -> Option<&MethodError> {
        self.methods.iter().find(|m| m.name == name)
    }

    /// `max_error_window` of `baseline` over that of `improved`.
    pub fn separation(&self, baseline: &str, improved: &str) -> Option<f64> {
        Some(self.method(baseline)?.max_error_window / self.method(improved)?.max_error_window)
    }
}

/// Everything produced by [`run_ode_experiment`].
#[derive(Debug, Clone)]
pub struct OdeRun {
    pub config: OdeConfig,
    pub report: ErrorReport,
    pub residual: TheoremResidual,
    pub analytic: TimeSeries<Complex64>,
    pub forward_euler: TimeSeries<Complex64>,
    pub central_fd: TimeSeries<Complex64>,
    pub corrected: TimeSeries<Complex64>,
}

pub const FORWARD_EULER: &str = "forward_euler";
pub const CENTRAL_FD: &str = "central_fd";
pub const CORRECTED: &str = "corrected";

/// Runs forward Euler, plain central differences and the corrected pipeline
/// (FTDT, central differences, optional taper, ITDT) against the oracle.
///
/// Errors are reported on the whole record and on `[0, 0.9 t_max]`.
pub fn run_ode_experiment(cfg: &OdeConfig) -> Result<OdeRun> {
    cfg.validate()?;
    let start = Instant::now();
    let src = cfg.source()?;
    let n = cfg.n_samples()?;
    let scheme = SchemeSpec::central_difference(cfg.dt)?;
    let f = src.sample(n, cfg.dt)?;
    let analytic = analytic_samples(&src, n, cfg.dt)?;

    let forward_euler = solve_forward_euler(&f);
    let central_fd = solve_central_fd(&f);

    let fwd = build_operator(&scheme, n, Direction::Forward)?;
    let inv = build_operator(&scheme, n, Direction::Inverse)?;
    let g = fwd.apply(&f)?;
    let v = solve_central_fd(&g);
    let v = match cfg.taper_fraction {
        Some(frac) => taper(&v, frac)?,
        None => v,
    };
    let corrected = inv.apply(&v)?;
    let residual = theorem_residual(&g)?;

    for (name, s) in [(FORWARD_EULER, &forward_euler), (CENTRAL_FD, &central_fd), (CORRECTED, &corrected)] {
        if !s.samples().iter().all(|z| z.is_finite()) {
            return Err(crate::Error::Numeric(format!("{name} produced non-finite values")));
        }
    }
    let window_end = 0.9 * cfg.t_max;
    let methods = vec![
        MethodError::new(FORWARD_EULER, &forward_euler, &analytic, window_end),
        MethodError::new(CENTRAL_FD, &central_fd, &analytic, window_end),
        MethodError::new(CORRECTED, &corrected, &analytic, window_end),
    ];
    let report = ErrorReport { window_end, methods, runtime_seconds: start.elapsed().as_secs_f64() };
    Ok(OdeRun { config: *cfg, report, residual, analytic, forward_euler, central_fd, corrected })
}
