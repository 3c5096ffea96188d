//! Finite-difference approximations of the time derivative and their phase
//! shift functions.
//!
//! A stencil `D v(t) = sum_n c_n v(t + n dt)` acts on `exp(2 pi i w t)` as
//! multiplication by `2 pi i q(w)`. The scheme is usable for dispersion
//! correction when `q` is real, odd and strictly increasing on the symmetric
//! interval `Omega = [-omega_max, omega_max]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Number of grid points used to validate user-supplied stencils.
const VALIDATION_POINTS: usize = 4096;

/// Relative slack allowed when checking domain membership at the endpoints.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// `(v(t+dt) - v(t-dt)) / 2dt`
    Central,
    /// `(v(t+dt/2) - v(t-dt/2)) / dt`, the staggered leapfrog derivative.
    Leapfrog,
    Custom,
}

/// One stencil tap: `weight * v(t + offset * dt)`.
///
/// `weight` is stored normalized, i.e. multiplied by `dt`, so the same taps
/// describe the scheme at every step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub offset: f64,
    pub weight: f64,
}

/// A finite-difference time-derivative stencil with its phase shift function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    name: String,
    kind: SchemeKind,
    dt: f64,
    taps: Vec<Tap>,
    omega_max: f64,
}

impl SchemeSpec {
    /// Central difference, `q(w) = sin(2 pi w dt) / (2 pi dt)` on `|w| <= 1/(4 dt)`.
    pub fn central_difference(dt: f64) -> Result<Self> {
        check_dt(dt)?;
        Ok(Self {
            name: "central".into(),
            kind: SchemeKind::Central,
            dt,
            taps: vec![
                Tap { offset: -1.0, weight: -0.5 },
                Tap { offset: 1.0, weight: 0.5 },
            ],
            omega_max: 0.25 / dt,
        })
    }

    /// Staggered leapfrog, `q(w) = sin(pi w dt) / (pi dt)` on `|w| <= 1/(2 dt)`.
    pub fn leapfrog(dt: f64) -> Result<Self> {
        check_dt(dt)?;
        Ok(Self {
            name: "leapfrog".into(),
            kind: SchemeKind::Leapfrog,
            dt,
            taps: vec![
                Tap { offset: -0.5, weight: -1.0 },
                Tap { offset: 0.5, weight: 1.0 },
            ],
            omega_max: 0.5 / dt,
        })
    }

    /// Builds a scheme from `(offset, weight)` pairs with weights in 1/s for
    /// the given `dt`.
    ///
    /// When `omega_max` is `None` the invertibility window is taken up to the
    /// first zero of `q'`. The phase function is checked on a 4096-point grid
    /// for being real, odd, zero at the origin and strictly increasing.
    pub fn from_coefficients(
        name: impl Into<String>,
        dt: f64,
        coefficients: &[(f64, f64)],
        omega_max: Option<f64>,
    ) -> Result<Self> {
        check_dt(dt)?;
        if coefficients.is_empty() {
            return invalid("stencil has no coefficients");
        }
        for &(offset, weight) in coefficients {
            if !offset.is_finite() || !weight.is_finite() {
                return invalid("stencil coefficients must be finite");
            }
            if ((2.0 * offset).round() - 2.0 * offset).abs() > 1e-12 {
                return invalid(format!(
                    "stencil offset {offset} is not an integer or half-integer"
                ));
            }
        }
        let taps: Vec<Tap> = coefficients
            .iter()
            .map(|&(offset, weight)| Tap { offset, weight: weight * dt })
            .collect();
        let mut spec = Self {
            name: name.into(),
            kind: SchemeKind::Custom,
            dt,
            taps,
            omega_max: f64::NAN,
        };
        spec.omega_max = match omega_max {
            Some(w) if w > 0.0 && w.is_finite() => w,
            Some(w) => return invalid(format!("omega_max must be positive, got {w}")),
            None => spec.find_window()? / dt,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The same stencil at a different step size.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        Ok(Self {
            dt,
            omega_max: self.omega_max * self.dt / dt,
            ..self.clone()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    /// Stencil weights in 1/s at the current step size.
    pub fn coefficients(&self) -> Vec<(f64, f64)> {
        self.taps
            .iter()
            .map(|t| (t.offset, t.weight / self.dt))
            .collect()
    }

    /// Half-width of the invertibility window in Hz.
    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// Half-width of `q(Omega)` in Hz.
    pub fn q_max(&self) -> f64 {
        self.q_raw(self.omega_max)
    }

    /// Raw stencil symbol `sum_n c_n exp(2 pi i n w dt)`, equal to `2 pi i q(w)`.
    pub fn symbol(&self, omega: f64) -> Complex64 {
        let eta = omega * self.dt;
        self.taps
            .iter()
            .map(|t| Complex64::from_polar(t.weight / self.dt, 2.0 * PI * t.offset * eta))
            .sum()
    }

    /// `q(w)` in Hz. Errors outside `Omega`.
    pub fn q(&self, omega: f64) -> Result<f64> {
        self.check_omega(omega)?;
        Ok(self.q_raw(omega))
    }

    /// `q'(w)`, dimensionless. Errors outside `Omega`.
    pub fn q_prime(&self, omega: f64) -> Result<f64> {
        self.check_omega(omega)?;
        Ok(self.q_prime_raw(omega))
    }

    /// `q^{-1}(xi)` in Hz. Errors outside `q(Omega)`.
    pub fn q_inv(&self, xi: f64) -> Result<f64> {
        let qm = self.q_max();
        if !xi.is_finite() || xi.abs() > qm * (1.0 + DOMAIN_SLACK) {
            return Err(Error::Domain { what: "xi", value: xi, lo: -qm, hi: qm });
        }
        Ok(self.q_inv_raw(xi.clamp(-qm, qm)))
    }

    /// Normalized phase function `q0(eta) = q(eta / dt) dt`, independent of `dt`.
    pub fn q0(&self, eta: f64) -> f64 {
        self.q_raw(eta / self.dt) * self.dt
    }

    /// Derivative of [`Self::q0`]; equals `q'(eta / dt)`.
    pub fn q0_prime(&self, eta: f64) -> f64 {
        self.q_prime_raw(eta / self.dt)
    }

    /// Inverse of [`Self::q0`] on `q0(Omega_0)`.
    pub fn q0_inv(&self, y: f64) -> f64 {
        self.q_inv_raw(y / self.dt) * self.dt
    }

    pub(crate) fn q_raw(&self, omega: f64) -> f64 {
        match self.kind {
            SchemeKind::Central => (2.0 * PI * omega * self.dt).sin() / (2.0 * PI * self.dt),
            SchemeKind::Leapfrog => (PI * omega * self.dt).sin() / (PI * self.dt),
            SchemeKind::Custom => {
                let eta = omega * self.dt;
                self.taps
                    .iter()
                    .map(|t| t.weight * (2.0 * PI * t.offset * eta).sin())
                    .sum::<f64>()
                    / (2.0 * PI * self.dt)
            }
        }
    }

    pub(crate) fn q_prime_raw(&self, omega: f64) -> f64 {
        match self.kind {
            SchemeKind::Central => (2.0 * PI * omega * self.dt).cos(),
            SchemeKind::Leapfrog => (PI * omega * self.dt).cos(),
            SchemeKind::Custom => {
                let eta = omega * self.dt;
                self.taps
                    .iter()
                    .map(|t| t.weight * t.offset * (2.0 * PI * t.offset * eta).cos())
                    .sum()
            }
        }
    }

    pub(crate) fn q_inv_raw(&self, xi: f64) -> f64 {
        match self.kind {
            SchemeKind::Central => {
                let s = (2.0 * PI * xi * self.dt).clamp(-1.0, 1.0);
                s.asin() / (2.0 * PI * self.dt)
            }
            SchemeKind::Leapfrog => {
                let s = (PI * xi * self.dt).clamp(-1.0, 1.0);
                s.asin() / (PI * self.dt)
            }
            SchemeKind::Custom => self.bisect_inverse(xi),
        }
    }

    fn bisect_inverse(&self, xi: f64) -> f64 {
        let (mut lo, mut hi) = (-self.omega_max, self.omega_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.q_raw(mid) < xi {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn check_omega(&self, omega: f64) -> Result<()> {
        if !omega.is_finite() || omega.abs() > self.omega_max * (1.0 + DOMAIN_SLACK) {
            return Err(Error::Domain {
                what: "omega",
                value: omega,
                lo: -self.omega_max,
                hi: self.omega_max,
            });
        }
        Ok(())
    }

    /// First zero of `q0'` on `(0, 1]`, in normalized units.
    fn find_window(&self) -> Result<f64> {
        let q0p = |eta: f64| self.q_prime_raw(eta / self.dt);
        if q0p(0.0) <= 0.0 {
            return invalid("q'(0) must be positive");
        }
        let steps = VALIDATION_POINTS;
        let mut prev = 0.0;
        for i in 1..=steps {
            let eta = i as f64 / steps as f64;
            if q0p(eta) <= 0.0 {
                let (mut lo, mut hi) = (prev, eta);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if q0p(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(lo);
            }
            prev = eta;
        }
        invalid("q' has no zero on (0, 1/dt]; cannot infer omega_max")
    }

    fn validate(&self) -> Result<()> {
        let scale: f64 = self.taps.iter().map(|t| t.weight.abs()).sum::<f64>() / self.dt;
        let tol = 1e-10 * scale.max(1.0);
        let mut prev_q = f64::NEG_INFINITY;
        for i in 0..=VALIDATION_POINTS {
            let omega = self.omega_max * (2.0 * i as f64 / VALIDATION_POINTS as f64 - 1.0);
            let symbol = self.symbol(omega);
            if symbol.re.abs() > tol {
                return invalid(format!(
                    "phase function is not real at omega = {omega} (symbol {symbol})"
                ));
            }
            let q = self.q_raw(omega);
            if (q + self.q_raw(-omega)).abs() > tol {
                return invalid(format!("phase function is not odd at omega = {omega}"));
            }
            if q <= prev_q {
                return invalid(format!(
                    "phase function is not strictly increasing at omega = {omega}"
                ));
            }
            prev_q = q;
        }
        if self.q_raw(0.0).abs() > tol {
            return invalid("q(0) must vanish");
        }
        Ok(())
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        invalid(format!("time step must be positive and finite, got {dt}"))
    }
}
