use serde::{Deserialize, Serialize};

use super::model::GridModel;
use super::{cfl_max_dt, StencilWeights};
use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

/// Half width of the spatial stencil.
pub(crate) const HALF: usize = 6;

const NAN_CHECK_INTERVAL: usize = 100;

/// Exponential damping layer next to a rigid outer edge.
///
/// A node `d` cells inside the layer is multiplied by `exp(-(coefficient d)^2)`
/// once per step of the model's CFL limit. Other steps scale the exponent by
/// `dt / dt_cfl`, so the damping per unit time does not depend on `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sponge {
    pub width: usize,
    pub coefficient: f64,
}

impl Default for Sponge {
    fn default() -> Self {
        Self { width: 30, coefficient: 0.0053 }
    }
}

/// A stress node `(i, j)`; `j = 0` on a 1D grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receiver {
    pub i: usize,
    pub j: usize,
}

impl Receiver {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

/// Fields of one simulation. Velocities are at step `step`, stresses and
/// memory variables half a step earlier. Memory variables are stored
/// node-major, `r[k * n_mechanisms + l]`. Unused 1D fields are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub vx: Vec<f64>,
    pub vz: Vec<f64>,
    pub sxx: Vec<f64>,
    pub szz: Vec<f64>,
    pub sxz: Vec<f64>,
    pub rxx: Vec<f64>,
    pub rzz: Vec<f64>,
    pub rxz: Vec<f64>,
    pub step: usize,
}

impl SimState {
    pub fn zeros(model: &GridModel) -> Self {
        let len = model.len();
        let nm = model.n_mechanisms;
        let two = |n: usize| if model.is_1d() { Vec::new() } else { vec![0.0; n] };
        Self {
            vx: vec![0.0; len],
            vz: two(len),
            sxx: vec![0.0; len],
            szz: two(len),
            sxz: two(len),
            rxx: vec![0.0; len * nm],
            rzz: two(len * nm),
            rxz: two(len * nm),
            step: 0,
        }
    }

    fn all(&self) -> impl Iterator<Item = &f64> {
        self.vx.iter().chain(&self.vz).chain(&self.sxx).chain(&self.szz).chain(&self.sxz)
    }

    /// Largest absolute velocity or stress value.
    pub fn max_abs(&self) -> f64 {
        self.all().fold(0.0, |m, v| if v.abs() > m || v.is_nan() { v.abs() } else { m })
    }

    pub fn is_finite(&self) -> bool {
        self.all().chain(&self.rxx).chain(&self.rzz).chain(&self.rxz).all(|v| v.is_finite())
    }
}

/// Precomputed coefficients for stepping one model at one `dt`.
#[derive(Debug, Clone)]
pub struct Simulator {
    nx: usize,
    nz: usize,
    dx: f64,
    dz: f64,
    dt: f64,
    alpha: [f64; 6],
    n_mech: usize,
    // stress nodes: rate = c_lam tr + c_mu e_ii + mean memory
    c_lam: Vec<f64>,
    c_mu: Vec<f64>,
    m_lam: Vec<f64>,
    m_mu: Vec<f64>,
    // shear nodes at (i + 1/2, j + 1/2)
    c_xz: Vec<f64>,
    m_xz: Vec<f64>,
    bx: Vec<f64>,
    bz: Vec<f64>,
    mem_a: Vec<f64>,
    mem_b: Vec<f64>,
    damp_x: [Vec<f64>; 2],
    damp_z: [Vec<f64>; 2],
    cell: f64,
}

impl Simulator {
    pub fn new(model: &GridModel, dt: f64, weights: &StencilWeights, sponge: &Sponge) -> Result<Self> {
        model.validate()?;
        let limit = stable_dt(model, weights);
        if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
            return Err(Error::Domain { what: "time step", value: dt, lo: 0.0, hi: limit });
        }
        Self::build(model, dt, weights, sponge)
    }

    /// Skips the CFL check, for stability experiments.
    pub fn without_cfl_check(model: &GridModel, dt: f64, weights: &StencilWeights, sponge: &Sponge) -> Result<Self> {
        model.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        Self::build(model, dt, weights, sponge)
    }

    fn build(model: &GridModel, dt: f64, weights: &StencilWeights, sponge: &Sponge) -> Result<Self> {
        if !(sponge.coefficient >= 0.0 && sponge.coefficient.is_finite()) {
            return invalid(format!("sponge coefficient must be non-negative, got {}", sponge.coefficient));
        }
        let (nx, nz) = (model.nx, model.nz);
        let len = model.len();
        let mut c_lam = vec![0.0; len];
        let mut c_mu = vec![0.0; len];
        let mut m_lam = vec![0.0; len];
        let mut m_mu = vec![0.0; len];
        for k in 0..len {
            let (pi, mu) = (model.pi_modulus(k), model.mu_modulus(k));
            let (tp, ts) = (model.tau_p(k), model.tau_s(k));
            c_lam[k] = pi * (1.0 + tp) - 2.0 * mu * (1.0 + ts);
            c_mu[k] = 2.0 * mu * (1.0 + ts);
            m_lam[k] = pi * tp - 2.0 * mu * ts;
            m_mu[k] = 2.0 * mu * ts;
        }
        let mut c_xz = vec![0.0; len];
        let mut m_xz = vec![0.0; len];
        let mut bx = vec![0.0; len];
        let mut bz = vec![0.0; len];
        for j in 0..nz {
            for i in 0..nx {
                let k = model.index(i, j);
                if i + 1 < nx {
                    bx[k] = 2.0 / (model.rho[k] + model.rho[k + 1]);
                }
                if j + 1 < nz {
                    bz[k] = 2.0 / (model.rho[k] + model.rho[k + nx]);
                }
                if i + 1 < nx && j + 1 < nz {
                    let corners = [k, k + 1, k + nx, k + nx + 1];
                    let mu = 4.0 / corners.iter().map(|&c| 1.0 / model.mu_modulus(c)).sum::<f64>();
                    let ts = corners.iter().map(|&c| model.tau_s(c)).sum::<f64>() / 4.0;
                    c_xz[k] = mu * (1.0 + ts);
                    m_xz[k] = mu * ts;
                }
            }
        }
        let mem_a = model.tau_sigma.iter().map(|t| (1.0 - dt / (2.0 * t)) / (1.0 + dt / (2.0 * t))).collect();
        let mem_b = model.tau_sigma.iter().map(|t| (dt / t) / (1.0 + dt / (2.0 * t))).collect();
        let rate = dt / stable_dt(model, weights);
        let profile = |n: usize, offset: f64| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let p = i as f64 + offset;
                    let w = sponge.width as f64;
                    let d = (w - p).max(p - (n as f64 - 1.0 - w)).max(0.0);
                    (-(sponge.coefficient * d).powi(2) * rate).exp()
                })
                .collect()
        };
        let damp_x = [profile(nx, 0.0), profile(nx, 0.5)];
        let damp_z = if model.is_1d() { [vec![1.0], vec![1.0]] } else { [profile(nz, 0.0), profile(nz, 0.5)] };
        Ok(Self {
            nx,
            nz,
            dx: model.dx,
            dz: model.dz,
            dt,
            alpha: weights.alpha,
            n_mech: model.n_mechanisms,
            c_lam,
            c_mu,
            m_lam,
            m_mu,
            c_xz,
            m_xz,
            bx,
            bz,
            mem_a,
            mem_b,
            damp_x,
            damp_z,
            cell: if model.is_1d() { model.dx } else { model.dx * model.dz },
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn is_1d(&self) -> bool {
        self.nz == 1
    }

    pub fn check_receiver(&self, r: Receiver) -> Result<usize> {
        let inside = |p: usize, n: usize| (HALF..n - HALF).contains(&p);
        let ok = inside(r.i, self.nx) && if self.is_1d() { r.j == 0 } else { inside(r.j, self.nz) };
        if !ok {
            return invalid(format!(
                "position ({}, {}) is outside the updated interior of the {}x{} grid",
                r.i, r.j, self.nx, self.nz
            ));
        }
        Ok(r.j * self.nx + r.i)
    }

    /// Advances one step. `source` is a stress-node index and the wavelet value
    /// at the velocity time level the update is centered on.
    pub fn step(&self, s: &mut SimState, source: Option<(usize, f64)>) {
        if self.is_1d() {
            self.step_1d(s, source);
        } else {
            self.step_2d(s, source);
        }
        s.step += 1;
    }

    /// Memory update for one node; returns the mechanism-averaged `M R`.
    #[inline]
    fn memory(&self, r: &mut [f64], strain: f64) -> f64 {
        let mut acc = 0.0;
        for ((r, a), b) in r.iter_mut().zip(&self.mem_a).zip(&self.mem_b) {
            let new = a * *r - b * strain;
            acc += 0.5 * (new + *r);
            *r = new;
        }
        acc / self.n_mech as f64
    }

    fn step_1d(&self, s: &mut SimState, source: Option<(usize, f64)>) {
        let (nx, nm, a, dt) = (self.nx, self.n_mech, &self.alpha, self.dt);
        let inv_dx = 1.0 / self.dx;
        for i in HALF..nx - HALF {
            let mut e = 0.0;
            for l in 1..=HALF {
                e += a[l - 1] * (s.vx[i + l - 1] - s.vx[i - l]);
            }
            e *= inv_dx;
            let mut rate = (self.c_lam[i] + self.c_mu[i]) * e;
            if nm > 0 {
                let strain = (self.m_lam[i] + self.m_mu[i]) * e;
                rate += self.memory(&mut s.rxx[i * nm..(i + 1) * nm], strain);
            }
            s.sxx[i] += dt * rate;
        }
        if let Some((k, v)) = source {
            s.sxx[k] += dt * v / self.cell;
        }
        for i in HALF - 1..nx - HALF {
            let mut d = 0.0;
            for l in 1..=HALF {
                d += a[l - 1] * (s.sxx[i + l] - s.sxx[i + 1 - l]);
            }
            s.vx[i] += dt * self.bx[i] * d * inv_dx;
        }
        let [int, half] = &self.damp_x;
        for i in 0..nx {
            s.sxx[i] *= int[i];
            s.vx[i] *= half[i];
        }
    }

    fn step_2d(&self, s: &mut SimState, source: Option<(usize, f64)>) {
        let (nx, nz, nm, a, dt) = (self.nx, self.nz, self.n_mech, &self.alpha, self.dt);
        let (inv_dx, inv_dz) = (1.0 / self.dx, 1.0 / self.dz);
        for j in HALF..nz - HALF {
            for i in HALF..nx - HALF {
                let k = j * nx + i;
                let (mut exx, mut ezz) = (0.0, 0.0);
                for l in 1..=HALF {
                    exx += a[l - 1] * (s.vx[k + l - 1] - s.vx[k - l]);
                    ezz += a[l - 1] * (s.vz[k + (l - 1) * nx] - s.vz[k - l * nx]);
                }
                exx *= inv_dx;
                ezz *= inv_dz;
                let tr = exx + ezz;
                let (mut rate_xx, mut rate_zz) = (self.c_lam[k] * tr + self.c_mu[k] * exx, self.c_lam[k] * tr + self.c_mu[k] * ezz);
                if nm > 0 {
                    let base = self.m_lam[k] * tr;
                    rate_xx += self.memory(&mut s.rxx[k * nm..(k + 1) * nm], base + self.m_mu[k] * exx);
                    rate_zz += self.memory(&mut s.rzz[k * nm..(k + 1) * nm], base + self.m_mu[k] * ezz);
                }
                s.sxx[k] += dt * rate_xx;
                s.szz[k] += dt * rate_zz;
            }
        }
        for j in HALF - 1..nz - HALF {
            for i in HALF - 1..nx - HALF {
                let k = j * nx + i;
                let (mut dvx_dz, mut dvz_dx) = (0.0, 0.0);
                for l in 1..=HALF {
                    dvx_dz += a[l - 1] * (s.vx[k + l * nx] - s.vx[k + nx - l * nx]);
                    dvz_dx += a[l - 1] * (s.vz[k + l] - s.vz[k + 1 - l]);
                }
                let e = dvx_dz * inv_dz + dvz_dx * inv_dx;
                let mut rate = self.c_xz[k] * e;
                if nm > 0 {
                    rate += self.memory(&mut s.rxz[k * nm..(k + 1) * nm], self.m_xz[k] * e);
                }
                s.sxz[k] += dt * rate;
            }
        }
        if let Some((k, v)) = source {
            let amp = dt * v / self.cell;
            s.sxx[k] += amp;
            s.szz[k] += amp;
        }
        for j in HALF - 1..nz - HALF {
            for i in HALF - 1..nx - HALF {
                let k = j * nx + i;
                if j >= HALF {
                    let (mut dxx, mut dxz) = (0.0, 0.0);
                    for l in 1..=HALF {
                        dxx += a[l - 1] * (s.sxx[k + l] - s.sxx[k + 1 - l]);
                        dxz += a[l - 1] * (s.sxz[k + (l - 1) * nx] - s.sxz[k - l * nx]);
                    }
                    s.vx[k] += dt * self.bx[k] * (dxx * inv_dx + dxz * inv_dz);
                }
                if i >= HALF {
                    let (mut dxz, mut dzz) = (0.0, 0.0);
                    for l in 1..=HALF {
                        dxz += a[l - 1] * (s.sxz[k + l - 1] - s.sxz[k - l]);
                        dzz += a[l - 1] * (s.szz[k + l * nx] - s.szz[k + nx - l * nx]);
                    }
                    s.vz[k] += dt * self.bz[k] * (dxz * inv_dx + dzz * inv_dz);
                }
            }
        }
        let ([xi, xh], [zi, zh]) = (&self.damp_x, &self.damp_z);
        for j in 0..nz {
            for i in 0..nx {
                let k = j * nx + i;
                let c = xi[i] * zi[j];
                s.sxx[k] *= c;
                s.szz[k] *= c;
                s.sxz[k] *= xh[i] * zh[j];
                s.vx[k] *= xh[i] * zi[j];
                s.vz[k] *= xi[i] * zh[j];
            }
        }
    }

    /// `sigma_xx + sigma_zz` in 2D, `sigma` in 1D.
    pub fn pressure(&self, s: &SimState, k: usize) -> f64 {
        if self.is_1d() {
            s.sxx[k]
        } else {
            s.sxx[k] + s.szz[k]
        }
    }
}

fn stable_dt(model: &GridModel, w: &StencilWeights) -> f64 {
    let dz = if model.is_1d() { f64::INFINITY } else { model.dz };
    cfl_max_dt(model.vmax(), model.dx, dz, w)
}

/// Solver settings shared by all runs of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOptions {
    #[serde(default)]
    pub weights: StencilWeights,
    #[serde(default)]
    pub sponge: Sponge,
}

/// Receiver traces at the stress time levels, `t0 = dt / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub pressure: Vec<TimeSeries<f64>>,
    /// `r_xx` per receiver and mechanism.
    pub memory: Vec<Vec<TimeSeries<f64>>>,
}

/// Runs `n_steps` from rest. Wavelet sample `n` drives step `n`, so the
/// wavelet must start at `t = 0` and share the simulation `dt`. Samples past
/// its end are zero.
pub fn run_simulation(
    model: &GridModel,
    options: &SimOptions,
    source: Receiver,
    wavelet: &TimeSeries<f64>,
    receivers: &[Receiver],
    n_steps: usize,
) -> Result<SimOutput> {
    let sim = Simulator::new(model, wavelet.dt(), &options.weights, &options.sponge)?;
    run_with(&sim, model, source, wavelet, receivers, n_steps)
}

pub(crate) fn run_with(
    sim: &Simulator,
    model: &GridModel,
    source: Receiver,
    wavelet: &TimeSeries<f64>,
    receivers: &[Receiver],
    n_steps: usize,
) -> Result<SimOutput> {
    let dt = sim.dt();
    if wavelet.t0().abs() > 1e-9 * dt {
        return invalid(format!("source wavelet must start at t = 0, got {}", wavelet.t0()));
    }
    if wavelet.dt() != dt {
        return invalid(format!("wavelet dt {} differs from simulation dt {dt}", wavelet.dt()));
    }
    let src = sim.check_receiver(source)?;
    let idx: Vec<usize> = receivers.iter().map(|&r| sim.check_receiver(r)).collect::<Result<_>>()?;
    let nm = model.n_mechanisms;
    let mut pressure = vec![Vec::with_capacity(n_steps); idx.len()];
    let mut memory = vec![vec![Vec::with_capacity(n_steps); nm]; idx.len()];
    let mut state = SimState::zeros(model);
    let w = wavelet.samples();
    for n in 0..n_steps {
        let value = w.get(n).copied().unwrap_or(0.0);
        sim.step(&mut state, (value != 0.0).then_some((src, value)));
        for (r, &k) in idx.iter().enumerate() {
            pressure[r].push(sim.pressure(&state, k));
            for (l, m) in memory[r].iter_mut().enumerate() {
                m.push(state.rxx[k * nm + l]);
            }
        }
        if ((n + 1) % NAN_CHECK_INTERVAL == 0 || n + 1 == n_steps)
            && !state.is_finite() {
                return Err(Error::Numeric(format!("non-finite wavefield at step {}", n + 1)));
            }
    }
    let series = |v: Vec<f64>| TimeSeries::with_origin(v, dt, 0.5 * dt);
    Ok(SimOutput {
        pressure: pressure.into_iter().map(series).collect::<Result<_>>()?,
        memory: memory
            .into_iter()
            .map(|ms| ms.into_iter().map(series).collect::<Result<_>>())
            .collect::<Result<_>>()?,
    })
}
