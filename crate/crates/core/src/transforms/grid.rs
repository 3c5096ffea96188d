use crate::scheme::{SchemeKind, SchemeSpec};

use super::Direction;

/// Frequency nodes `omega_m = m / (2 N dt)` used by the discrete transforms.
///
/// The spacing `1 / (2 N dt)` makes the time-domain sums length-`2N` DFTs.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    n: usize,
    dt: f64,
    indices: Vec<i64>,
}

impl FrequencyGrid {
    /// Nodes for a scheme and transform direction.
    ///
    /// Central scheme: `m = -N/2..=N/2`. Leapfrog: `m = -N+1..=N` for the
    /// inverse and `m = -N..=N-1` for the forward transform. Other schemes
    /// use every node with `|omega_m| <= omega_max`. The alternative inverse
    /// samples `q(Omega)` instead, `|m| <= 2 N dt q_max`.
    pub fn new(scheme: &SchemeSpec, n: usize, direction: Direction) -> Self {
        let ni = n as i64;
        let dt = scheme.dt();
        let indices: Vec<i64> = match (direction, scheme.kind()) {
            (Direction::InverseAlt, _) => {
                let m = (2.0 * n as f64 * dt * scheme.q_max() * (1.0 + 1e-12)).floor() as i64;
                (-m..=m).collect()
            }
            (_, SchemeKind::Central) => (-ni / 2..=ni / 2).collect(),
            (Direction::Inverse, SchemeKind::Leapfrog) => (-ni + 1..=ni).collect(),
            (Direction::Forward, SchemeKind::Leapfrog) => (-ni..=ni - 1).collect(),
            (_, SchemeKind::Custom) => {
                let m = (2.0 * n as f64 * dt * scheme.omega_max() * (1.0 + 1e-12)).floor() as i64;
                (-m..=m).collect()
            }
        };
        Self { n, dt, indices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    /// Node spacing in Hz.
    pub fn spacing(&self) -> f64 {
        1.0 / (2.0 * self.n as f64 * self.dt)
    }

    pub fn omega(&self, m: i64) -> f64 {
        m as f64 * self.spacing()
    }

    /// Position of node `m` in a length-`2N` DFT buffer.
    pub(crate) fn bin(&self, m: i64) -> usize {
        m.rem_euclid(2 * self.n as i64) as usize
    }
}
