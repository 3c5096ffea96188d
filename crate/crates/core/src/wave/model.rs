use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Material grid. Fields are stored row-major with `x` fastest, index
/// `j * nx + i`. A grid with `nz == 1` is one-dimensional and `dz` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct GridModel {
    pub nx: usize,
    pub nz: usize,
    pub dx: f64,
    pub dz: f64,
    pub rho: Vec<f64>,
    pub vp: Vec<f64>,
    pub vs: Vec<f64>,
    /// Quality factors; `f64::INFINITY` means no attenuation.
    pub qp: Vec<f64>,
    pub qs: Vec<f64>,
    pub n_mechanisms: usize,
    pub tau_sigma: Vec<f64>,
}

/// Sidecar JSON for the flat binary field files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub nx: usize,
    pub nz: usize,
    pub dx: f64,
    pub dz: f64,
    pub n_mechanisms: usize,
    pub tau_sigma: Vec<f64>,
    /// Field name to file name, relative to the descriptor.
    pub fields: BTreeMap<String, String>,
}

const FIELDS: [&str; 5] = ["rho", "vp", "vs", "qp", "qs"];

/// Smallest number of nodes per axis that leaves room for the stencil.
pub(crate) const MIN_NODES: usize = 2 * super::sim::HALF + 2;

impl GridModel {
    /// Uniform medium. `q = None` gives an elastic model with no mechanisms.
    #[allow(clippy::too_many_arguments)]
    pub fn homogeneous(
        nx: usize,
        nz: usize,
        dx: f64,
        dz: f64,
        rho: f64,
        vp: f64,
        vs: f64,
        q: Option<(f64, f64)>,
        tau_sigma: Vec<f64>,
    ) -> Result<Self> {
        let len = nx.saturating_mul(nz);
        let (qp, qs, tau_sigma) = match q {
            Some((qp, qs)) => (qp, qs, tau_sigma),
            None => (f64::INFINITY, f64::INFINITY, Vec::new()),
        };
        let m = Self {
            nx,
            nz,
            dx,
            dz,
            rho: vec![rho; len],
            vp: vec![vp; len],
            vs: vec![vs; len],
            qp: vec![qp; len],
            qs: vec![qs; len],
            n_mechanisms: tau_sigma.len(),
            tau_sigma,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn is_1d(&self) -> bool {
        self.nz == 1
    }

    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn vmax(&self) -> f64 {
        self.vp.iter().cloned().fold(0.0, f64::max)
    }

    /// `pi = rho vp^2`.
    pub fn pi_modulus(&self, k: usize) -> f64 {
        self.rho[k] * self.vp[k] * self.vp[k]
    }

    /// `mu = rho vs^2`.
    pub fn mu_modulus(&self, k: usize) -> f64 {
        self.rho[k] * self.vs[k] * self.vs[k]
    }

    /// `tau^p = 2 / Q_p`, zero for an elastic node.
    pub fn tau_p(&self, k: usize) -> f64 {
        2.0 / self.qp[k]
    }

    pub fn tau_s(&self, k: usize) -> f64 {
        2.0 / self.qs[k]
    }

    pub fn is_elastic(&self) -> bool {
        self.n_mechanisms == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < MIN_NODES || (self.nz != 1 && self.nz < MIN_NODES) {
            return invalid(format!(
                "grid {}x{} is too small; each axis needs at least {MIN_NODES} nodes (nz = 1 for 1D)",
                self.nx, self.nz
            ));
        }
        if !(self.dx > 0.0 && self.dx.is_finite()) || (!self.is_1d() && !(self.dz > 0.0 && self.dz.is_finite())) {
            return invalid(format!("grid spacing must be positive, got dx = {}, dz = {}", self.dx, self.dz));
        }
        let len = self.len();
        for (name, field) in self.fields() {
            if field.len() != len {
                return invalid(format!("field {name} has {} values, expected {len}", field.len()));
            }
        }
        for k in 0..len {
            let (rho, vp, vs) = (self.rho[k], self.vp[k], self.vs[k]);
            if !(rho > 0.0 && rho.is_finite() && vp > 0.0 && vp.is_finite() && vs > 0.0 && vs.is_finite()) {
                return invalid(format!("material values must be positive at node {k}: rho {rho}, vp {vp}, vs {vs}"));
            }
            if vs > vp {
                return invalid(format!("vs = {vs} exceeds vp = {vp} at node {k}"));
            }
            let (qp, qs) = (self.qp[k], self.qs[k]);
            if !(qp > 0.0 && qs > 0.0) {
                return invalid(format!("quality factors must be positive at node {k}: qp {qp}, qs {qs}"));
            }
            if self.n_mechanisms == 0 && (qp.is_finite() || qs.is_finite()) {
                return invalid(format!("finite Q at node {k} needs at least one relaxation mechanism"));
            }
        }
        if self.tau_sigma.len() != self.n_mechanisms {
            return invalid(format!(
                "{} relaxation times given for {} mechanisms",
                self.tau_sigma.len(),
                self.n_mechanisms
            ));
        }
        if let Some(t) = self.tau_sigma.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return invalid(format!("relaxation times must be positive, got {t}"));
        }
        Ok(())
    }

    fn fields(&self) -> [(&'static str, &Vec<f64>); 5] {
        [("rho", &self.rho), ("vp", &self.vp), ("vs", &self.vs), ("qp", &self.qp), ("qs", &self.qs)]
    }

    /// Writes `<stem>.json` and one `<stem>_<field>.bin` per field into `dir`.
    /// Returns the descriptor path.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<PathBuf> {
        self.validate()?;
        fs::create_dir_all(dir)?;
        let mut fields = BTreeMap::new();
        for (name, data) in self.fields() {
            let file = format!("{stem}_{name}.bin");
            let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_le_bytes()).collect();
            fs::write(dir.join(&file), bytes)?;
            fields.insert(name.to_string(), file);
        }
        let desc = ModelDescriptor {
            nx: self.nx,
            nz: self.nz,
            dx: self.dx,
            dz: self.dz,
            n_mechanisms: self.n_mechanisms,
            tau_sigma: self.tau_sigma.clone(),
            fields,
        };
        let path = dir.join(format!("{stem}.json"));
        fs::write(&path, serde_json::to_string_pretty(&desc)?)?;
        Ok(path)
    }

    pub fn read(descriptor: &Path) -> Result<Self> {
        let desc: ModelDescriptor = serde_json::from_str(&fs::read_to_string(descriptor)?)?;
        let base = descriptor.parent().unwrap_or(Path::new("."));
        let len = desc.nx.checked_mul(desc.nz).ok_or_else(|| Error::InvalidArgument("grid too large".into()))?;
        let read = |name: &str| -> Result<Vec<f64>> {
            let file = desc
                .fields
                .get(name)
                .ok_or_else(|| Error::InvalidArgument(format!("descriptor has no field {name}")))?;
            let bytes = fs::read(base.join(file))?;
            if bytes.len() != 8 * len {
                return invalid(format!("{file}: expected {} bytes, found {}", 8 * len, bytes.len()));
            }
            Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
        };
        if let Some(extra) = desc.fields.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return invalid(format!("unknown model field {extra}"));
        }
        let m = Self {
            nx: desc.nx,
            nz: desc.nz,
            dx: desc.dx,
            dz: desc.dz,
            rho: read("rho")?,
            vp: read("vp")?,
            vs: read("vs")?,
            qp: read("qp")?,
            qs: read("qs")?,
            n_mechanisms: desc.n_mechanisms,
            tau_sigma: desc.tau_sigma,
        };
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn visco() -> GridModel {
        GridModel::homogeneous(20, 16, 10.0, 10.0, 2000.0, 2000.0, 1100.0, Some((50.0, 40.0)), vec![0.01, 0.004])
            .unwrap()
    }

    #[test]
    fn derived_moduli() {
        let m = visco();
        assert_eq!(m.pi_modulus(3), 2000.0 * 2000.0 * 2000.0);
        assert_eq!(m.mu_modulus(3), 2000.0 * 1100.0 * 1100.0);
        assert_eq!(m.tau_p(0), 0.04);
        assert_eq!(m.tau_s(0), 0.05);
        let e = GridModel::homogeneous(20, 1, 10.0, 10.0, 1.0, 1.0, 0.5, None, vec![1.0]).unwrap();
        assert_eq!(e.tau_p(0), 0.0);
        assert!(e.is_elastic() && e.is_1d());
    }

    #[test]
    fn invalid_models() {
        let ok = visco();
        let mut m = ok.clone();
        m.vs[5] = 2500.0;
        assert!(m.validate().is_err());
        let mut m = ok.clone();
        m.rho[0] = 0.0;
        assert!(m.validate().is_err());
        let mut m = ok.clone();
        m.n_mechanisms = 0;
        m.tau_sigma.clear();
        assert!(m.validate().is_err());
        let mut m = ok.clone();
        m.qp.pop();
        assert!(m.validate().is_err());
        assert!(GridModel::homogeneous(8, 1, 10.0, 10.0, 1.0, 1.0, 1.0, None, vec![]).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = visco();
        m.vp[7] = 2345.678901234;
        m.qs[2] = f64::INFINITY;
        let path = m.write(dir.path(), "model").unwrap();
        assert_eq!(GridModel::read(&path).unwrap(), m);
        let raw = fs::read(dir.path().join("model_vp.bin")).unwrap();
        assert_eq!(raw.len(), 8 * m.len());
        assert_eq!(f64::from_le_bytes(raw[56..64].try_into().unwrap()), 2345.678901234);
    }

    #[test]
    fn truncated_field_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = visco().write(dir.path(), "m").unwrap();
        fs::write(dir.path().join("m_rho.bin"), [0u8; 16]).unwrap();
        assert!(GridModel::read(&path).is_err());
    }
}
