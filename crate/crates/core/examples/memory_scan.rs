// How fast the memory-variable term that the correction leaves behind
// shrinks with dt, on an attenuating 1D line.

use dispersionlab::wave::{default_tau_sigma, memory_residual_scan, ModelSpec, Receiver, WaveConfig};
use dispersionlab::Result;

pub fn run_example() -> Result<()> {
    let mut cfg = WaveConfig::wave1d_elastic();
    if let ModelSpec::Homogeneous { qp, qs, n_mechanisms, tau_sigma, .. } = &mut cfg.model {
        *qp = Some(30.0);
        *qs = Some(30.0);
        *n_mechanisms = 3;
        *tau_sigma = Some(default_tau_sigma(3, cfg.wavelet.fpeak));
    }
    cfg.receivers = vec![Receiver::new(350, 0), Receiver::new(450, 0)];
    cfg.t_max = 1.2;
    let scan = memory_residual_scan(&cfg, &[2e-3, 1e-3, 5e-4])?;
    for row in &scan.rows {
        println!("dt {:.1e}: residual {:.3e}", row.dt, row.residual);
    }
    for r in scan.ratios.iter().flatten() {
        println!("ratio {r:.4}");
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
