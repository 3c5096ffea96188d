// Stability limit of the staggered scheme, and what happens just above it.

use dispersionlab::wave::{cfl_max_dt, GridModel, Receiver, SimState, Simulator, Sponge, StencilWeights};
use dispersionlab::Result;

pub fn run_example() -> Result<()> {
    let w = StencilWeights::default();
    println!("sum |alpha| = {:.6}", w.abs_sum());
    for (name, dz) in [("1D", f64::INFINITY), ("2D", 10.0)] {
        println!("{name}: dt_max = {:.4e} s at vp = 2000, dx = 10", cfl_max_dt(2000.0, 10.0, dz, &w));
    }

    let model = GridModel::homogeneous(200, 1, 10.0, 10.0, 2000.0, 2000.0, 1000.0, None, vec![])?;
    let limit = cfl_max_dt(model.vmax(), model.dx, f64::INFINITY, &w);
    for factor in [0.95, 1.05] {
        let sim = Simulator::without_cfl_check(&model, factor * limit, &w, &Sponge::default())?;
        let src = sim.check_receiver(Receiver::new(100, 0))?;
        let mut s = SimState::zeros(&model);
        sim.step(&mut s, Some((src, 1.0)));
        for _ in 0..2000 {
            sim.step(&mut s, None);
        }
        println!("{factor} x CFL: max |field| after 2000 steps = {:.3e}", s.max_abs());
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
