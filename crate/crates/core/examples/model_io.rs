// Writes a layered model as flat binary files, reads it back, runs it and
// stores a receiver trace as CSV.

use dispersionlab::wave::{run_simulation, GridModel, Receiver, Ricker, SimOptions};
use dispersionlab::{Result, TimeSeries};

pub fn run_example() -> Result<()> {
    let dir = std::env::temp_dir().join("dispersionlab-model-io");
    let mut model = GridModel::homogeneous(300, 1, 10.0, 10.0, 2000.0, 2000.0, 1000.0, None, vec![])?;
    for i in 150..300 {
        model.vp[i] = 2600.0;
        model.rho[i] = 2200.0;
    }
    let path = model.write(&dir, "layered")?;
    let back = GridModel::read(&path)?;
    assert_eq!(back, model);

    let dt = 1e-3;
    let ricker = Ricker::new(15.0, 0.1)?;
    let wavelet = TimeSeries::from_fn(600, dt, 0.0, |t| ricker.eval(t))?;
    let out = run_simulation(&back, &SimOptions::default(), Receiver::new(100, 0), &wavelet, &[Receiver::new(120, 0)], 600)?;
    let csv = dir.join("trace.csv");
    out.pressure[0].write_csv_file(&csv)?;
    println!("model in {}, trace in {}", path.display(), csv.display());
    println!("peak |sigma| = {:.3e}", out.pressure[0].max_abs());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
