// One dense operator applied to many traces in parallel.

use dispersionlab::{Direction, Result, SchemeSpec, TimeSeries, TransformOperator};

pub fn run_example() -> Result<()> {
    let (n, dt) = (1024, 1e-3);
    let scheme = SchemeSpec::leapfrog(dt)?;
    let itdt = TransformOperator::new(&scheme, n, Direction::Inverse, 0.5 * dt)?;
    let traces: Vec<_> = (0..64)
        .map(|k| {
            let f = 5.0 + k as f64;
            TimeSeries::with_origin((0..n).map(|i| (2.0 * std::f64::consts::PI * f * (i as f64 + 0.5) * dt).sin()).collect(), dt, 0.5 * dt)
        })
        .collect::<Result<_>>()?;
    let start = std::time::Instant::now();
    let out = itdt.apply_many(&traces)?;
    println!("{} traces of {} samples in {:.1} ms", out.len(), n, 1e3 * start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
