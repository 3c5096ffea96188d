// The forward transform of a solution that vanishes for t < 0 is small,
// but not zero, at negative times.

use dispersionlab::microlocal::lemma_init_check;
use dispersionlab::ode::GaussianSource;
use dispersionlab::Result;

pub fn run_example() -> Result<()> {
    let src = GaussianSource::new(5.0, 0.1, 0.0)?;
    let r = lemma_init_check(&src, &[0.04, 0.02, 0.01], 20.0)?;
    for row in &r.rows {
        println!("dt {:.2}: sup over t <= 0 of |FTDT u| = {:.3e}", row.dt, row.sup);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
