// FTDT followed by ITDT. A pulse that is smooth and well inside the record
// comes back to rounding error; one cut off at the end of the record does not.

use dispersionlab::ode::GaussianSource;
use dispersionlab::series::max_abs_diff;
use dispersionlab::transforms::taper;
use dispersionlab::{Direction, Result, SchemeSpec, TimeSeries, TransformOperator};

pub fn run_example() -> Result<()> {
    let (n, dt) = (1000, 0.02);
    let scheme = SchemeSpec::central_difference(dt)?;
    let ftdt = TransformOperator::new(&scheme, n, Direction::Forward, 0.0)?;
    let itdt = TransformOperator::new(&scheme, n, Direction::Inverse, 0.0)?;

    let inside = GaussianSource::new(5.0, 0.1, 0.0)?.sample(n, dt)?;
    let back = itdt.apply(&ftdt.apply(&inside)?)?;
    println!("pulse inside the record:  max error {:.3e}", max_abs_diff(inside.samples(), back.samples()));

    let cut = GaussianSource::new(20.0, 0.1, 0.0)?.sample(n, dt)?;
    let back = itdt.apply(&ftdt.apply(&cut)?)?;
    println!("pulse cut at the end:     max error {:.3e}", max_abs_diff(cut.samples(), back.samples()));

    let tapered: TimeSeries<_> = taper(&cut, 0.1)?;
    let back = itdt.apply(&ftdt.apply(&tapered)?)?;
    println!("same pulse, 10% taper:    max error {:.3e}", max_abs_diff(tapered.samples(), back.samples()));
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
