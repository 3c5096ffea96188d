// Phase-space centers of a Gaussian packet after ITDT and FTDT, next to
// the points predicted by the canonical map.

use dispersionlab::microlocal::packet_ladder;
use dispersionlab::Result;

pub fn run_example() -> Result<()> {
    let r = packet_ladder(1.0, 0.1, &[4e-3, 2e-3, 1e-3], 3.0)?;
    println!("ITDT target ({:.5}, {:.5})", r.itdt_target.t, r.itdt_target.eta);
    println!("FTDT target ({:.5}, {:.5})", r.ftdt_target.t, r.ftdt_target.eta);
    for row in &r.rows {
        println!(
            "h = {:.0e}: ITDT ({:.5}, {:.5}) err {:.2e}, FTDT ({:.5}, {:.5}) err {:.2e}",
            row.dt,
            row.itdt_center.t,
            row.itdt_center.eta,
            row.itdt_error,
            row.ftdt_center.t,
            row.ftdt_center.eta,
            row.ftdt_error
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
