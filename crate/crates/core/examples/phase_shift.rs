// Phase-shift functions of the central and leapfrog schemes.

use dispersionlab::{Result, SchemeSpec};

pub fn run_example() -> Result<()> {
    let dt = 0.02;
    for scheme in [SchemeSpec::central_difference(dt)?, SchemeSpec::leapfrog(dt)?] {
        println!("{}: omega_max = {:.4}, q_max = {:.4}", scheme.name(), scheme.omega_max(), scheme.q_max());
        println!("{:>8} {:>12} {:>12} {:>12}", "omega", "q", "q'", "q_inv(q)");
        for k in 0..=5 {
            let omega = scheme.omega_max() * k as f64 / 5.0 * 0.999;
            let q = scheme.q(omega)?;
            println!("{omega:>8.4} {q:>12.6} {:>12.6} {:>12.6}", scheme.q_prime(omega)?, scheme.q_inv(q)?);
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
