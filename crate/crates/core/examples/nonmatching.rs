// A 2x2 system where the auxiliary equation uses leapfrog and the main one
// central differences. After transforming with the main scheme the
// auxiliary equation only holds once the convolution kernel is included.

use dispersionlab::ode::{verify_nonmatching, AuxStencil, NonmatchingSetup};
use dispersionlab::Result;

pub fn run_example() -> Result<()> {
    for aux in [AuxStencil::Leapfrog, AuxStencil::Central] {
        let setup = NonmatchingSetup { aux, ..NonmatchingSetup::default() };
        let r = verify_nonmatching(&setup)?;
        println!(
            "{aux:?}: main {:.2e}, aux with G {:.2e}, aux without G {:.2e}",
            r.residual_main, r.residual_aux_with_g, r.residual_aux_without_g
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
