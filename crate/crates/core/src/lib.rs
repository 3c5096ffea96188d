//! Time-dispersion removal for finite-difference time stepping.
//!
//! A finite-difference approximation of `d/dt` acts on `exp(2 pi i omega t)`
//! as multiplication by `2 pi i q(omega)` for a phase-shift function `q`.
//! Filtering the source with the forward time dispersion transform and the
//! solution with the inverse transform removes the resulting phase error.
//!
//! * [`scheme`]: stencils and their phase-shift functions.
//! * [`transforms`]: the discrete FTDT/ITDT operators, taper and kernels.
//! * [`ode`]: the scalar model problem with an analytic oracle.
//! * [`wave`]: a staggered-grid elastic and viscoelastic simulator.
//! * [`microlocal`]: Gaussian wave packets and their phase-space centers.
//! * [`cli`]: configuration, presets and the experiment runner.

pub mod cli;
pub mod error;
pub mod microlocal;
pub mod ode;
pub mod quadrature;
pub mod scheme;
pub mod series;
pub mod transforms;
pub mod wave;

pub use error::{Error, Result};
pub use scheme::{SchemeKind, SchemeSpec};
pub use series::TimeSeries;
pub use transforms::{build_alt_inverse, build_operator, Direction, TransformOperator};
