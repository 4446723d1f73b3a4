//! Hertz solutions, error norms and convergence rates.

mod analytic;
mod errors;
mod rates;

pub use analytic::{hertz_2d, hertz_3d, HertzAnalytic, HertzMode};
pub use errors::{displacement_errors, multiplier_errors, pressure_profile, ArcCoordinate, DiscreteField, MultiplierReference};
pub use rates::fit_rate;
