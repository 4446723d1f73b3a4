//! Multiplier space on the contact face, gaps, weighted-gap projection,
//! coupling operator and the active-set operator.

mod gap;
mod multiplier;
mod state;

pub use gap::{gap_value, weighted_gap, GapField};
pub use multiplier::{coupling_matrix, ContactPoint, MultiplierBasis};
pub use state::{active_set_update, contact_residual, contact_tangent, status_of, ContactState, Status};
