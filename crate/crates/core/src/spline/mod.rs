//! B-spline and NURBS spaces: knot vectors, Cox–de Boor evaluation, tensor
//! products, refinement and the degree `p - 2` multiplier spaces.

mod basis;
mod knots;
mod refine;
mod tensor;

pub use basis::BasisEvaluation;
pub use knots::KnotVector;
pub use refine::{elevate_bezier, eval_curve, insert_knot, insert_knots};
pub use tensor::{multiplier_space, TensorBasisEvaluation, TensorSpace, WeightedSpace};
