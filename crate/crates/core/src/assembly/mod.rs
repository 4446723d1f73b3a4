//! Quadrature, dof numbering, linear and Neo-Hookean elasticity, loads and
//! Dirichlet constraints.

mod constraints;
mod dofs;
mod elasticity;
mod hyperelastic;
mod load;
mod material;
mod quadrature;

pub use constraints::{apply_constraints, eliminate, face_constraints, merge_constraints};
pub use dofs::DofMap;
pub use elasticity::{assemble_stiffness, for_each_element, QPoint, element_basis, node_adjacency, stiffness_pattern, strain_energy, GlobalSystem};
pub use hyperelastic::{min_jacobian, neo_hookean_forces, stored_energy};
pub use load::{assemble_load, face_points, total_force, FacePoint, Traction};
pub use material::{LinearMaterial, NeoHookeanMaterial};
pub use quadrature::{gauss_rule, QuadratureRule};
