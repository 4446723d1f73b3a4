//! Patch geometry: the NURBS map, benchmark domains, boundary traces,
//! mesh views and graded breakpoints.

mod export;
mod mesh;
mod patch;
mod shapes;
mod trace;

pub use export::write_patch;
pub use mesh::{graded_breakpoints, subdivide, Element, MeshView};
pub use patch::{Jacobian, NurbsPatch, PatchPoint};
pub use shapes::{affine_patch, identity_patch, quarter_disc, sphere_octant, BenchmarkDomain};
pub use trace::{face_indices, BoundaryTrace, FaceId, TracePoint};
