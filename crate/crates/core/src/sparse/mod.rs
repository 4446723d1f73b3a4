//! Sparse matrices and a direct symmetric solver.

mod csr;
mod ldl;
mod ordering;

pub use csr::CsrMatrix;
pub use ldl::{DenseLdl, LdlFactor, LdlSymbolic};
pub use ordering::{nested_dissection, nested_dissection_blocks};
