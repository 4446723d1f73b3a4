//! Isogeometric mixed finite elements for frictionless unilateral contact
//! of an elastic body against a rigid plane.
//!
//! Displacements live in a degree-`p` NURBS space, the contact pressure in
//! the degree `p - 2` B-spline space built on the contact face. The contact
//! conditions are enforced through weighted gaps with an active-set loop
//! (small deformation) or a semismooth Newton scheme (Neo-Hookean large
//! deformation).

pub mod assembly;
pub mod cli;
pub mod contact;
pub mod error;
pub mod geometry;
pub mod scalar;
pub mod small;
pub mod solver;
pub mod sparse;
pub mod spline;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::Real;

pub type KnotVectorF64 = spline::KnotVector<f64>;
pub type TensorSpaceF64 = spline::TensorSpace<f64>;
pub type NurbsPatchF64 = geometry::NurbsPatch<f64>;
pub type BenchmarkDomainF64 = geometry::BenchmarkDomain<f64>;
pub type QuadratureRuleF64 = assembly::QuadratureRule<f64>;
pub type HertzAnalyticF64 = verification::HertzAnalytic<f64>;
