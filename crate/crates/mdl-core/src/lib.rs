//! Exact-arithmetic toolkit for measurement-dependent local (MDL) correlation
//! polytopes: vertex and facet enumeration, certified rational linear
//! programming, inequality transformation and verification, quantum-model
//! evaluation, and limited-detection mappings.
//!
//! All polytope geometry runs over `BigRational`; floating point appears only
//! in the quantum layer, and every float that crosses back into the exact
//! layer does so through explicit rationalization.

pub mod dd;
pub mod detection;
pub mod facet_tables;
pub mod inequalities;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod quantum;
pub mod ratio;
pub mod scenario;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
