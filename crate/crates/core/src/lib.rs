//! Exact integration on the cone complexes of SNC models: motivic classes, real
//! exponential-polynomial integrals, push-forwards and the atomic (lattice-point) engine.

pub mod atomic;
pub mod error;
pub mod exp_integrals;
pub mod functions;
pub mod instances;
pub mod linalg;
pub mod measure;
pub mod model;
pub mod polyhedra;
pub mod poly;
pub mod rational;
pub mod ring;

pub use error::{Error, Result};
pub use rational::Rat;
