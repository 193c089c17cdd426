//! Exact computation of projected polyhedra, the kappa invariant and the
//! Teissier / quasi-ordinary classification of Weierstrass polynomials, with
//! the integer lift of the resulting overweight presentation.

pub mod deform;
pub mod error;
pub mod kappa;
pub mod lp;
pub mod poly;
pub mod polyhedron;
pub mod quasiord;
pub mod ring;

pub use error::{Error, Result};
