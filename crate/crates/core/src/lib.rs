//! Twisted lattice series on the three- and two-torus: Ewald-continued and
//! directly summed evaluators, functional-equation checks, and the abelian
//! monopole fields they describe.

pub mod complex_json;
pub mod error;
pub mod lattice;
pub mod lattice_sum;
pub mod linalg;
pub mod monopole;
pub mod quad;
pub mod special;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
