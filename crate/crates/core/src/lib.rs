//! Virtual boundary method on a collocated finite-volume Navier-Stokes
//! solver, with tools for the stability analysis of the feedback forcing
//! and a cantilever-beam fluid-structure coupling.

// `!(x > 0.0)` checks also reject NaN; stencil loops index several arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod beam;
pub mod bench;
pub mod config;
pub mod error;
pub mod field;
pub mod ibm;
pub mod mesh;
pub mod ns;
pub mod output;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use field::Field;
pub use mesh::{CartesianGrid, Rect};
