//! Extrinsic geometry of graph hypersurfaces in product metrics `g + dt²` and
//! conformally product metrics `φ⁻²(g + dt²)`, together with seeded
//! verification suites for the identities and inequalities that relate them.

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod barrier;
pub mod cli;
pub mod conformal;
pub mod fields;
pub mod graphgeom;
pub mod inequality;
pub mod linalg;
pub mod par;
pub mod report;
pub mod revolution;
pub mod sampling;
pub mod suite;
pub mod syminv;

pub use error::{GeomError, Result};
