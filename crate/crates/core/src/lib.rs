//! Double elliptic fibrations on quartic surfaces containing three skew lines:
//! construction, Weierstrass models, heights, Betti coordinates and the
//! fiberwise translation dynamics.

pub mod algebra;
pub mod betti;
pub mod dynamics;
pub mod error;
pub mod heights;
pub mod surface;
pub mod weierstrass;

pub use error::{Error, Result};
