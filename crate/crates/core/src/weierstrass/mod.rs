//! Weierstrass models: group law, division polynomials, reduction of marked
//! cubics and the generic fiber of a pencil.

pub mod curve;
pub mod division;
pub mod family;
pub mod nagell;

pub use curve::{LongCurve, Point, ShortCurve};
pub use division::psi_vanishing_table;
pub use family::{FiberModel, SingularFibers, TorsionValueOrbit, WeierstrassFamily};
pub use nagell::{NagellModel, NagellOptions, NagellPath};
