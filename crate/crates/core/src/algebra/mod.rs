//! Exact and certified-numeric algebra.

pub mod algebraic;
pub mod complex_approx;
pub mod ext;
pub mod factor;
pub mod field;
pub mod linalg;
pub mod mp;
pub mod mpoly;
pub mod numeric;
pub mod ratfunc;
pub mod roots;
pub mod upoly;

pub use algebraic::AlgebraicNumber;
pub use complex_approx::ComplexApprox;
pub use ext::Ext;
pub use field::{qf, qi, Field, Q};
pub use mpoly::MultiPoly;
pub use ratfunc::RatFunc;
pub use roots::{isolate_roots, IsolatedRoot};
pub use upoly::UPoly;

/// Resultant of two univariate polynomials; see [`UPoly::resultant`] for the
/// sign convention.
pub fn resultant(f: &UPoly<Q>, g: &UPoly<Q>) -> crate::error::Result<Q> {
    f.resultant(g)
}
