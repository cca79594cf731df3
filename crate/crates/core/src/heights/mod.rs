//! Naive and canonical heights, and the explicit torsion-order bounds.
//!
//! Fiber heights use the naive height of the `x`-coordinate of the short
//! Weierstrass model, so `ĥ(P) = lim 4^{-n} h(x(2^n P))`. This is twice the
//! normalization that uses `½ h(x)`.

mod bounds;
mod canonical;
mod naive;
mod survey;

pub use bounds::{
    c_rem, c_rem_prime, isogeny_height_delta, remond_kappa, torsion_order_bound, BoundConstants,
    BoundReport, RemondBounds,
};
pub use canonical::{
    canonical_height, parallelogram_residual, symmetrized_canonical_height, SymmetrizedHeight,
};
pub use naive::{mahler_height, naive_height, ProjectivePoint};
pub use survey::{survey_of_orbits, torsion_height_survey, HeightSurvey, SurveyRow};

use serde::Serialize;

/// A height value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightValue {
    pub value: f64,
    pub err: f64,
}

impl HeightValue {
    pub fn new(value: f64, err: f64) -> Self {
        HeightValue {
            value,
            err: err.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        HeightValue { value, err: 0.0 }
    }

    /// True when `x` lies in `[value − err, value + err]`.
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.err
    }
}
