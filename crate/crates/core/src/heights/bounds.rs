//! Explicit torsion-order bounds of Rémond type.
//!
//! All bounds have the shape `X^e` with `X = (14g)^{64g²}·d·M²` and
//! `M = max(1, height term, log d)`. They are carried as `log₁₀` and, when
//! `M` is an integer and the result is not absurdly large, as an exact
//! big integer.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::algebra::field::ln_abs_int;

/// Largest exact value materialized, in decimal digits.
const EXACT_DIGIT_CAP: f64 = 2.0e6;

/// The constants `c`, `C` in the height term `c·h + C`. They are not
/// determined explicitly, so they are inputs; the defaults are `c = 1`,
/// `C = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundConstants {
    pub c: f64,
    pub cc: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants { c: 1.0, cc: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub g: u32,
    pub d: u64,
    pub h: f64,
    /// `M = max(1, c·h + C, log d)`.
    pub max_term: f64,
    /// Exponent applied to `X`.
    pub exponent: u64,
    pub log10: f64,
    #[serde(serialize_with = "ser_opt_big")]
    pub exact: Option<BigInt>,
}

fn ser_opt_big<S: serde::Serializer>(
    v: &Option<BigInt>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_some(&n.to_string()),
        None => s.serialize_none(),
    }
}

impl BoundReport {
    fn build(g: u32, d: u64, h: f64, max_term: f64, exponent: u64) -> Self {
        let g64 = g as f64;
        let log10_x =
            64.0 * g64 * g64 * (14.0 * g64).log10() + (d as f64).log10() + 2.0 * max_term.log10();
        let log10 = exponent as f64 * log10_x;
        let exact = if max_term.fract() == 0.0 && max_term < 1e15 && log10 < EXACT_DIGIT_CAP {
            let x = BigInt::from(14 * g as u64).pow(64 * g * g)
                * BigInt::from(d)
                * BigInt::from(max_term as u64).pow(2);
            Some(x.pow(exponent as u32))
        } else {
            None
        };
        BoundReport {
            g,
            d,
            h,
            max_term,
            exponent,
            log10,
            exact,
        }
    }

    /// `log₁₀` recomputed from the exact value, when present.
    pub fn exact_log10(&self) -> Option<f64> {
        self.exact
            .as_ref()
            .map(|n| ln_abs_int(n) / std::f64::consts::LN_10)
    }

    /// Whether `n` is at most the bound.
    pub fn admits(&self, n: u64) -> bool {
        match &self.exact {
            Some(b) => BigInt::from(n) <= *b,
            None => (n as f64).log10() <= self.log10,
        }
    }
}

fn max_term(d: u64, h: f64) -> f64 {
    1f64.max(h).max((d as f64).ln())
}

/// `((14g)^{64g²}·d·max(1, c·h + C, log d)²)^{35840g³/16}`.
pub fn torsion_order_bound(g: u32, d: u64, h: f64, k: BoundConstants) -> BoundReport {
    assert!(g >= 1 && d >= 1, "g and d must be positive");
    let e = 35840 * (g as u64).pow(3) / 16;
    BoundReport::build(g, d, h, max_term(d, k.c * h + k.cc), e)
}

/// Rémond's exponent bound `κ^{35/16}` and cardinality bound `κ^{4g+1}`
/// with `κ = ((14g)^{64g²}·d·max(1, h_F, log d)²)^{1024g³}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemondBounds {
    pub kappa: BoundReport,
    pub exponent_bound: BoundReport,
    pub cardinality_bound: BoundReport,
}

pub fn remond_kappa(g: u32, d: u64, h_f: f64) -> RemondBounds {
    assert!(g >= 1 && d >= 1, "g and d must be positive");
    let m = max_term(d, h_f);
    let k = 1024 * (g as u64).pow(3);
    RemondBounds {
        kappa: BoundReport::build(g, d, h_f, m, k),
        // 1024·35/16 = 2240
        exponent_bound: BoundReport::build(g, d, h_f, m, k * 35 / 16),
        cardinality_bound: BoundReport::build(g, d, h_f, m, k * (4 * g as u64 + 1)),
    }
}

/// `C_Rém(g) = 3·35840g³/16`.
pub fn c_rem(g: u32) -> u64 {
    3 * 35840 * (g as u64).pow(3) / 16
}

/// `log₁₀ C′_Rém = log₁₀((14g)^{64g²}(η′·C_height + η)·[K:ℚ]^{C_Rém})`. The
/// constants `η`, `η′` are not explicit and must be supplied.
pub fn c_rem_prime(g: u32, field_degree: u64, eta: f64, eta_prime: f64, c_height: f64) -> f64 {
    let g64 = g as f64;
    64.0 * g64 * g64 * (14.0 * g64).log10()
        + (eta_prime * c_height + eta).log10()
        + c_rem(g) as f64 * (field_degree as f64).log10()
}

/// `½ log deg φ`, the change in Faltings height under an isogeny.
pub fn isogeny_height_delta(deg: &BigInt) -> f64 {
    assert!(*deg >= BigInt::one(), "degree must be positive");
    match deg.to_f64() {
        Some(v) if v.is_finite() => 0.5 * v.ln(),
        _ => 0.5 * ln_abs_int(deg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        assert_eq!(c_rem(1), 6720);
        let r = torsion_order_bound(1, 1, 0.0, BoundConstants::default());
        assert_eq!(r.exponent, 2240);
        let k = remond_kappa(1, 1, 0.0);
        assert_eq!(k.kappa.exponent, 1024);
        assert_eq!(k.cardinality_bound.exponent, 5 * 1024);
        assert_eq!(k.exponent_bound.exponent, 2240);
    }

    #[test]
    fn inexact_height_gives_log_only() {
        let r = torsion_order_bound(1, 3, 1.5, BoundConstants::default());
        assert!(r.exact.is_none());
        assert!(r.log10 > torsion_order_bound(1, 3, 1.0, BoundConstants::default()).log10);
    }

    #[test]
    fn isogeny_delta() {
        assert_eq!(isogeny_height_delta(&BigInt::from(1)), 0.0);
        assert!((isogeny_height_delta(&BigInt::from(49)) - 7f64.ln()).abs() < 1e-15);
    }
}
