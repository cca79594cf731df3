use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::HeightValue;
use crate::algebra::field::ln_abs_int;
use crate::algebra::{AlgebraicNumber, ComplexApprox, UPoly, Q};
use crate::error::{Error, Result};

/// Inputs accepted by [`naive_height`].
#[derive(Clone, Debug)]
pub enum ProjectivePoint {
    /// Homogeneous rational coordinates, not all zero.
    Rational(Vec<Q>),
    /// The point `(1 : α)`.
    Algebraic(AlgebraicNumber),
    /// Floating coordinates; no height is defined for these.
    Numeric(Vec<ComplexApprox>),
}

/// Absolute logarithmic Weil height.
pub fn naive_height(p: &ProjectivePoint) -> Result<HeightValue> {
    match p {
        ProjectivePoint::Rational(c) => rational_height(c),
        ProjectivePoint::Algebraic(a) => {
            let conj = AlgebraicNumber::conjugates_of(a.minpoly(), 1e-12)?;
            let z: Vec<ComplexApprox> = conj.iter().map(AlgebraicNumber::approx).collect();
            Ok(mahler_height(a.minpoly(), &z))
        }
        ProjectivePoint::Numeric(_) => Err(Error::UnsupportedDomain(
            "naive height needs algebraic coordinates".into(),
        )),
    }
}

fn rational_height(c: &[Q]) -> Result<HeightValue> {
    if c.iter().all(Zero::is_zero) {
        return Err(Error::InvalidArgument("all coordinates vanish".into()));
    }
    let l = c.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = c.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
    let top = ints
        .iter()
        .map(|n| (n / &g).magnitude().clone())
        .max()
        .unwrap();
    Ok(HeightValue::new(
        ln_abs_int(&BigInt::from(top)),
        4.0 * f64::EPSILON,
    ))
}

/// `(log|lc| + Σ log max(1, |αᵢ|)) / d` for the roots `αᵢ` of an
/// irreducible integer polynomial; the error covers the root enclosures.
pub fn mahler_height(minpoly: &UPoly<Q>, conjugates: &[ComplexApprox]) -> HeightValue {
    let c = minpoly.primitive_int();
    let d = conjugates.len().max(1) as f64;
    let mut v = ln_abs_int(c.last().unwrap());
    let mut err = 0.0;
    for z in conjugates {
        let a = z.abs();
        if a > 1.0 {
            v += a.ln();
        }
        if a + z.err > 1.0 {
            err += z.err / (a - z.err).max(1.0);
        }
    }
    HeightValue::new(v / d, err / d + 8.0 * f64::EPSILON * v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;

    #[test]
    fn rational_examples() {
        let h = naive_height(&ProjectivePoint::Rational(vec![qi(1), qi(1)])).unwrap();
        assert!(h.contains(0.0));
        let h = naive_height(&ProjectivePoint::Rational(vec![qi(4), qi(6)])).unwrap();
        assert!((h.value - 3f64.ln()).abs() < 1e-15);
        let h = naive_height(&ProjectivePoint::Rational(vec![
            Q::new(1.into(), 2.into()),
            qi(3),
        ]))
        .unwrap();
        assert!((h.value - 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn numeric_is_rejected() {
        let p = ProjectivePoint::Numeric(vec![ComplexApprox::new(1.0, 0.0, 0.0)]);
        assert!(matches!(naive_height(&p), Err(Error::UnsupportedDomain(_))));
    }
}
