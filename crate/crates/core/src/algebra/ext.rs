//! Quotient rings `F[x]/(m)`, used as exact number fields ℚ(α) and towers of them.
//!
//! Elements carry their modulus by `Arc`; constants built through
//! [`Field::from_q`] have no modulus and adopt the one of whatever they meet.
//! When the modulus is reducible the ring has zero divisors and
//! [`Field::inv`] may return `None` for nonzero elements.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::field::{Field, Q};
use super::upoly::UPoly;

#[derive(Clone, Debug)]
pub struct Ext<F: Field> {
    modulus: Option<Arc<UPoly<F>>>,
    value: UPoly<F>,
}

impl<F: Field> Ext<F> {
    /// The class of `x` modulo `m`, i.e. a root of `m`.
    pub fn generator(m: &Arc<UPoly<F>>) -> Self {
        Self::from_poly(m, UPoly::x())
    }

    pub fn from_poly(m: &Arc<UPoly<F>>, p: UPoly<F>) -> Self {
        let value = reduce(&p, Some(m));
        Ext {
            modulus: Some(m.clone()),
            value,
        }
    }

    /// Lifts an element of the base ring.
    pub fn from_base(c: F) -> Self {
        Ext {
            modulus: None,
            value: UPoly::constant(c),
        }
    }

    pub fn value(&self) -> &UPoly<F> {
        &self.value
    }

    pub fn modulus(&self) -> Option<&Arc<UPoly<F>>> {
        self.modulus.as_ref()
    }

    /// The element as a base-ring constant when it has degree ≤ 0.
    pub fn as_base(&self) -> Option<F> {
        if self.value.is_constant() {
            Some(self.value.coeff(0))
        } else {
            None
        }
    }

    fn join(&self, o: &Self) -> Option<Arc<UPoly<F>>> {
        match (&self.modulus, &o.modulus) {
            (Some(a), Some(b)) => {
                debug_assert!(Arc::ptr_eq(a, b) || a == b, "mixing quotient rings");
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        }
    }
}

fn reduce<F: Field>(p: &UPoly<F>, m: Option<&Arc<UPoly<F>>>) -> UPoly<F> {
    match m {
        Some(m) if p.deg() >= m.deg() => p
            .rem(m)
            .expect("modulus must have invertible leading coefficient"),
        _ => p.clone(),
    }
}

impl<F: Field> PartialEq for Ext<F> {
    fn eq(&self, o: &Self) -> bool {
        self.value == o.value
    }
}

impl<F: Field> Add for Ext<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let m = self.join(&o);
        Ext {
            value: &self.value + &o.value,
            modulus: m,
        }
    }
}

impl<F: Field> Sub for Ext<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let m = self.join(&o);
        Ext {
            value: &self.value - &o.value,
            modulus: m,
        }
    }
}

impl<F: Field> Mul for Ext<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let m = self.join(&o);
        let value = reduce(&(&self.value * &o.value), m.as_ref());
        Ext { value, modulus: m }
    }
}

impl<F: Field> Neg for Ext<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Ext {
            value: -&self.value,
            modulus: self.modulus,
        }
    }
}

impl<F: Field> Field for Ext<F> {
    fn zero() -> Self {
        Ext {
            modulus: None,
            value: UPoly::zero(),
        }
    }
    fn one() -> Self {
        Self::from_base(F::one())
    }
    fn from_q(q: &Q) -> Self {
        Self::from_base(F::from_q(q))
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn is_exact() -> bool {
        F::is_exact()
    }
    fn inv(&self) -> Option<Self> {
        if self.value.is_zero() {
            return None;
        }
        match &self.modulus {
            None => {
                let c = self.value.coeff(0).inv()?;
                Some(Self::from_base(c))
            }
            Some(m) => {
                let (g, s, _) = self.value.ext_gcd(m).ok()?;
                if g.deg() != 0 {
                    return None;
                }
                Some(Ext {
                    value: reduce(&s, Some(m)),
                    modulus: Some(m.clone()),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::qi;

    #[test]
    fn sqrt2_field() {
        let m = Arc::new(UPoly::<Q>::from_ints(&[-2, 0, 1]));
        let a = Ext::generator(&m);
        assert_eq!(a.clone() * a.clone(), Ext::from_q(&qi(2)));
        let inv = a.inv().unwrap();
        assert!((inv * a.clone()).is_one());
        // tower ℚ(√2)(√3)
        let m2 = Arc::new(UPoly::new(vec![
            Ext::from_q(&qi(-3)),
            Ext::zero(),
            Ext::one(),
        ]));
        let b = Ext::generator(&m2);
        let ab = Ext::from_base(a.clone()) * b.clone();
        assert_eq!(ab.clone() * ab, Ext::from_q(&qi(6)));
    }

    #[test]
    fn zero_divisor_detected() {
        let m = Arc::new(UPoly::<Q>::from_ints(&[-1, 0, 1]));
        let a = Ext::generator(&m) - Ext::one();
        assert!(a.inv().is_none());
    }
}
