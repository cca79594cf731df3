//! The rational function field ℚ(t).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, Q};
use super::upoly::UPoly;

/// A reduced fraction `num/den` with `den` monic.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc {
    num: UPoly<Q>,
    den: UPoly<Q>,
}

impl RatFunc {
    pub fn new(num: UPoly<Q>, den: UPoly<Q>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc {
                num,
                den: UPoly::one(),
            };
        }
        let g = num.gcd_q(&den);
        let (mut n, mut d) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let lc = d.lc();
        if !lc.is_one() {
            let inv = Field::inv(&lc).unwrap();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn poly(p: UPoly<Q>) -> Self {
        RatFunc {
            num: p,
            den: UPoly::one(),
        }
    }

    /// The parameter `t`.
    pub fn t() -> Self {
        Self::poly(UPoly::x())
    }

    pub fn num(&self) -> &UPoly<Q> {
        &self.num
    }

    pub fn den(&self) -> &UPoly<Q> {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    /// Value at `t0`, or `None` when `t0` is a pole.
    pub fn eval(&self, t0: &Q) -> Option<Q> {
        let d = self.den.eval(t0);
        if Field::is_zero(&d) {
            return None;
        }
        Some(self.num.eval(t0) / d)
    }

    /// Value at `t0` in any field containing ℚ.
    pub fn eval_in<G: Field>(&self, t0: &G) -> Option<G> {
        let d = self.den.eval_map(t0, G::from_q);
        let n = self.num.eval_map(t0, G::from_q);
        d.inv().map(|i| n * i)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den)
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, o: RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den);
        }
        RatFunc::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: RatFunc) -> RatFunc {
        self + (-o)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        Self::poly(UPoly::zero())
    }
    fn one() -> Self {
        Self::poly(UPoly::one())
    }
    fn from_q(q: &Q) -> Self {
        Self::poly(UPoly::constant(q.clone()))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFunc::new(self.den.clone(), self.num.clone()))
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num.to_string_var("t"))
        } else {
            write!(
                f,
                "({})/({})",
                self.num.to_string_var("t"),
                self.den.to_string_var("t")
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::qi;

    #[test]
    fn arithmetic_reduces() {
        let t = RatFunc::t();
        let one = RatFunc::one();
        let a = (t.clone() * t.clone() - one.clone())
            .div(&(t.clone() - one.clone()))
            .unwrap();
        assert!(a.is_poly());
        assert_eq!(a, t.clone() + one.clone());
        assert_eq!(a.eval(&qi(2)), Some(qi(3)));
        let b = one.div(&t).unwrap();
        assert_eq!(b.eval(&qi(0)), None);
        assert_eq!((b.clone() * t).is_one(), true);
    }
}
