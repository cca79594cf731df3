//! The coefficient-domain abstraction shared by polynomials, curves and points.
//!
//! Four implementors exist: [`Q`] (exact rationals), [`RatFunc`](super::RatFunc)
//! (the function field ℚ(t)), [`Ext`](super::Ext) (quotient rings ℚ(α), possibly
//! towered) and [`ComplexApprox`](super::ComplexApprox) (floating complex values
//! with a tracked error bound). Promotion between them is explicit: constants
//! enter through [`Field::from_q`], nothing converts silently.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational numbers.
pub type Q = BigRational;

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &Q) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; `None` for zero (or a zero divisor in a
    /// quotient ring that is not a field).
    fn inv(&self) -> Option<Self>;
    /// True when arithmetic in this domain is exact.
    fn is_exact() -> bool {
        true
    }

    fn from_i64(n: i64) -> Self {
        Self::from_q(&Q::from_integer(BigInt::from(n)))
    }

    /// Zero up to the accuracy of the domain (exact zero for exact domains).
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    /// Approximate absolute value, for domains that have one; used only to
    /// pick well-conditioned charts.
    fn magnitude(&self) -> Option<f64> {
        None
    }

    /// Error bound carried by approximate domains (zero when exact).
    fn error_bound(&self) -> f64 {
        0.0
    }

    /// The same value with its error bound replaced; identity when exact.
    fn with_error_bound(&self, _err: f64) -> Self {
        self.clone()
    }

    fn is_one(&self) -> bool {
        (self.clone() - Self::one()).is_zero()
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Shorthand for an integer-valued rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`.
pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Natural log of |q| for a nonzero big rational, robust to huge sizes.
pub fn ln_abs_q(q: &Q) -> f64 {
    ln_abs_int(q.numer()) - ln_abs_int(q.denom())
}

/// Natural log of |n| for a nonzero big integer without overflowing `f64`.
pub fn ln_abs_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        let v: f64 = big_to_f64(n).abs();
        return v.ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    big_to_f64(&top).ln() + (shift as f64) * std::f64::consts::LN_2
}

pub fn big_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(if n.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Nearest `f64` to a rational, also for very large numerators/denominators.
pub fn q_to_f64(q: &Q) -> f64 {
    if Zero::is_zero(q) {
        return 0.0;
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    if nb < 1000 && db < 1000 {
        return big_to_f64(q.numer()) / big_to_f64(q.denom());
    }
    // scale to a 64-bit quotient
    let shift = nb - db - 64;
    let (n, d) = if shift >= 0 {
        (q.numer().clone(), q.denom() << (shift as u64))
    } else {
        (q.numer() << ((-shift) as u64), q.denom().clone())
    };
    let quot = big_to_f64(&(n / d));
    quot * 2f64.powi(shift as i32)
}

/// Exact rational value of a finite `f64`.
pub fn f64_to_q(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(|| <Q as Field>::zero())
}
