//! Binary floating point with big-integer mantissas (`m · 2^e`), plus a
//! complex wrapper. Rounding truncates the mantissa to a caller-supplied
//! number of bits; pass [`EXACT`] to keep every bit (dyadic arithmetic).

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use super::field::{big_to_f64, Q};

/// Precision value that disables rounding.
pub const EXACT: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mp {
    m: BigInt,
    e: i64,
}

impl Mp {
    pub fn zero() -> Self {
        Mp {
            m: BigInt::zero(),
            e: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Mp {
            m: BigInt::from(n),
            e: 0,
        }
        .normalized()
    }

    pub fn from_parts(m: BigInt, e: i64) -> Self {
        Mp { m, e }.normalized()
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 || !x.is_finite() {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        Mp {
            m: BigInt::from(mant) * sign,
            e,
        }
        .normalized()
    }

    /// Nearest representable value (truncated) to a rational.
    pub fn from_q(q: &Q, prec: u64) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let p = prec.min(1 << 20) as i64;
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let shift = p + db - nb + 2;
        let m = if shift >= 0 {
            (q.numer() << (shift as u64)) / q.denom()
        } else {
            q.numer() / (q.denom() << ((-shift) as u64))
        };
        Mp { m, e: -shift }.round(prec)
    }

    pub fn to_q(&self) -> Q {
        if self.e >= 0 {
            Q::from_integer(&self.m << (self.e as u64))
        } else {
            Q::new(self.m.clone(), BigInt::from(1) << ((-self.e) as u64))
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    fn normalized(mut self) -> Self {
        if self.m.is_zero() {
            self.e = 0;
            return self;
        }
        let tz = self.m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.m >>= tz;
            self.e += tz as i64;
        }
        self
    }

    /// Truncates the mantissa to `prec` bits.
    pub fn round(self, prec: u64) -> Self {
        let b = self.m.bits();
        if prec == EXACT || b <= prec {
            return self.normalized();
        }
        let shift = b - prec;
        let neg = self.m.is_negative();
        let mag = self.m.abs() >> shift;
        let m = if neg { -mag } else { mag };
        Mp {
            m,
            e: self.e + shift as i64,
        }
        .normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.m.sign()
    }

    pub fn neg(&self) -> Self {
        Mp {
            m: -&self.m,
            e: self.e,
        }
    }

    pub fn abs(&self) -> Self {
        Mp {
            m: self.m.abs(),
            e: self.e,
        }
    }

    /// Binary exponent of the leading bit: `|x| ∈ [2^k, 2^{k+1})`.
    pub fn log2_floor(&self) -> i64 {
        self.e + self.m.bits() as i64 - 1
    }

    pub fn add(&self, o: &Self, prec: u64) -> Self {
        if self.is_zero() {
            return o.clone().round(prec);
        }
        if o.is_zero() {
            return self.clone().round(prec);
        }
        // drop bits of the smaller operand that cannot influence the result
        if prec != EXACT {
            let gap = self.log2_floor() - o.log2_floor();
            if gap > prec as i64 + 4 {
                return self.clone().round(prec);
            }
            if -gap > prec as i64 + 4 {
                return o.clone().round(prec);
            }
        }
        let e = self.e.min(o.e);
        let a = &self.m << ((self.e - e) as u64);
        let b = &o.m << ((o.e - e) as u64);
        Mp { m: a + b, e }.round(prec)
    }

    pub fn sub(&self, o: &Self, prec: u64) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u64) -> Self {
        Mp {
            m: &self.m * &o.m,
            e: self.e + o.e,
        }
        .round(prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Mp {
            m: self.m.clone(),
            e: self.e + k,
        }
    }

    /// Quotient to `prec` bits (must not be called with [`EXACT`]).
    pub fn div(&self, o: &Self, prec: u64) -> Self {
        assert!(!o.is_zero(), "Mp division by zero");
        assert!(prec != EXACT, "inexact operation");
        if self.is_zero() {
            return Self::zero();
        }
        let shift = prec as i64 + o.m.bits() as i64 - self.m.bits() as i64 + 2;
        let shift = shift.max(0) as u64;
        let m = (&self.m << shift) / &o.m;
        Mp {
            m,
            e: self.e - o.e - shift as i64,
        }
        .round(prec)
    }

    pub fn sqrt(&self, prec: u64) -> Self {
        assert!(!self.m.is_negative(), "sqrt of negative");
        if self.is_zero() {
            return Self::zero();
        }
        let mut shift = 2 * prec as i64 + 4 - self.m.bits() as i64;
        if (self.e - shift) % 2 != 0 {
            shift += 1;
        }
        let shift = shift.max(if self.e % 2 == 0 { 0 } else { 1 });
        let m = (&self.m << (shift as u64)).sqrt();
        Mp {
            m,
            e: (self.e - shift) / 2,
        }
        .round(prec)
    }

    pub fn cmp_abs(&self, o: &Self) -> Ordering {
        self.abs().to_q().cmp(&o.abs().to_q())
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = self.m.bits() as i64;
        let (top, e) = if b > 60 {
            (&self.m >> ((b - 60) as u64), self.e + b - 60)
        } else {
            (self.m.clone(), self.e)
        };
        let t = top.to_f64().unwrap_or(0.0);
        if e > 1100 {
            return t.signum() * f64::INFINITY;
        }
        if e < -1200 {
            return 0.0;
        }
        t * 2f64.powi(e as i32)
    }

    /// Natural log of |x|, valid for any magnitude; −∞ for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let b = self.m.bits() as i64;
        let (top, e) = if b > 60 {
            (&self.m >> ((b - 60) as u64), self.e + b - 60)
        } else {
            (self.m.clone(), self.e)
        };
        big_to_f64(&top).abs().ln() + e as f64 * std::f64::consts::LN_2
    }
}

/// Complex number with [`Mp`] parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpC {
    pub re: Mp,
    pub im: Mp,
}

impl MpC {
    pub fn new(re: Mp, im: Mp) -> Self {
        MpC { re, im }
    }

    pub fn zero() -> Self {
        MpC {
            re: Mp::zero(),
            im: Mp::zero(),
        }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        MpC {
            re: Mp::from_f64(re),
            im: Mp::from_f64(im),
        }
    }

    pub fn from_q(q: &Q, prec: u64) -> Self {
        MpC {
            re: Mp::from_q(q, prec),
            im: Mp::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn round(self, prec: u64) -> Self {
        MpC {
            re: self.re.round(prec),
            im: self.im.round(prec),
        }
    }

    pub fn add(&self, o: &Self, prec: u64) -> Self {
        MpC {
            re: self.re.add(&o.re, prec),
            im: self.im.add(&o.im, prec),
        }
    }

    pub fn sub(&self, o: &Self, prec: u64) -> Self {
        MpC {
            re: self.re.sub(&o.re, prec),
            im: self.im.sub(&o.im, prec),
        }
    }

    pub fn mul(&self, o: &Self, prec: u64) -> Self {
        let p2 = if prec == EXACT { EXACT } else { prec + 8 };
        let rr = self.re.mul(&o.re, p2);
        let ii = self.im.mul(&o.im, p2);
        let ri = self.re.mul(&o.im, p2);
        let ir = self.im.mul(&o.re, p2);
        MpC {
            re: rr.sub(&ii, prec),
            im: ri.add(&ir, prec),
        }
    }

    pub fn mul_q(&self, q: &Mp, prec: u64) -> Self {
        MpC {
            re: self.re.mul(q, prec),
            im: self.im.mul(q, prec),
        }
    }

    pub fn norm_sqr(&self, prec: u64) -> Mp {
        let p2 = if prec == EXACT { EXACT } else { prec + 8 };
        self.re
            .mul(&self.re, p2)
            .add(&self.im.mul(&self.im, p2), prec)
    }

    pub fn div(&self, o: &Self, prec: u64) -> Self {
        let p2 = prec + 16;
        // scale the divisor near 1 to avoid huge intermediates
        let k = match (o.re.is_zero(), o.im.is_zero()) {
            (true, _) => o.im.log2_floor(),
            (_, true) => o.re.log2_floor(),
            _ => o.re.log2_floor().max(o.im.log2_floor()),
        };
        let d = MpC {
            re: o.re.mul_pow2(-k),
            im: o.im.mul_pow2(-k),
        };
        let n = d.norm_sqr(p2);
        let conj = MpC {
            re: d.re.clone(),
            im: d.im.neg(),
        };
        let num = self.mul(&conj, p2);
        MpC {
            re: num.re.div(&n, prec).mul_pow2(-k),
            im: num.im.div(&n, prec).mul_pow2(-k),
        }
    }

    pub fn ln_abs(&self) -> f64 {
        let a = self.re.ln_abs();
        let b = self.im.ln_abs();
        if a == f64::NEG_INFINITY {
            return b;
        }
        if b == f64::NEG_INFINITY {
            return a;
        }
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        hi + 0.5 * (2.0 * (lo - hi)).exp().ln_1p()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{qf, qi};

    #[test]
    fn basic_ops() {
        let a = Mp::from_q(&qf(1, 3), 100);
        let three = Mp::from_int(3);
        let p = a.mul(&three, 100);
        assert!((p.to_f64() - 1.0).abs() < 1e-28);
        let s = Mp::from_int(2).sqrt(120);
        assert!((s.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        let q = Mp::from_int(1).div(&Mp::from_int(7), 80);
        assert!((q.to_f64() - 1.0 / 7.0).abs() < 1e-17);
        assert_eq!(Mp::from_f64(0.75).to_q(), qf(3, 4));
        assert_eq!(Mp::from_int(5).add(&Mp::from_int(-5), EXACT), Mp::zero());
        assert!((Mp::from_q(&qi(10), 64).ln_abs() - 10f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn complex_division() {
        let a = MpC::from_f64(1.0, 2.0);
        let b = MpC::from_f64(3.0, -4.0);
        let (re, im) = a.div(&b, 100).to_f64();
        assert!((re - (-0.2)).abs() < 1e-15 && (im - 0.4).abs() < 1e-15);
    }
}
