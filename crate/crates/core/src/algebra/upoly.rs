//! Dense univariate polynomials over any [`Field`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{Field, Q};
use crate::error::{Error, Result};

/// Dense polynomial, coefficients stored from the constant term upwards.
/// The leading coefficient is never zero; the zero polynomial is empty.
#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> UPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: F, k: usize) -> Self {
        let mut v = vec![F::zero(); k];
        v.push(c);
        Self::new(v)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = -1.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Evaluates after mapping coefficients into another domain.
    pub fn eval_map<G: Field>(&self, x: &G, f: impl Fn(&F) -> G) -> G {
        let mut acc = G::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + f(c);
        }
        acc
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> UPoly<G> {
        UPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.lc().inv() {
            Some(i) if !self.is_zero() => self.scale(&i),
            _ => self.clone(),
        }
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![F::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Composition `self(g(x))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division; fails on a zero divisor or when the leading
    /// coefficient of `d` is not invertible.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::InvalidArgument("division by zero polynomial".into()));
        }
        let inv = d.lc().inv().ok_or(Error::ZeroDivisor)?;
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone() * inv.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = r[i + j].clone() - c.clone() * dc.clone();
                    r[i + j] = t;
                }
            }
            r[i + dd] = F::zero();
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::InternalConsistency(
                "inexact polynomial division".into(),
            ));
        }
        Ok(q)
    }

    /// Resultant by the Euclidean remainder sequence, over any field; same
    /// sign convention as [`UPoly::resultant`].
    pub fn field_resultant(&self, other: &Self) -> Result<F> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::InvalidArgument(
                "resultant of the zero polynomial".into(),
            ));
        }
        let mut f = self.clone();
        let mut g = other.clone();
        let mut acc = F::one();
        loop {
            let m = f.degree().unwrap();
            let n = g.degree().unwrap();
            if n == 0 {
                return Ok(acc * Field::pow(&g.lc(), m as u32));
            }
            if m == 0 {
                return Ok(acc * Field::pow(&f.lc(), n as u32));
            }
            let r = f.rem(&g)?;
            if r.is_zero() {
                return Ok(F::zero());
            }
            let k = r.degree().unwrap();
            // Res(f,g) = (-1)^{mn} lc(g)^{m-k} Res(g, r)
            if (m * n) % 2 == 1 {
                acc = -acc;
            }
            acc = acc * Field::pow(&g.lc(), (m - k) as u32);
            f = g;
            g = r;
        }
    }

    /// Monic gcd (Euclid over the field).
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Extended gcd: returns `(g, s, t)` with `s·self + t·other = g`, g monic.
    pub fn ext_gcd(&self, other: &Self) -> Result<(Self, Self, Self)> {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let inv = r0.lc().inv().ok_or(Error::ZeroDivisor)?;
        Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
    }
}

impl<F: Field> Add for &UPoly<F> {
    type Output = UPoly<F>;
    fn add(self, o: &UPoly<F>) -> UPoly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<F: Field> Sub for &UPoly<F> {
    type Output = UPoly<F>;
    fn sub(self, o: &UPoly<F>) -> UPoly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<F: Field> Mul for &UPoly<F> {
    type Output = UPoly<F>;
    fn mul(self, o: &UPoly<F>) -> UPoly<F> {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let t = v[i + j].clone() + a.clone() * b.clone();
                v[i + j] = t;
            }
        }
        UPoly::new(v)
    }
}

impl<F: Field> Neg for &UPoly<F> {
    type Output = UPoly<F>;
    fn neg(self) -> UPoly<F> {
        UPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for UPoly<F> {
            type Output = UPoly<F>;
            fn $m(self, o: UPoly<F>) -> UPoly<F> {
                (&self).$m(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl<F: Field> Neg for UPoly<F> {
    type Output = UPoly<F>;
    fn neg(self) -> UPoly<F> {
        -&self
    }
}

// ---------------------------------------------------------------------------
// Rational polynomials
// ---------------------------------------------------------------------------

impl UPoly<Q> {
    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(
            c.iter()
                .map(|&a| Q::from_integer(BigInt::from(a)))
                .collect(),
        )
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().map(|a| Q::from_integer(a.clone())).collect())
    }

    /// Primitive integer polynomial with positive leading coefficient, the
    /// same roots as `self`.
    pub fn primitive_int(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(l.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if ints.last().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
        ints
    }

    /// `self` scaled to a primitive integer polynomial (as a rational poly).
    pub fn primitive(&self) -> Self {
        Self::from_bigints(&self.primitive_int())
    }

    /// Resultant `Res(self, other)`.
    ///
    /// Sign convention: the determinant of the Sylvester matrix whose first
    /// `deg other` rows carry the coefficients of `self` (leading coefficient
    /// first). Equivalently `lc(self)^deg(other) · ∏ other(α)` over the roots α
    /// of `self`, so `Res(x − a, x − b) = a − b`.
    pub fn resultant(&self, other: &Self) -> Result<Q> {
        self.field_resultant(other)
    }

    /// Discriminant with `Res(f, f') = (-1)^{n(n-1)/2} lc(f) · disc(f)`.
    pub fn discriminant(&self) -> Result<Q> {
        let n = self
            .degree()
            .ok_or_else(|| Error::InvalidArgument("discriminant of zero".into()))?;
        if n == 0 {
            return Ok(<Q as Field>::one());
        }
        let r = self.resultant(&self.derivative())?;
        let sign = if (n * (n - 1) / 2) % 2 == 1 {
            -<Q as Field>::one()
        } else {
            <Q as Field>::one()
        };
        Ok(sign * r / self.lc())
    }

    /// Gcd computed over ℤ by a primitive remainder sequence (avoids rational
    /// coefficient swell), returned primitive.
    pub fn gcd_q(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let a = self.primitive_int();
        let b = other.primitive_int();
        Self::from_bigints(&int_gcd(&a, &b))
    }

    /// Square-free decomposition (Yun): returns `(g_k, k)` with
    /// `self = c · ∏ g_k^k`, each `g_k` square-free, primitive, non-constant.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.primitive();
        let df = f.derivative();
        let a = f.gcd_q(&df);
        let mut b = f.div_exact(&a).expect("gcd divides").primitive();
        let mut c = df.div_exact(&a).expect("gcd divides derivative");
        let mut d = &c - &b.derivative();
        let mut k = 1;
        loop {
            let gk = b.gcd_q(&d);
            if !gk.is_constant() {
                out.push((gk.clone(), k));
            }
            b = b.div_exact(&gk).expect("gcd").primitive();
            if b.is_constant() {
                break;
            }
            c = d.div_exact(&gk).expect("gcd");
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// Square-free part, primitive.
    pub fn squarefree_part(&self) -> Self {
        if self.is_constant() {
            return Self::one();
        }
        let g = self.gcd_q(&self.derivative());
        self.div_exact(&g).expect("gcd divides").primitive()
    }

    /// Removes from `self` every factor it shares with `other` (repeatedly).
    pub fn strip_common(&self, other: &Self) -> Self {
        let mut f = self.clone();
        loop {
            let g = f.gcd_q(other);
            if g.is_constant() {
                return f;
            }
            f = f.div_exact(&g).expect("gcd divides");
        }
    }

    /// `x^n · self(1/x)` for the declared binary degree `n ≥ deg self`.
    pub fn reverse(&self, n: usize) -> Self {
        let mut v = vec![<Q as Field>::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Self::new(v)
    }

    /// Exact square root: returns `s` with `s² = self` if one exists.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.degree().unwrap();
        if n % 2 == 1 {
            return None;
        }
        let lc = self.lc();
        let r = sqrt_q(&lc)?;
        // reversed power-series square root on the top half of the coefficients
        let k = n / 2;
        let mut s = vec![<Q as Field>::zero(); k + 1];
        s[k] = r.clone();
        let two_r = r * Q::from_integer(BigInt::from(2));
        for i in (0..k).rev() {
            // coefficient of x^{k+i} in s² must equal self[k+i]
            let mut acc = self.coeff(k + i);
            for j in (i + 1)..k {
                let l = k + i - j;
                if l > i && l < k {
                    acc -= &s[j] * &s[l];
                }
            }
            // what is left is 2·s_k·s_i
            s[i] = acc / &two_r;
        }
        let cand = Self::new(s);
        if &(&cand * &cand) == self {
            Some(cand)
        } else {
            None
        }
    }

    /// Upper bound on the modulus of every complex root (Fujiwara).
    pub fn root_bound(&self) -> f64 {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return 0.0,
        };
        let lc = super::field::ln_abs_q(&self.lc());
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            let c = &self.coeffs[i];
            if Zero::is_zero(c) {
                continue;
            }
            let k = (n - i) as f64;
            let mut v = (super::field::ln_abs_q(c) - lc) / k;
            if i == 0 {
                v -= std::f64::consts::LN_2 / k;
            }
            best = best.max(v);
        }
        if best == f64::NEG_INFINITY {
            return 0.0;
        }
        2.0 * best.exp()
    }

    pub fn to_string_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if Zero::is_zero(c) {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let s = if mono.is_empty() {
                format!("{c}")
            } else if Field::is_one(c) {
                mono
            } else if *c == -<Q as Field>::one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            parts.push(s);
        }
        let mut out = parts.join(" + ");
        out = out.replace("+ -", "- ");
        out
    }
}

impl fmt::Display for UPoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

/// Rational square root when `q` is a perfect square.
pub fn sqrt_q(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers (coefficients low → high)
// ---------------------------------------------------------------------------

pub(crate) fn int_trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub(crate) fn int_content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
    }
    g
}

pub(crate) fn int_primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = int_content(v);
    if g.is_zero() {
        return Vec::new();
    }
    let g = if v.last().is_some_and(|c| c.is_negative()) {
        -g
    } else {
        g
    };
    v.iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder of `a` by `b` over ℤ.
fn int_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let lr = r[r.len() - 1].clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[j + shift] -= &lr * bc;
        }
        r.pop();
        int_trim(&mut r);
    }
    r
}

/// Primitive gcd over ℤ[x] via a primitive remainder sequence.
pub(crate) fn int_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = int_primitive(a);
    let mut y = int_primitive(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = int_prem(&x, &y);
        x = y;
        y = int_primitive(&r);
    }
    int_primitive(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{qf, qi};

    fn p(c: &[i64]) -> UPoly<Q> {
        UPoly::from_ints(c)
    }

    #[test]
    fn resultant_examples() {
        // x²−2, x²−3 → (2−3)² = 1
        assert_eq!(p(&[-2, 0, 1]).resultant(&p(&[-3, 0, 1])).unwrap(), qi(1));
        let f = p(&[1, 2, 3, 1]);
        assert_eq!(f.resultant(&f).unwrap(), qi(0));
        // linear case: Res(x − a, x − b) = a − b
        assert_eq!(p(&[-5, 1]).resultant(&p(&[-2, 1])).unwrap(), qi(3));
        assert!(p(&[]).resultant(&p(&[1, 1])).is_err());
    }

    #[test]
    fn resultant_matches_sylvester_orientation() {
        // Res(2x+1, x²+1) = 2² · ((−1/2)² + 1) = 5
        assert_eq!(p(&[1, 2]).resultant(&p(&[1, 0, 1])).unwrap(), qi(5));
        // swapping: (−1)^{1·2} → same
        assert_eq!(p(&[1, 0, 1]).resultant(&p(&[1, 2])).unwrap(), qi(5));
        // Res(x, x+1): deg 1 each → swapping flips sign
        assert_eq!(p(&[0, 1]).resultant(&p(&[1, 1])).unwrap(), qi(1));
        assert_eq!(p(&[1, 1]).resultant(&p(&[0, 1])).unwrap(), qi(-1));
    }

    #[test]
    fn discriminant_cubic() {
        // x³ − x − 1: −4(−1)³ − 27 = −23
        assert_eq!(p(&[-1, -1, 0, 1]).discriminant().unwrap(), qi(-23));
    }

    #[test]
    fn squarefree() {
        // (x−1)³ (x+2)
        let f = &p(&[-1, 1]).pow(3) * &p(&[2, 1]);
        let d = f.squarefree_decomposition();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], (p(&[2, 1]), 1));
        assert_eq!(d[1], (p(&[-1, 1]), 3));
        assert_eq!(f.squarefree_part(), p(&[-2, 1, 1]));
    }

    #[test]
    fn exact_sqrt() {
        let s = p(&[3, -1, 4, 2]);
        let sq = &s * &s;
        let r = sq.sqrt_exact().unwrap();
        assert!(r == s || r == -&s);
        assert!(p(&[1, 0, 2]).sqrt_exact().is_none());
        assert_eq!(sqrt_q(&qf(9, 4)), Some(qf(3, 2)));
    }

    #[test]
    fn division_and_gcd() {
        let a = &p(&[1, 1]) * &p(&[-3, 0, 1]);
        let b = &p(&[1, 1]) * &p(&[5, 1]);
        assert_eq!(a.gcd(&b).unwrap(), p(&[1, 1]));
        assert_eq!(a.gcd_q(&b), p(&[1, 1]));
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
    }
}
