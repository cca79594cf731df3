//! Canonical heights over ℚ by a telescoping doubling series.
//!
//! With `x(Q) = a/b` in lowest terms on an integral model, `x(2Q)` is
//! `Φ(a,b)/Ψ(a,b)` up to the cancelled factor `g = gcd(Φ, Ψ)`, which divides
//! the resultant `R` of the two quartic forms. Hence
//!
//! ```text
//! ĥ(P) = h(x(P)) + Σₙ 4^{-n-1} (λₙ − log gₙ)
//! ```
//!
//! where `λₙ = log max(|Φ|, |Ψ|)` at the normalized real pair of `2ⁿP`.
//! The `gₙ` only depend on `(aₙ, bₙ)` modulo `R`, so the integers are carried
//! modulo a fixed power of `R` instead of growing fourfold per step, and the
//! real pair is carried in big floats.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::HeightValue;
use crate::algebra::field::{ln_abs_int, q_to_f64};
use crate::algebra::mp::Mp;
use crate::algebra::{UPoly, Q};
use crate::error::{Error, Result};
use crate::weierstrass::{Point, ShortCurve};

const MAX_STEPS: u32 = 80;

struct Doubling {
    a: BigInt,
    b: BigInt,
    /// `u²` for the scaling `x ↦ u²x` onto the integral model.
    u2: BigInt,
    r: BigInt,
    /// Rough bound on `|λₙ − log gₙ|`, used for the tail.
    step_bound: f64,
}

impl Doubling {
    fn new(e: &ShortCurve<Q>) -> Result<Self> {
        let u = e.a.denom().lcm(e.b.denom());
        let u2 = &u * &u;
        let u4 = &u2 * &u2;
        let a = (e.a.clone() * Q::from_integer(u4.clone())).to_integer();
        let b = (e.b.clone() * Q::from_integer(&u4 * &u2)).to_integer();
        let phi = UPoly::from_bigints(&[&a * &a, -8 * &b, -2 * &a, BigInt::zero(), BigInt::one()]);
        let psi = UPoly::from_bigints(&[4 * &b, 4 * &a, BigInt::zero(), BigInt::from(4)]);
        let r = phi.resultant(&psi)?.to_integer().abs();
        if r.is_zero() {
            return Err(Error::SingularFiber("doubling resultant vanishes".into()));
        }
        let coeff_sum = 1.0 + 2.0 * big_abs(&a) + 8.0 * big_abs(&b) + big_abs(&a).powi(2);
        let step_bound = ln_abs_int(&r)
            + 2.0
                * coeff_sum
                    .max(4.0 + 4.0 * big_abs(&a) + 4.0 * big_abs(&b))
                    .ln()
            + 1.0;
        Ok(Doubling {
            a,
            b,
            u2,
            r,
            step_bound,
        })
    }

    fn phi_psi(&self, x: &BigInt, z: &BigInt) -> (BigInt, BigInt) {
        let (x2, z2) = (x * x, z * z);
        let z3 = &z2 * z;
        let phi = &x2 * &x2 - 2 * &self.a * &x2 * &z2 - 8 * &self.b * x * &z3
            + &self.a * &self.a * &z2 * &z2;
        let psi = 4 * z * (&x2 * x + &self.a * x * &z2 + &self.b * &z3);
        (phi, psi)
    }

    fn phi_psi_mp(&self, x: &Mp, z: &Mp, prec: u64) -> (Mp, Mp) {
        let a = Mp::from_parts(self.a.clone(), 0);
        let b = Mp::from_parts(self.b.clone(), 0);
        let x2 = x.mul(x, prec);
        let z2 = z.mul(z, prec);
        let z3 = z2.mul(z, prec);
        let x2z2 = x2.mul(&z2, prec);
        let phi = x2
            .mul(&x2, prec)
            .sub(&a.mul(&x2z2, prec).mul_pow2(1), prec)
            .sub(&b.mul(x, prec).mul(&z3, prec).mul_pow2(3), prec)
            .add(&a.mul(&a, prec).mul(&z2, prec).mul(&z2, prec), prec);
        let inner = x2
            .mul(x, prec)
            .add(&a.mul(x, prec).mul(&z2, prec), prec)
            .add(&b.mul(&z3, prec), prec);
        let psi = z.mul(&inner, prec).mul_pow2(2);
        (phi, psi)
    }

    /// Number of doubling steps whose tail falls below `tol / 4`.
    fn steps_for(&self, tol: f64) -> Result<u32> {
        let mut n = 6;
        while self.step_bound / (3.0 * 4f64.powi(n as i32)) >= tol / 4.0 {
            n += 1;
            if n > MAX_STEPS {
                return Err(Error::PrecisionExhausted {
                    bits: 2 * MAX_STEPS,
                    context: format!(
                        "canonical height tolerance {tol:e} needs more than {MAX_STEPS} doublings"
                    ),
                });
            }
        }
        Ok(n)
    }

    fn height(&self, x: &Q, tol: f64) -> Result<HeightValue> {
        let xs = x.clone() * Q::from_integer(self.u2.clone());
        let (mut a, mut b) = (xs.numer().clone(), xs.denom().clone());
        let h0 = ln_max(&a, &b);
        let n = self.steps_for(tol)?;
        let prec = 128 + 2 * n as u64;
        // normalized real pair
        let top = Mp::from_parts(
            if a.magnitude() > b.magnitude() {
                a.abs()
            } else {
                b.clone()
            },
            0,
        );
        let mut ra = Mp::from_parts(a.clone(), 0).div(&top, prec);
        let mut rb = Mp::from_parts(b.clone(), 0).div(&top, prec);
        let mut modulus = num_traits::pow(self.r.clone(), n as usize + 1);
        a = a.mod_floor(&modulus);
        b = b.mod_floor(&modulus);
        let mut sum = Neumaier::new(h0);
        let mut magnitude = h0.abs();
        let mut last = f64::INFINITY;
        let mut scale = 0.25;
        for _ in 0..n {
            let (rp, rq) = self.phi_psi_mp(&ra, &rb, prec);
            let lam = rp.ln_abs().max(rq.ln_abs());
            let (p, q) = self.phi_psi(&a, &b);
            let (p, q) = (p.mod_floor(&modulus), q.mod_floor(&modulus));
            let g = p.gcd(&q).gcd(&self.r);
            let lg = ln_abs_int(&g);
            let term = scale * (lam - lg);
            sum.add(term);
            magnitude += scale * (lam.abs() + lg);
            last = term.abs();
            modulus /= &self.r;
            a = (p / &g).mod_floor(&modulus);
            b = (q / &g).mod_floor(&modulus);
            let norm = if rp.cmp_abs(&rq).is_ge() {
                rp.abs()
            } else {
                rq.abs()
            };
            ra = rp.div(&norm, prec);
            rb = rq.div(&norm, prec);
            scale /= 4.0;
        }
        debug_assert!(last.is_finite());
        let tail = self.step_bound * scale * 4.0 / 3.0;
        // each logarithm and each compensated addition is off by a few ulps
        let rounding = 8.0 * f64::EPSILON * (magnitude + 1.0);
        let err = tail + rounding;
        if err > tol {
            return Err(Error::PrecisionExhausted {
                bits: prec as u32,
                context: "canonical height tail".into(),
            });
        }
        Ok(HeightValue::new(sum.value(), tol))
    }
}

/// Compensated summation.
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn new(x: f64) -> Self {
        Neumaier { sum: x, comp: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn ln_max(a: &BigInt, b: &BigInt) -> f64 {
    ln_abs_int(if a.magnitude() > b.magnitude() { a } else { b })
}

fn big_abs(n: &BigInt) -> f64 {
    q_to_f64(&Q::from_integer(n.abs()))
}

/// `ĥ(P)` on a curve over ℚ, within `tol`.
pub fn canonical_height(e: &ShortCurve<Q>, p: &Point<Q>, tol: f64) -> Result<HeightValue> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if e.is_singular() {
        return Err(Error::SingularFiber("curve discriminant vanishes".into()));
    }
    if !e.contains(p) {
        return Err(Error::InvalidPoint);
    }
    match p {
        Point::Infinity => Ok(HeightValue::exact(0.0)),
        Point::Affine(x, _) => Doubling::new(e)?.height(x, tol),
    }
}

/// The three heights built from `h₁(p) = h(p) − h(−p)` and
/// `h₂(p) = h(p) + h(−p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetrizedHeight {
    pub h: HeightValue,
    pub h1: HeightValue,
    pub h2: HeightValue,
}

/// `ĥ₁ = lim 2^{-n} h₁(2ⁿP)`, `ĥ₂ = lim 4^{-n} h₂(2ⁿP)` and
/// `ĥ = ½ĥ₁ + ½ĥ₂`.
///
/// The naive height only sees `x`, which is even, so `h₁` vanishes
/// identically on this model; it is still evaluated on the first few
/// doublings rather than assumed.
pub fn symmetrized_canonical_height(
    e: &ShortCurve<Q>,
    p: &Point<Q>,
    tol: f64,
) -> Result<SymmetrizedHeight> {
    let plus = canonical_height(e, p, tol / 2.0)?;
    let minus = canonical_height(e, &e.neg(p), tol / 2.0)?;
    let h2 = HeightValue::new(plus.value + minus.value, plus.err + minus.err);
    let mut q = p.clone();
    let mut h1 = 0.0f64;
    for n in 0..3 {
        let d = x_height(&q) - x_height(&e.neg(&q));
        h1 = h1.max(d.abs() / 2f64.powi(n));
        q = e.double(&q)?;
    }
    let h1 = HeightValue::new(h1, tol);
    let h = HeightValue::new(0.5 * h1.value + 0.5 * h2.value, 0.5 * (h1.err + h2.err));
    Ok(SymmetrizedHeight { h, h1, h2 })
}

fn x_height(p: &Point<Q>) -> f64 {
    match p {
        Point::Infinity => 0.0,
        Point::Affine(x, _) => ln_max(x.numer(), x.denom()),
    }
}

/// `ĥ(x+y) + ĥ(x−y) − 2ĥ(x) − ĥ(y) − ĥ(−y)` with the symmetrized height.
pub fn parallelogram_residual(
    e: &ShortCurve<Q>,
    x: &Point<Q>,
    y: &Point<Q>,
    tol: f64,
) -> Result<f64> {
    let h = |p: &Point<Q>| symmetrized_canonical_height(e, p, tol).map(|s| s.h.value);
    let sum = e.add(x, y)?;
    let diff = e.add(x, &e.neg(y))?;
    Ok(h(&sum)? + h(&diff)? - 2.0 * h(x)? - h(y)? - h(&e.neg(y))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;

    fn naive_limit(e: &ShortCurve<Q>, p: &Point<Q>, n: u32) -> f64 {
        let mut q = p.clone();
        for _ in 0..n {
            q = e.double(&q).unwrap();
        }
        x_height(&q) / 4f64.powi(n as i32)
    }

    #[test]
    fn agrees_with_the_plain_limit() {
        // y² = x³ − 2, P = (3, 5)
        let e = ShortCurve::new(qi(0), qi(-2));
        let p = Point::Affine(qi(3), qi(5));
        let h = canonical_height(&e, &p, 1e-12).unwrap();
        assert!(
            (h.value - naive_limit(&e, &p, 7)).abs() < 1e-3,
            "{}",
            h.value
        );
        assert!(h.value > 0.1);
    }

    #[test]
    fn torsion_vanishes() {
        // (2, 3) has order 6 on y² = x³ + 1
        let e = ShortCurve::new(qi(0), qi(1));
        for p in [
            Point::Affine(qi(2), qi(3)),
            Point::Affine(qi(0), qi(1)),
            Point::Affine(qi(-1), qi(0)),
        ] {
            let h = canonical_height(&e, &p, 1e-12).unwrap();
            assert!(h.value.abs() < 1e-12, "{:?}", h);
        }
    }

    #[test]
    fn symmetric_parts() {
        let e = ShortCurve::new(qi(0), qi(-2));
        let p = Point::Affine(qi(3), qi(5));
        let s = symmetrized_canonical_height(&e, &p, 1e-10).unwrap();
        assert!(s.h1.value.abs() < 1e-12);
        assert!((s.h.value - canonical_height(&e, &p, 1e-10).unwrap().value).abs() < 1e-9);
    }
}
