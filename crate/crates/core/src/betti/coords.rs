use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::lattice::PeriodLattice;
use crate::algebra::field::f64_to_q;
use crate::algebra::{ComplexApprox, Q};

/// Real coordinates of a logarithm in a lattice basis, reduced to `[0, 1)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BettiPoint {
    pub b1: f64,
    pub b2: f64,
    pub err: f64,
}

impl BettiPoint {
    pub fn new(b1: f64, b2: f64, err: f64) -> Self {
        BettiPoint {
            b1: frac(b1),
            b2: frac(b2),
            err,
        }
    }

    /// Distance to `o` on the torus `ℝ²/ℤ²` (max norm).
    pub fn torus_distance(&self, o: &BettiPoint) -> f64 {
        let d = |a: f64, b: f64| {
            let x = (a - b).rem_euclid(1.0);
            x.min(1.0 - x)
        };
        d(self.b1, o.b1).max(d(self.b2, o.b2))
    }
}

fn frac(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Solves `z = β₁ω₁ + β₂ω₂` and reduces modulo `ℤ²`.
pub fn betti_coords(z: &ComplexApprox, l: &PeriodLattice) -> BettiPoint {
    let (b1, b2) = l.coords(z.value);
    let tau = l.tau();
    // |∂β/∂z| ≤ (1 + |τ|) / (|ω₁| Im τ)
    let cond = (1.0 + tau.norm()) / (l.w1.norm() * tau.im);
    let err =
        cond * (z.err + l.err * z.value.norm()) + 4.0 * f64::EPSILON * (1.0 + b1.abs() + b2.abs());
    BettiPoint::new(b1, b2, err)
}

/// A rational Betti point `(p₁/q, p₂/q)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RationalHit {
    pub q: u64,
    pub p1: u64,
    pub p2: u64,
    /// `max(|x|, |y|)` over the reduced coordinates `x/y`.
    pub height: u64,
}

impl RationalHit {
    pub fn new(p1: u64, p2: u64, q: u64) -> Self {
        let (p1, p2) = (p1 % q, p2 % q);
        let g = p1.gcd(&p2).gcd(&q);
        let (p1, p2, q) = (p1 / g, p2 / g, q / g);
        let h = |p: u64| {
            let g = p.gcd(&q);
            (p / g).max(q / g)
        };
        RationalHit {
            q,
            p1,
            p2,
            height: h(p1).max(h(p2)),
        }
    }
}

/// The fraction with the smallest denominator in `[lo, hi]`.
fn simplest_in(lo: &Q, hi: &Q) -> Q {
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let n = lo.floor();
    let inner = simplest_in(&(hi - &n).recip(), &(lo - &n).recip());
    n + inner.recip()
}

/// Neighbours of `p/q` in the Farey sequence of order `n`.
fn farey_neighbours(p: &BigInt, q: &BigInt, n: &BigInt) -> (Q, Q) {
    // left a/b: p·b − a·q = 1, b ≡ p⁻¹ (mod q), b ≤ n maximal
    let inv = {
        let e = p.mod_floor(q).extended_gcd(q);
        e.x.mod_floor(q)
    };
    let top = |r: BigInt| -> BigInt {
        if q.is_one() {
            n.clone()
        } else {
            let k = (n - &r).div_floor(q);
            r + k * q
        }
    };
    let b = top(inv.clone());
    let a = (p * &b - BigInt::one()) / q;
    let d = top((-inv).mod_floor(q));
    let c = (p * &d + BigInt::one()) / q;
    (Q::new(a, b), Q::new(c, d))
}

/// The unique fraction with denominator ≤ `qmax` within `err` of `x`, if
/// exactly one exists.
fn unique_fraction(x: f64, err: f64, qmax: u64) -> Option<(BigInt, BigInt)> {
    let (lo, hi) = (f64_to_q(x - err), f64_to_q(x + err));
    let f = simplest_in(&lo, &hi);
    let n = BigInt::from(qmax);
    if f.denom() > &n {
        return None;
    }
    let (left, right) = farey_neighbours(f.numer(), f.denom(), &n);
    if left >= lo || right <= hi {
        return None;
    }
    Some((f.numer().clone(), f.denom().clone()))
}

/// Common-denominator rational reconstruction with denominator ≤ `qmax`
/// inside the error box; `None` when there is no candidate or more than one.
pub fn detect_rational(b: &BettiPoint, qmax: u64) -> Option<RationalHit> {
    assert!(qmax >= 1);
    let err = b.err.max(0.0);
    if err >= 0.5 {
        return None;
    }
    let (p1, q1) = unique_fraction(b.b1, err, qmax)?;
    let (p2, q2) = unique_fraction(b.b2, err, qmax)?;
    let q = q1.lcm(&q2);
    if q > BigInt::from(qmax) {
        return None;
    }
    let lift = |p: BigInt, qi: &BigInt| ((p * (&q / qi)).mod_floor(&q)).to_u64().unwrap();
    let qq = q.to_u64().unwrap();
    Some(RationalHit::new(lift(p1, &q1), lift(p2, &q2), qq))
}

/// Number of distinct rational hits of height at most `t`.
pub fn count_rational_points(points: &[BettiPoint], t: u64, qmax: u64) -> usize {
    assert!(qmax >= t, "qmax must be at least the height bound");
    let set: BTreeSet<RationalHit> = points
        .iter()
        .filter_map(|b| detect_rational(b, qmax))
        .filter(|h| h.height <= t)
        .collect();
    set.len()
}
