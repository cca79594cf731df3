//! Weierstrass curves and their group law.

use crate::algebra::{ComplexApprox, Field, Q};
use crate::error::{Error, Result};

/// A point of a Weierstrass curve.
#[derive(Clone, Debug, PartialEq)]
pub enum Point<F> {
    Infinity,
    Affine(F, F),
}

impl<F: Field> Point<F> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Point<G> {
        match self {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(f(x), f(y)),
        }
    }
}

/// Long Weierstrass form `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
#[derive(Clone, Debug, PartialEq)]
pub struct LongCurve<F> {
    pub a1: F,
    pub a2: F,
    pub a3: F,
    pub a4: F,
    pub a6: F,
}

impl<F: Field> LongCurve<F> {
    pub fn b2(&self) -> F {
        self.a1.square() + F::from_i64(4) * self.a2.clone()
    }
    pub fn b4(&self) -> F {
        F::from_i64(2) * self.a4.clone() + self.a1.clone() * self.a3.clone()
    }
    pub fn b6(&self) -> F {
        self.a3.square() + F::from_i64(4) * self.a6.clone()
    }
    pub fn c4(&self) -> F {
        self.b2().square() - F::from_i64(24) * self.b4()
    }
    pub fn c6(&self) -> F {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        -b2.pow(3) + F::from_i64(36) * b2 * b4 - F::from_i64(216) * b6
    }

    pub fn contains(&self, x: &F, y: &F) -> bool {
        let lhs =
            y.square() + self.a1.clone() * x.clone() * y.clone() + self.a3.clone() * y.clone();
        let rhs =
            x.pow(3) + self.a2.clone() * x.square() + self.a4.clone() * x.clone() + self.a6.clone();
        (lhs - rhs).is_negligible()
    }

    /// The short model `Y² = X³ − 27c4·X − 54c6` reached by
    /// `X = 36x + 3b2`, `Y = 108(2y + a1x + a3)`.
    pub fn to_short(&self) -> ShortCurve<F> {
        ShortCurve {
            a: F::from_i64(-27) * self.c4(),
            b: F::from_i64(-54) * self.c6(),
        }
    }

    pub fn point_to_short(&self, x: &F, y: &F) -> (F, F) {
        let xs = F::from_i64(36) * x.clone() + F::from_i64(3) * self.b2();
        let ys = F::from_i64(108)
            * (F::from_i64(2) * y.clone() + self.a1.clone() * x.clone() + self.a3.clone());
        (xs, ys)
    }

    pub fn point_from_short(&self, xs: &F, ys: &F) -> (F, F) {
        let x = (xs.clone() - F::from_i64(3) * self.b2()) * F::from_q(&Q::new(1.into(), 36.into()));
        let y = (ys.clone() * F::from_q(&Q::new(1.into(), 108.into()))
            - self.a1.clone() * x.clone()
            - self.a3.clone())
            * F::from_q(&Q::new(1.into(), 2.into()));
        (x, y)
    }
}

/// Short Weierstrass form `y² = x³ + a·x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortCurve<F> {
    pub a: F,
    pub b: F,
}

impl<F: Field> ShortCurve<F> {
    pub fn new(a: F, b: F) -> Self {
        ShortCurve { a, b }
    }

    /// `Δ = −16(4a³ + 27b²)`.
    pub fn discriminant(&self) -> F {
        F::from_i64(-16) * (F::from_i64(4) * self.a.pow(3) + F::from_i64(27) * self.b.square())
    }

    pub fn is_singular(&self) -> bool {
        self.discriminant().is_negligible()
    }

    /// `x³ + a·x + b`.
    pub fn rhs(&self, x: &F) -> F {
        x.pow(3) + self.a.clone() * x.clone() + self.b.clone()
    }

    pub fn contains(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => (y.square() - self.rhs(x)).is_negligible(),
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ShortCurve<G> {
        ShortCurve {
            a: f(&self.a),
            b: f(&self.b),
        }
    }

    fn check(&self, p: &Point<F>) -> Result<()> {
        if F::is_exact() && !self.contains(p) {
            return Err(Error::InvalidPoint);
        }
        Ok(())
    }

    pub fn neg(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), -y.clone()),
        }
    }

    /// Chord–tangent addition; exact over exact domains.
    pub fn add(&self, p: &Point<F>, q: &Point<F>) -> Result<Point<F>> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &Point<F>, q: &Point<F>) -> Point<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if (x1.clone() - x2.clone()).is_negligible() {
            if (y1.clone() + y2.clone()).is_negligible() {
                return Point::Infinity;
            }
            // tangent
            let num = F::from_i64(3) * x1.square() + self.a.clone();
            let den = F::from_i64(2) * y1.clone();
            match den.inv() {
                Some(i) => num * i,
                None => return Point::Infinity,
            }
        } else {
            match (x2.clone() - x1.clone()).inv() {
                Some(i) => (y2.clone() - y1.clone()) * i,
                None => return Point::Infinity,
            }
        };
        let x3 = lambda.square() - x1.clone() - x2.clone();
        let y3 = lambda * (x1.clone() - x3.clone()) - y1.clone();
        Point::Affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F>) -> Result<Point<F>> {
        self.add(p, p)
    }

    /// `m·P` by double-and-add; negative `m` allowed.
    pub fn scalar_mul(&self, m: i64, p: &Point<F>) -> Result<Point<F>> {
        self.check(p)?;
        let base = if m < 0 { self.neg(p) } else { p.clone() };
        let mut k = m.unsigned_abs();
        let mut acc = Point::Infinity;
        let mut pow = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &pow);
            }
            k >>= 1;
            if k > 0 {
                pow = self.add_unchecked(&pow, &pow);
            }
        }
        Ok(acc)
    }

    /// Exact order of `P` if it is at most `m_max`, from the first vanishing
    /// division polynomial.
    ///
    /// Repeated addition must agree on `m ≤ 4`, and a found order `n` is
    /// confirmed by `n·P = O` with `(n/ℓ)·P ≠ O` for the primes `ℓ | n`.
    pub fn torsion_order(&self, p: &Point<F>, m_max: u32) -> Result<Option<u32>> {
        const ADDITION_CHECK: u32 = 4;
        if !F::is_exact() {
            return Err(Error::UnsupportedDomain(
                "exact torsion order needs an exact coefficient domain".into(),
            ));
        }
        self.check(p)?;
        if p.is_infinity() {
            return Ok(Some(1));
        }
        let psi = super::division::psi_vanishing_table(self, p, m_max.max(ADDITION_CHECK));
        let disagree = |m: u32| Error::InternalConsistency(format!("torsion tests disagree at m = {m}"));
        let mut acc = p.clone();
        for m in 1..=ADDITION_CHECK {
            if m > 1 {
                acc = self.add_unchecked(&acc, p);
            }
            if psi[m as usize - 1] != acc.is_infinity() {
                return Err(disagree(m));
            }
            if acc.is_infinity() {
                break;
            }
        }
        let order = (1..=m_max).find(|&m| psi[m as usize - 1]);
        if let Some(n) = order.filter(|&n| n > ADDITION_CHECK) {
            if !self.scalar_mul(n as i64, p)?.is_infinity() {
                return Err(disagree(n));
            }
            for l in (2..=n).filter(|&l| n % l == 0 && (2..l).all(|k| l % k != 0)) {
                if self.scalar_mul((n / l) as i64, p)?.is_infinity() {
                    return Err(disagree(n / l));
                }
            }
        }
        Ok(order)
    }
}

impl ShortCurve<ComplexApprox> {
    /// Membership up to a relative tolerance.
    pub fn contains_approx(&self, p: &Point<ComplexApprox>, rel_tol: f64) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let r = y.square() - self.rhs(x);
                let scale = 1.0 + y.abs().powi(2) + x.abs().powi(3);
                r.abs() <= r.err + rel_tol * scale
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;

    fn curve() -> ShortCurve<Q> {
        ShortCurve::new(qi(0), qi(1))
    }

    #[test]
    fn order_six_point() {
        let e = curve();
        let p = Point::Affine(qi(2), qi(3));
        assert_eq!(e.add(&p, &p).unwrap(), Point::Affine(qi(0), qi(1)));
        assert_eq!(e.scalar_mul(3, &p).unwrap(), Point::Affine(qi(-1), qi(0)));
        assert_eq!(e.scalar_mul(6, &p).unwrap(), Point::Infinity);
        assert_eq!(e.scalar_mul(1, &p).unwrap(), p);
        assert_eq!(e.scalar_mul(0, &p).unwrap(), Point::Infinity);
        assert_eq!(e.scalar_mul(-1, &p).unwrap(), e.neg(&p));
        assert_eq!(e.torsion_order(&p, 12).unwrap(), Some(6));
        assert_eq!(e.torsion_order(&Point::Infinity, 12).unwrap(), Some(1));
        assert_eq!(e.discriminant(), qi(-432));
    }

    #[test]
    fn off_curve_rejected() {
        let e = curve();
        assert_eq!(
            e.add(&Point::Affine(qi(1), qi(1)), &Point::Infinity),
            Err(Error::InvalidPoint)
        );
    }

    #[test]
    fn non_torsion_point() {
        // y² = x³ − 2 has rank 1, generator (3, 5)
        let e = ShortCurve::new(qi(0), qi(-2));
        assert_eq!(
            e.torsion_order(&Point::Affine(qi(3), qi(5)), 12).unwrap(),
            None
        );
    }

    #[test]
    fn numeric_domain_rejected() {
        let e = ShortCurve::new(ComplexApprox::from_q(&qi(0)), ComplexApprox::from_q(&qi(1)));
        let p = Point::Affine(ComplexApprox::from_q(&qi(2)), ComplexApprox::from_q(&qi(3)));
        assert!(matches!(
            e.torsion_order(&p, 6),
            Err(Error::UnsupportedDomain(_))
        ));
    }
}
