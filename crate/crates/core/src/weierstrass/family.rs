//! The generic fiber of a residual-cubic pencil as a Weierstrass curve over
//! ℚ(t), with the section cut by `M`.
//!
//! The marked cubic `C_t` is reduced over ℚ(t) and the result is rescaled to
//! the quadratic twist `y² = x³ + κ²A₀(t)·x + κ³B₀(t)` of the model
//! `A₀ = −27I`, `B₀ = −27J` built from the invariants of the projected
//! quartic. Here `κ` is an integer, so `A`, `B` are polynomials of degree
//! at most 8 and 12. Fibers are specialized by running the same reduction
//! on `C_{t0}` and applying the specialized scale factor, which agrees with
//! the generic model except at the finitely many parameters in
//! [`WeierstrassFamily::degenerate_locus`].

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::curve::{Point, ShortCurve};
use super::division::reduced_division_values;
use super::nagell::{NagellModel, NagellOptions};
use crate::algebra::{AlgebraicNumber, Field, MultiPoly, RatFunc, UPoly, Q};
use crate::error::{Error, Result};
use crate::surface::{projected_quartic, quartic_invariants, Axis, Chart, ResidualCubicFamily};

#[derive(Clone, Debug)]
pub struct WeierstrassFamily {
    residual: ResidualCubicFamily,
    a: UPoly<Q>,
    b: UPoly<Q>,
    kappa: BigInt,
    mu: RatFunc,
    section_x: RatFunc,
    section_y: RatFunc,
    degenerate: UPoly<Q>,
    discriminant: UPoly<Q>,
}

/// Splits a nonzero integer as `κ·r²` with `κ` free of square factors
/// below 10⁴ (and fully square-free when the cofactor is prime or a square).
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut kappa = if n.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let mut r = BigInt::one();
    let mut m = n.abs();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(10_000u32);
    while p <= limit && &p * &p <= m {
        while (&m % (&p * &p)).is_zero() {
            m /= &p * &p;
            r *= &p;
        }
        if (&m % &p).is_zero() {
            m /= &p;
            kappa *= &p;
        }
        p += 1u32;
    }
    let s = m.sqrt();
    if &s * &s == m {
        r *= s;
    } else {
        kappa *= m;
    }
    (kappa, r)
}

fn ratfunc_q(q: Q) -> RatFunc {
    RatFunc::poly(UPoly::constant(q))
}

impl WeierstrassFamily {
    pub fn new(residual: &ResidualCubicFamily) -> Result<Self> {
        let c: MultiPoly<RatFunc> = residual.at(&RatFunc::t());
        let o = residual.zero_point::<RatFunc>();
        let model = NagellModel::new(&c, &o, NagellOptions::strict()).map_err(|e| match e {
            Error::ChartDegenerate(m) => Error::DegenerateFamily(format!("generic fiber: {m}")),
            Error::ReducibleFiber | Error::MarkedPointSingular => {
                Error::DegenerateFamily("generic fiber is not a smooth marked cubic".into())
            }
            e => e,
        })?;
        let (ap, bp) = (model.short.a.clone(), model.short.b.clone());
        if Field::is_zero(&ap) || Field::is_zero(&bp) {
            return Err(Error::DegenerateFamily(
                "constant j-invariant 0 or 1728".into(),
            ));
        }
        let (i, j) = quartic_invariants(&projected_quartic(residual));
        let k27 = UPoly::constant(Q::from_integer((-27).into()));
        let (a0, b0) = (&k27 * &i, &k27 * &j);
        let lambda = bp.clone()
            * RatFunc::poly(a0.clone())
            * (ap.clone() * RatFunc::poly(b0.clone())).inv().unwrap();
        let nd = lambda.num() * lambda.den();
        let c0 = nd.lc();
        let s = nd
            .scale(&Field::inv(&c0).unwrap())
            .sqrt_exact()
            .ok_or_else(|| {
                Error::InternalConsistency("scale factor is not a square up to a constant".into())
            })?;
        // c0 = κ·r² with κ an integer
        let (kn, rn) = square_split(&(c0.numer() * c0.denom()));
        let kappa = kn;
        let r = Q::new(rn, c0.denom().clone());
        let mu =
            ratfunc_q(r) * RatFunc::poly(s) * RatFunc::poly(lambda.den().clone()).inv().unwrap();
        let mu2 = mu.square();
        let mu3 = mu2.clone() * mu.clone();
        let kq = Q::from_integer(kappa.clone());
        let a = ap * mu2.square().inv().unwrap();
        let b = bp * mu3.square().inv().unwrap();
        let a_expect = RatFunc::poly(a0.scale(&(&kq * &kq)));
        let b_expect = RatFunc::poly(b0.scale(&(&kq * &kq * &kq)));
        if a != a_expect || b != b_expect {
            return Err(Error::InternalConsistency(
                "rescaled model differs from the invariant model".into(),
            ));
        }
        let sec = model.forward(&residual.section_point(&RatFunc::t()))?;
        let (sx, sy) = match sec {
            Point::Affine(x, y) => (x * mu2.inv().unwrap(), y * mu3.inv().unwrap()),
            Point::Infinity => return Err(Error::SectionTorsion),
        };
        let (l1, q) = model.chart_factors();
        let mut degenerate = UPoly::one();
        for f in [l1, q, mu.clone()] {
            degenerate = &(&degenerate * f.num()) * f.den();
        }
        let degenerate = degenerate.squarefree_part();
        let (a, b) = (a.num().clone(), b.num().clone());
        let disc =
            ShortCurve::new(RatFunc::poly(a.clone()), RatFunc::poly(b.clone())).discriminant();
        let fam = WeierstrassFamily {
            residual: residual.clone(),
            a,
            b,
            kappa,
            mu,
            section_x: sx,
            section_y: sy,
            degenerate,
            discriminant: disc.num().clone(),
        };
        if fam.discriminant.is_zero() {
            return Err(Error::DegenerateFamily(
                "discriminant vanishes identically".into(),
            ));
        }
        let e = fam.generic_curve();
        if !e.contains(&fam.generic_section()) {
            return Err(Error::InternalConsistency(
                "section does not lie on the generic fiber".into(),
            ));
        }
        Ok(fam)
    }

    pub fn axis(&self) -> Axis {
        self.residual.axis
    }

    pub fn chart(&self) -> Chart {
        self.residual.chart
    }

    pub fn residual(&self) -> &ResidualCubicFamily {
        &self.residual
    }

    /// `A(t)` in `y² = x³ + A(t)·x + B(t)`.
    pub fn a(&self) -> &UPoly<Q> {
        &self.a
    }

    pub fn b(&self) -> &UPoly<Q> {
        &self.b
    }

    /// The twist `κ`.
    pub fn kappa(&self) -> &BigInt {
        &self.kappa
    }

    /// The scale `μ(t)` from the reduction of `C_t` to this model.
    pub fn mu(&self) -> &RatFunc {
        &self.mu
    }

    /// `Δ(t) = −16(4A³ + 27B²)`.
    pub fn discriminant(&self) -> &UPoly<Q> {
        &self.discriminant
    }

    /// Square-free polynomial whose roots are the parameters where the
    /// fiber maps of [`WeierstrassFamily::fiber`] are unavailable.
    pub fn degenerate_locus(&self) -> &UPoly<Q> {
        &self.degenerate
    }

    pub fn section_x(&self) -> &RatFunc {
        &self.section_x
    }

    pub fn section_y(&self) -> &RatFunc {
        &self.section_y
    }

    pub fn generic_curve(&self) -> ShortCurve<RatFunc> {
        ShortCurve::new(RatFunc::poly(self.a.clone()), RatFunc::poly(self.b.clone()))
    }

    pub fn generic_section(&self) -> Point<RatFunc> {
        Point::Affine(self.section_x.clone(), self.section_y.clone())
    }

    /// The fiber curve at `t0`.
    pub fn curve_at<F: Field>(&self, t0: &F) -> ShortCurve<F> {
        ShortCurve::new(
            self.a.eval_map(t0, F::from_q),
            self.b.eval_map(t0, F::from_q),
        )
    }

    /// `σ(t0)`; a pole of the section is the point at infinity.
    pub fn section_at<F: Field>(&self, t0: &F) -> Point<F> {
        match (self.section_x.eval_in(t0), self.section_y.eval_in(t0)) {
            (Some(x), Some(y)) => Point::Affine(x, y),
            _ => Point::Infinity,
        }
    }

    /// The fiber at `t0` together with its maps to and from `C_{t0}`.
    pub fn fiber<F: Field>(&self, t0: &F) -> Result<FiberModel<F>> {
        if self.discriminant.eval_map(t0, F::from_q).is_negligible() {
            return Err(Error::SingularFiber(
                "discriminant vanishes at the parameter".into(),
            ));
        }
        if self.degenerate.eval_map(t0, F::from_q).is_negligible() {
            return Err(Error::ChartDegenerate(
                "parameter in the degenerate locus".into(),
            ));
        }
        let cubic = self.residual.at(t0);
        let nagell =
            NagellModel::new(&cubic, &self.residual.zero_point(), NagellOptions::strict())?;
        let mu = self
            .mu
            .eval_in(t0)
            .ok_or_else(|| Error::ChartDegenerate("scale factor has a pole".into()))?;
        let mu_inv = mu
            .inv()
            .ok_or_else(|| Error::ChartDegenerate("scale factor vanishes".into()))?;
        Ok(FiberModel {
            t: t0.clone(),
            curve: self.curve_at(t0),
            section: self.section_at(t0),
            cubic,
            nagell,
            mu,
            mu_inv,
        })
    }

    /// `T_m(t)`: `f_m(X_σ)` (times `Y_σ` for even `m`) with denominators
    /// cleared and every factor shared with `Δ` removed; `T_1` is the
    /// denominator of `X_σ`. Made primitive.
    pub fn torsion_value_polynomial(&self, m: u32) -> Result<UPoly<Q>> {
        if m == 0 {
            return Err(Error::InvalidArgument("order must be positive".into()));
        }
        let raw = if m == 1 {
            self.section_x.den().clone()
        } else if self.section_x.is_poly() && self.section_y.is_poly() {
            let x = self
                .section_x
                .num()
                .scale(&Field::inv(&self.section_x.den().lc()).unwrap());
            let y = self
                .section_y
                .num()
                .scale(&Field::inv(&self.section_y.den().lc()).unwrap());
            let vals = reduced_division_values(m as usize, &x, &self.a, &self.b, |n| {
                UPoly::constant(Q::from_integer(n.into()))
            });
            if m % 2 == 0 {
                &y * &vals[m as usize]
            } else {
                vals[m as usize].clone()
            }
        } else {
            let vals = reduced_division_values(
                m as usize,
                &self.section_x,
                &RatFunc::poly(self.a.clone()),
                &RatFunc::poly(self.b.clone()),
                RatFunc::from_i64,
            );
            let v = if m % 2 == 0 {
                self.section_y.clone() * vals[m as usize].clone()
            } else {
                vals[m as usize].clone()
            };
            v.num().clone()
        };
        if raw.is_zero() {
            return Err(Error::SectionTorsion);
        }
        Ok(raw.strip_common(&self.discriminant).primitive())
    }

    /// Polynomial whose roots are the smooth-fiber parameters where `σ` has
    /// exact order `m`; square-free and primitive.
    pub fn exact_order_polynomial(&self, m: u32) -> Result<UPoly<Q>> {
        let mut p = self.torsion_value_polynomial(m)?.squarefree_part();
        for d in 1..m {
            if m % d == 0 {
                p = p.strip_common(&self.torsion_value_polynomial(d)?);
            }
        }
        Ok(p.primitive())
    }

    /// Torsion values of exact order `m`, grouped into Galois orbits.
    pub fn torsion_values(&self, m: u32, precision: f64) -> Result<Vec<TorsionValueOrbit>> {
        let p = self.exact_order_polynomial(m)?;
        if p.is_constant() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut factors = crate::algebra::factor::irreducible_factors(&p)?;
        factors.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| a.to_string().cmp(&b.to_string()))
        });
        for f in factors {
            let conjugates = AlgebraicNumber::conjugates_of(&f, precision)?;
            out.push(TorsionValueOrbit {
                order: m,
                minpoly: f.primitive(),
                conjugates,
            });
        }
        Ok(out)
    }

    /// Parameters of singular fibers in this chart, plus how many sit at
    /// the far end of the pencil (`24 − deg Δ` when `Δ` has degree ≤ 24).
    pub fn singular_fibers(&self, precision: f64) -> Result<SingularFibers> {
        if self.discriminant.is_zero() {
            return Err(Error::DegenerateFamily(
                "discriminant vanishes identically".into(),
            ));
        }
        let finite = AlgebraicNumber::roots_of(&self.discriminant, precision)?;
        let deg = self.discriminant.degree().unwrap_or(0);
        Ok(SingularFibers {
            finite,
            at_infinity: 24usize.saturating_sub(deg),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SingularFibers {
    pub finite: Vec<AlgebraicNumber>,
    /// Multiplicity of the parameter at infinity as a root of the
    /// homogenized discriminant.
    pub at_infinity: usize,
}

impl SingularFibers {
    pub fn count(&self) -> usize {
        self.finite.len() + self.at_infinity.min(1)
    }
}

/// One Galois orbit of torsion values of a given exact order.
#[derive(Clone, Debug)]
pub struct TorsionValueOrbit {
    pub order: u32,
    pub minpoly: UPoly<Q>,
    pub conjugates: Vec<AlgebraicNumber>,
}

/// A fiber `E_{t0}` with the birational maps to its plane cubic.
#[derive(Clone, Debug)]
pub struct FiberModel<F: Field> {
    pub t: F,
    pub curve: ShortCurve<F>,
    pub section: Point<F>,
    pub cubic: MultiPoly<F>,
    nagell: NagellModel<F>,
    mu: F,
    mu_inv: F,
}

impl<F: Field> FiberModel<F> {
    /// Plane-cubic point to the Weierstrass curve.
    pub fn to_curve(&self, p: &[F; 3]) -> Result<Point<F>> {
        Ok(match self.nagell.forward(p)? {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let m2 = self.mu_inv.square();
                Point::Affine(x * m2.clone(), y * m2 * self.mu_inv.clone())
            }
        })
    }

    /// Weierstrass point back to the plane cubic.
    pub fn to_cubic(&self, p: &Point<F>) -> Result<[F; 3]> {
        let q = match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let m2 = self.mu.square();
                Point::Affine(x.clone() * m2.clone(), y.clone() * m2 * self.mu.clone())
            }
        };
        self.nagell.inverse(&q)
    }

    /// The reduction's own short model rescaled; must equal `curve`.
    pub fn rescaled_model(&self) -> ShortCurve<F> {
        let m4 = self.mu_inv.square().square();
        let m6 = m4.clone() * self.mu_inv.square();
        ShortCurve::new(
            self.nagell.short.a.clone() * m4,
            self.nagell.short.b.clone() * m6,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_split_examples() {
        let cases = [
            (12i64, 3i64, 2i64),
            (-50, -2, 5),
            (1, 1, 1),
            (49, 1, 7),
            (2 * 10_007 * 10_007, 2, 10_007),
        ];
        for (n, k, r) in cases {
            assert_eq!(
                square_split(&BigInt::from(n)),
                (BigInt::from(k), BigInt::from(r)),
                "{n}"
            );
        }
    }
}
