//! Reduction of a plane cubic with a marked point to Weierstrass form.
//!
//! Coordinates are first changed so the marked point `O` sits at `(0:0:1)`;
//! then `C = c²·L(a,b) + c·Q(a,b) + K(a,b)` with `L` the tangent line at `O`.
//!
//! * When `O` is not a flex, lines through `O` with direction
//!   `d(s) = (l2 + s, −l1)` give the quartic model `η² = G(s)`,
//!   `G = Q(d)² − 4·l1·s·K(d)`, whose constant term is a square; the classical
//!   quartic-to-cubic substitution then yields a long Weierstrass model with
//!   `O` at infinity.
//! * When `O` is a flex, taking the tangent as the line at infinity gives a
//!   long Weierstrass model directly after rescaling.
//!
//! Both end in the short model `Y² = X³ + A·X + B`.

use super::curve::{LongCurve, Point, ShortCurve};
use crate::algebra::{Field, MultiPoly, UPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NagellPath {
    Quartic,
    Flex,
}

/// Knobs controlling which fallbacks the transformation may take. Family
/// specializations use [`NagellOptions::strict`] so that a fiber map agrees
/// with the generic one.
#[derive(Clone, Copy, Debug)]
pub struct NagellOptions {
    pub allow_swap: bool,
    pub allow_flex: bool,
}

impl NagellOptions {
    pub fn flexible() -> Self {
        NagellOptions {
            allow_swap: true,
            allow_flex: true,
        }
    }
    pub fn strict() -> Self {
        NagellOptions {
            allow_swap: false,
            allow_flex: false,
        }
    }
}

/// A Weierstrass model of a marked plane cubic with both birational maps.
#[derive(Clone, Debug)]
pub struct NagellModel<F: Field> {
    /// Index of the coordinate of `O` used as the new third coordinate.
    k: usize,
    /// The other two coordinate indices (new a, new b).
    ij: (usize, usize),
    o: [F; 3],
    l1: F,
    l2: F,
    /// Q = [aa, ab, bb], K = [aaa, aab, abb, bbb] in the new coordinates.
    qf: [F; 3],
    kf: [F; 4],
    path: NagellPath,
    /// Quartic path: G coefficients g0..g4 and q with g0 = q².
    g: [F; 5],
    q: F,
    /// Flex path: k0 and whether the chart uses m = b (true) or m = a.
    k0: F,
    m_is_b: bool,
    pub long: LongCurve<F>,
    pub short: ShortCurve<F>,
}

fn bin2<F: Field>(f: &[F; 3], a: &F, b: &F) -> F {
    f[0].clone() * a.square() + f[1].clone() * a.clone() * b.clone() + f[2].clone() * b.square()
}

fn bin3<F: Field>(f: &[F; 4], a: &F, b: &F) -> F {
    f[0].clone() * a.pow(3)
        + f[1].clone() * a.square() * b.clone()
        + f[2].clone() * a.clone() * b.square()
        + f[3].clone() * b.pow(3)
}

impl<F: Field> NagellModel<F> {
    /// Builds the model of the ternary cubic `c` (3 variables) with marked
    /// point `o`.
    pub fn new(c: &MultiPoly<F>, o: &[F; 3], opts: NagellOptions) -> Result<Self> {
        if c.nvars() != 3 || c.total_degree() != Some(3) || !c.is_homogeneous() {
            return Err(Error::InvalidArgument(
                "expected a ternary cubic form".into(),
            ));
        }
        if !c.eval(o).is_negligible() {
            return Err(Error::InvalidPoint);
        }
        let k = (0..3)
            .rev()
            .find(|&i| !o[i].is_negligible())
            .ok_or(Error::InvalidPoint)?;
        let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
        match Self::with_basis(c, o, k, (others[0], others[1]), opts) {
            Err(Error::ChartDegenerate(_)) if opts.allow_swap => {
                Self::with_basis(c, o, k, (others[1], others[0]), opts)
            }
            r => r,
        }
    }

    fn with_basis(
        c: &MultiPoly<F>,
        o: &[F; 3],
        k: usize,
        ij: (usize, usize),
        opts: NagellOptions,
    ) -> Result<Self> {
        // old = a·e_i + b·e_j + c·O
        let var = |n: usize| MultiPoly::<F>::var(3, n);
        let subs: Vec<MultiPoly<F>> = (0..3)
            .map(|idx| {
                let mut p = &var(2) * &MultiPoly::constant(3, o[idx].clone());
                if idx == ij.0 {
                    p = &p + &var(0);
                }
                if idx == ij.1 {
                    p = &p + &var(1);
                }
                p
            })
            .collect();
        let cc = c.substitute(&subs);
        let co = |i: u32, j: u32, l: u32| cc.coeff(&[i, j, l]);
        let l1 = co(1, 0, 2);
        let l2 = co(0, 1, 2);
        let qf = [co(2, 0, 1), co(1, 1, 1), co(0, 2, 1)];
        let kf = [co(3, 0, 0), co(2, 1, 0), co(1, 2, 0), co(0, 3, 0)];
        if l1.is_negligible() && l2.is_negligible() {
            return Err(Error::MarkedPointSingular);
        }
        // direction of the tangent line: L(l2, −l1) = 0
        let (d0a, d0b) = (l2.clone(), -l1.clone());
        let q_tan = bin2(&qf, &d0a, &d0b);
        if q_tan.is_negligible() {
            if !opts.allow_flex {
                return Err(Error::ChartDegenerate("marked point is a flex".into()));
            }
            return Self::flex(k, ij, o.clone(), l1, l2, qf, kf);
        }
        if l1.is_negligible() {
            return Err(Error::ChartDegenerate(
                "tangent coefficient l1 vanishes".into(),
            ));
        }
        // Qs(s) = Q(l2 + s, −l1), Ks(s) = K(l2 + s, −l1)
        let da = UPoly::new(vec![l2.clone(), F::one()]);
        let db = UPoly::constant(-l1.clone());
        let qs =
            &(&(&da * &da).scale(&qf[0]) + &(&da * &db).scale(&qf[1])) + &(&db * &db).scale(&qf[2]);
        let ks = &(&(&(&da * &da) * &da).scale(&kf[0]) + &(&(&da * &da) * &db).scale(&kf[1]))
            + &(&(&(&da * &db) * &db).scale(&kf[2]) + &(&(&db * &db) * &db).scale(&kf[3]));
        let gpoly =
            &(&qs * &qs) - &(&ks * &UPoly::new(vec![F::zero(), F::from_i64(4) * l1.clone()]));
        let g: [F; 5] = std::array::from_fn(|i| gpoly.coeff(i));
        let q = -qs.coeff(0);
        // G a perfect square ⇒ the cubic splits
        let h1 = g[1].clone() * (F::from_i64(2) * q.clone()).inv().unwrap();
        let h2 = (g[2].clone() - h1.square()) * (F::from_i64(2) * q.clone()).inv().unwrap();
        let h = UPoly::new(vec![q.clone(), h1, h2]);
        if (&(&h * &h) - &gpoly)
            .coeffs()
            .iter()
            .all(|c| c.is_negligible())
        {
            return Err(Error::ReducibleFiber);
        }
        let (ga, gb, gc, gd) = (g[4].clone(), g[3].clone(), g[2].clone(), g[1].clone());
        let q2 = q.square();
        let a1 = gd.clone() * q.inv().unwrap();
        let a2 = gc.clone() - gd.square() * (F::from_i64(4) * q2.clone()).inv().unwrap();
        let a3 = F::from_i64(2) * q.clone() * gb;
        let a4 = F::from_i64(-4) * q2 * ga;
        let a6 = a2.clone() * a4.clone();
        let long = LongCurve { a1, a2, a3, a4, a6 };
        let short = long.to_short();
        Ok(NagellModel {
            k,
            ij,
            o: o.clone(),
            l1,
            l2,
            qf,
            kf,
            path: NagellPath::Quartic,
            g,
            q,
            k0: F::zero(),
            m_is_b: true,
            long,
            short,
        })
    }

    fn flex(
        k: usize,
        ij: (usize, usize),
        o: [F; 3],
        l1: F,
        l2: F,
        qf: [F; 3],
        kf: [F; 4],
    ) -> Result<Self> {
        // new chart coordinates X = m(a,b), Z = L(a,b)
        let m_is_b = !l1.is_negligible();
        // (a, b) in terms of (X, Z) as linear forms [coeff X, coeff Z]
        let (ax, bx) = if m_is_b {
            let inv = l1.inv().unwrap();
            ([-l2.clone() * inv.clone(), inv], [F::one(), F::zero()])
        } else {
            let inv = l2.inv().unwrap();
            ([F::one(), F::zero()], [F::zero(), inv])
        };
        let ap = UPoly::new(vec![ax[1].clone(), ax[0].clone()]); // in X with Z = 1
        let bp = UPoly::new(vec![bx[1].clone(), bx[0].clone()]);
        // dehomogenized in Z = 1 as polynomials in X
        let qx =
            &(&(&ap * &ap).scale(&qf[0]) + &(&ap * &bp).scale(&qf[1])) + &(&bp * &bp).scale(&qf[2]);
        let kx = &(&(&(&ap * &ap) * &ap).scale(&kf[0]) + &(&(&ap * &ap) * &bp).scale(&kf[1]))
            + &(&(&(&ap * &bp) * &bp).scale(&kf[2]) + &(&(&bp * &bp) * &bp).scale(&kf[3]));
        // y² + y·(q1 x + q2) + (k0 x³ + k1 x² + k2 x + k3) = 0
        let (q1, q2) = (qx.coeff(1), qx.coeff(0));
        let (k0, k1, k2, k3) = (kx.coeff(3), kx.coeff(2), kx.coeff(1), kx.coeff(0));
        if k0.is_negligible() {
            return Err(Error::ReducibleFiber);
        }
        let ik = k0.inv().unwrap();
        let long = LongCurve {
            a1: -q1 * ik.clone(),
            a2: -k1 * ik.pow(2),
            a3: q2 * ik.pow(2),
            a4: k2 * ik.pow(3),
            a6: -k3 * ik.pow(4),
        };
        let short = long.to_short();
        Ok(NagellModel {
            k,
            ij,
            o,
            l1,
            l2,
            qf,
            kf,
            path: NagellPath::Flex,
            g: std::array::from_fn(|_| F::zero()),
            q: F::zero(),
            k0,
            m_is_b,
            long,
            short,
        })
    }

    pub fn path(&self) -> NagellPath {
        self.path
    }

    /// `(l1, q)`: the quantities divided by on the quartic path. A
    /// specialization of a generic model is valid where both are nonzero.
    pub fn chart_factors(&self) -> (F, F) {
        (self.l1.clone(), self.q.clone())
    }

    /// Coordinates relative to the adapted basis.
    fn to_local(&self, p: &[F; 3]) -> [F; 3] {
        let c = p[self.k].clone() * self.o[self.k].inv().unwrap();
        let a = p[self.ij.0].clone() - c.clone() * self.o[self.ij.0].clone();
        let b = p[self.ij.1].clone() - c.clone() * self.o[self.ij.1].clone();
        [a, b, c]
    }

    fn from_local(&self, l: &[F; 3]) -> [F; 3] {
        let mut out: [F; 3] = std::array::from_fn(|i| l[2].clone() * self.o[i].clone());
        out[self.ij.0] = out[self.ij.0].clone() + l[0].clone();
        out[self.ij.1] = out[self.ij.1].clone() + l[1].clone();
        out
    }

    /// Maps a cubic point to the short model; `O` goes to infinity.
    pub fn forward(&self, p: &[F; 3]) -> Result<Point<F>> {
        let [a, b, c] = self.to_local(p);
        if a.is_negligible() && b.is_negligible() {
            return Ok(Point::Infinity);
        }
        let (x, y) = match self.path {
            NagellPath::Flex => {
                let (xc, zc) = if self.m_is_b {
                    (
                        b.clone(),
                        self.l1.clone() * a.clone() + self.l2.clone() * b.clone(),
                    )
                } else {
                    (
                        a.clone(),
                        self.l1.clone() * a.clone() + self.l2.clone() * b.clone(),
                    )
                };
                let iz = zc
                    .inv()
                    .ok_or_else(|| Error::UndefinedMap("point on the flex tangent".into()))?;
                let x = xc * iz.clone();
                let y = c * iz;
                let ik = self.k0.inv().unwrap();
                (-x * ik.clone(), y * ik.square())
            }
            NagellPath::Quartic => self.forward_quartic(&a, &b, &c)?,
        };
        let (xs, ys) = self.long.point_to_short(&x, &y);
        Ok(Point::Affine(xs, ys))
    }

    fn forward_quartic(&self, a: &F, b: &F, c: &F) -> Result<(F, F)> {
        let q = self.q.clone();
        let two_q = F::from_i64(2) * q.clone();
        let (gb, gc, gd) = (self.g[3].clone(), self.g[2].clone(), self.g[1].clone());
        if b.is_negligible() {
            // direction s = ∞: the image has y = 0
            let w = c.clone() * a.inv().unwrap();
            let x = two_q * (F::from_i64(2) * self.l1.clone() * w + self.qf[0].clone());
            return Ok((x, F::zero()));
        }
        let lambda = -b.clone() * self.l1.inv().unwrap();
        let il = lambda.inv().unwrap();
        let s = a.clone() * il.clone() - self.l2.clone();
        if s.is_negligible() {
            // third point of the tangent at O
            let x = -self.long.a2.clone();
            let q2 = q.square();
            let y = (F::from_i64(-8) * gb * q2.square()
                + F::from_i64(4) * gc * gd.clone() * q2.clone()
                - gd.pow(3))
                * (F::from_i64(4) * q2 * q.clone()).inv().unwrap();
            return Ok((x, y));
        }
        let w = c.clone() * il;
        let (qs, _) = self.qk_at(&s);
        let eta = F::from_i64(2) * self.l1.clone() * s.clone() * w + qs;
        let u = s;
        let v = eta;
        let iu = u.inv().unwrap();
        let x = (two_q.clone() * (v.clone() + q.clone()) + gd.clone() * u.clone()) * iu.square();
        let y = (F::from_i64(4) * q.square() * (v + q.clone())
            + two_q.clone() * (gd.clone() * u.clone() + gc * u.square())
            - gd.square() * u.square() * two_q.inv().unwrap())
            * iu.pow(3);
        Ok((x, y))
    }

    fn qk_at(&self, s: &F) -> (F, F) {
        let a = self.l2.clone() + s.clone();
        let b = -self.l1.clone();
        (bin2(&self.qf, &a, &b), bin3(&self.kf, &a, &b))
    }

    /// Maps a point of the short model back to the cubic.
    pub fn inverse(&self, p: &Point<F>) -> Result<[F; 3]> {
        let (xs, ys) = match p {
            Point::Infinity => return Ok(self.o.clone()),
            Point::Affine(x, y) => (x, y),
        };
        let (x, y) = self.long.point_from_short(xs, ys);
        let local = match self.path {
            NagellPath::Flex => {
                let xx = -self.k0.clone() * x;
                let yy = self.k0.square() * y;
                // (X, Z) = (xx, 1)
                let (a, b) = if self.m_is_b {
                    let b = xx;
                    let a = (F::one() - self.l2.clone() * b.clone()) * self.l1.inv().unwrap();
                    (a, b)
                } else {
                    (xx, self.l2.inv().unwrap())
                };
                [a, b, yy]
            }
            NagellPath::Quartic => self.inverse_quartic(&x, &y)?,
        };
        Ok(self.from_local(&local))
    }

    fn inverse_quartic(&self, x: &F, y: &F) -> Result<[F; 3]> {
        let q = self.q.clone();
        let two_q = F::from_i64(2) * q.clone();
        let (gc, gd) = (self.g[2].clone(), self.g[1].clone());
        let n = two_q.clone() * (x.clone() + gc) - gd.square() * two_q.inv().unwrap();
        if y.is_negligible() {
            if n.is_negligible() {
                return Err(Error::UndefinedMap("both numerator and y vanish".into()));
            }
            let w = (x.clone() * two_q.inv().unwrap() - self.qf[0].clone())
                * (F::from_i64(2) * self.l1.clone()).inv().unwrap();
            return Ok([F::one(), F::zero(), w]);
        }
        let u = n * y.inv().unwrap();
        if u.is_negligible() {
            let (_, ks0) = self.qk_at(&F::zero());
            return Ok([self.l2.clone(), -self.l1.clone(), ks0 * q.inv().unwrap()]);
        }
        let v = -q.clone() + u.clone() * (u.clone() * x.clone() - gd) * two_q.inv().unwrap();
        let (qs, _) = self.qk_at(&u);
        let w = (v - qs)
            * (F::from_i64(2) * self.l1.clone() * u.clone())
                .inv()
                .unwrap();
        Ok([self.l2.clone() + u, -self.l1.clone(), w])
    }

    /// Invariants `(I, J)` of the binary quartic `Q² − 4LK` whose double
    /// cover is the curve; the short model is isomorphic to
    /// `y² = x³ − 27I·x − 27J`.
    pub fn quartic_invariants(&self) -> (F, F) {
        let [qa, qb, qc] = self.qf.clone();
        let [ka, kb, kc, kd] = self.kf.clone();
        let (l1, l2) = (self.l1.clone(), self.l2.clone());
        let four = F::from_i64(4);
        // Q² − 4LK in the monomials a⁴, a³b, a²b², ab³, b⁴
        let c4 = qa.square() - four.clone() * l1.clone() * ka.clone();
        let c3 = F::from_i64(2) * qa.clone() * qb.clone()
            - four.clone() * (l1.clone() * kb.clone() + l2.clone() * ka);
        let c2 = qb.square() + F::from_i64(2) * qa * qc.clone()
            - four.clone() * (l1.clone() * kc.clone() + l2.clone() * kb);
        let c1 =
            F::from_i64(2) * qb * qc.clone() - four.clone() * (l1 * kd.clone() + l2.clone() * kc);
        let c0 = qc.square() - four * l2 * kd;
        quartic_ij(&[c4, c3, c2, c1, c0])
    }
}

/// `(I, J)` of `a x⁴ + b x³y + c x²y² + d xy³ + e y⁴`.
pub fn quartic_ij<F: Field>(q: &[F; 5]) -> (F, F) {
    let [a, b, c, d, e] = q.clone();
    let i = F::from_i64(12) * a.clone() * e.clone() - F::from_i64(3) * b.clone() * d.clone()
        + c.square();
    let j = F::from_i64(72) * a.clone() * c.clone() * e.clone()
        + F::from_i64(9) * b.clone() * c.clone() * d.clone()
        - F::from_i64(27) * a * d.square()
        - F::from_i64(27) * e * b.square()
        - F::from_i64(2) * c.pow(3);
    (i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{qi, Q};

    fn cubic(terms: &[([u32; 3], i64)]) -> MultiPoly<Q> {
        MultiPoly::from_terms(3, terms.iter().map(|(e, c)| (e.to_vec(), qi(*c))))
    }

    /// A smooth cubic through (0:0:1) that is not a flex there.
    fn sample() -> MultiPoly<Q> {
        // w²x + w(y² + xy) + (x³ − 2y³ + x y²)
        cubic(&[
            ([1, 0, 2], 1),
            ([0, 2, 1], 1),
            ([1, 1, 1], 1),
            ([3, 0, 0], 1),
            ([0, 3, 0], -2),
            ([1, 2, 0], 1),
        ])
    }

    #[test]
    fn round_trip_rational_points() {
        let c = sample();
        let o = [qi(0), qi(0), qi(1)];
        let m = NagellModel::new(&c, &o, NagellOptions::flexible()).unwrap();
        assert_eq!(m.path(), NagellPath::Quartic);
        assert!(!m.short.is_singular());
        assert_eq!(m.inverse(&Point::Infinity).unwrap(), o);
        assert_eq!(m.forward(&o).unwrap(), Point::Infinity);
        // small rational points of the cubic, compared projectively after a round trip
        let mut pts = Vec::new();
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                for w in 0i64..=6 {
                    let p = [qi(x), qi(y), qi(w)];
                    if (x, y, w) != (0, 0, 0) && Field::is_zero(&c.eval(&p)) {
                        pts.push(p);
                    }
                }
            }
        }
        assert!(pts.len() > 3);
        let proj_eq = |p: &[Q; 3], q: &[Q; 3]| {
            (0..3)
                .all(|i| (0..3).all(|j| p[i].clone() * q[j].clone() == p[j].clone() * q[i].clone()))
        };
        let mut images = Vec::new();
        for p in &pts {
            let img = m.forward(p).unwrap();
            assert!(m.short.contains(&img));
            let back = m.inverse(&img).unwrap();
            assert!(proj_eq(&back, p), "{p:?} -> {back:?}");
            images.push(img);
        }
        // sums land back on the cubic
        for i in 0..images.len() {
            for j in 0..images.len() {
                let s = m.short.add(&images[i], &images[j]).unwrap();
                let cp = m.inverse(&s).unwrap();
                assert!(Field::is_zero(&c.eval(&cp)));
            }
        }
    }

    #[test]
    fn special_points_map_consistently() {
        let c = sample();
        let o = [qi(0), qi(0), qi(1)];
        let m = NagellModel::new(&c, &o, NagellOptions::flexible()).unwrap();
        // third point of the tangent w·x direction: L = x, tangent direction (0,1)
        // C(0, y, w) = w y² − 2y³ → y = w/2: point (0 : 1/2 : 1) ~ (0:1:2)
        let ptan = [qi(0), qi(1), qi(2)];
        assert!(Field::is_zero(&c.eval(&ptan)));
        let img = m.forward(&ptan).unwrap();
        assert!(m.short.contains(&img));
        let back = m.inverse(&img).unwrap();
        let ratio = back[2].clone() / back[1].clone();
        assert_eq!(ratio, qi(2));
        assert_eq!(back[0], qi(0));
    }

    #[test]
    fn flex_path() {
        // Weierstrass cubic y²w = x³ + w³ with O = (0:1:0), a flex
        let c = cubic(&[([0, 2, 1], 1), ([3, 0, 0], -1), ([0, 0, 3], -1)]);
        let o = [qi(0), qi(1), qi(0)];
        let m = NagellModel::new(&c, &o, NagellOptions::flexible()).unwrap();
        assert_eq!(m.path(), NagellPath::Flex);
        let p = [qi(2), qi(3), qi(1)];
        let img = m.forward(&p).unwrap();
        assert!(m.short.contains(&img));
        let back = m.inverse(&img).unwrap();
        assert_eq!(back[0].clone() / back[2].clone(), qi(2));
        assert_eq!(back[1].clone() / back[2].clone(), qi(3));
        // j-invariant 0 is preserved: A = 0
        assert!(Field::is_zero(&m.short.a));
        assert!(matches!(
            NagellModel::new(&c, &o, NagellOptions::strict()),
            Err(Error::ChartDegenerate(_))
        ));
    }

    #[test]
    fn singular_marked_point_and_reducible() {
        // nodal at O: w(x² − y²) + x³
        let c = cubic(&[([2, 0, 1], 1), ([0, 2, 1], -1), ([3, 0, 0], 1)]);
        let o = [qi(0), qi(0), qi(1)];
        assert_eq!(
            NagellModel::new(&c, &o, NagellOptions::flexible()).unwrap_err(),
            Error::MarkedPointSingular
        );
        // line x = 0 through O times a conic not through... : x·(w² + y² − x²)
        let r = cubic(&[([1, 0, 2], 1), ([1, 2, 0], 1), ([3, 0, 0], -1)]);
        assert_eq!(
            NagellModel::new(&r, &o, NagellOptions::flexible()).unwrap_err(),
            Error::ReducibleFiber
        );
        // conic through O times a line: (w x + y²)(x + y + w) → smooth at O
        let conic = cubic(&[([1, 0, 1], 1), ([0, 2, 0], 1)]);
        let line = cubic(&[([1, 0, 0], 1), ([0, 1, 0], 1), ([0, 0, 1], 1)]);
        let prod = &conic * &line;
        assert_eq!(
            NagellModel::new(&prod, &o, NagellOptions::flexible()).unwrap_err(),
            Error::ReducibleFiber
        );
    }
}
