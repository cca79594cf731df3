#![allow(dead_code)]

use std::io::Write;
use std::sync::OnceLock;

use fiberlab::algebra::upoly::sqrt_q;
use fiberlab::algebra::{qf, qi, Field, Q};
use fiberlab::dynamics::{intersection_quadratic, line_point, DoubleFibration, SurfacePoint};
use fiberlab::surface::{sample_surface, Axis, Chart};
use fiberlab::weierstrass::{LongCurve, Point, ShortCurve};
use rand::Rng;

pub fn sample() -> &'static DoubleFibration {
    static D: OnceLock<DoubleFibration> = OnceLock::new();
    D.get_or_init(|| DoubleFibration::new(sample_surface().unwrap()).unwrap())
}

/// Writes a line past the test harness' output capture.
pub fn announce(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

pub fn verdict(n: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    announce(&format!("acceptance [{tag}] criterion {n} ({name}): {detail}"));
}

/// A smooth rational `f₁`-fiber with its Weierstrass model, the section,
/// and further rational points.
pub struct RationalFiber {
    pub t: Q,
    pub curve: ShortCurve<Q>,
    pub section: Point<Q>,
    pub points: Vec<Point<Q>>,
    /// The surface points behind `points`.
    pub surface_points: Vec<SurfacePoint<Q>>,
}

impl RationalFiber {
    pub fn generators(&self) -> Vec<Point<Q>> {
        let mut g = vec![self.section.clone()];
        g.extend(self.points.iter().cloned());
        g
    }

    /// `Σ cᵢ·gᵢ` with coefficients in `-k..=k`.
    pub fn random_point(&self, rng: &mut impl Rng, k: i64) -> Point<Q> {
        let e = &self.curve;
        let mut p = Point::Infinity;
        for g in self.generators().iter().take(2) {
            let c = rng.gen_range(-k..=k);
            p = e.add(&p, &e.scalar_mul(c, g).unwrap()).unwrap();
        }
        p
    }
}

/// Rational points on the fiber `f₁ = t`: where it meets the `f₂`-fibers
/// over `s = p/q` (`|p|, q ≤ height`) in rational points.
pub fn rational_fiber(d: &DoubleFibration, t: &Q, height: i64) -> Option<RationalFiber> {
    let fam = d.family(Axis::L1, Chart::Finite).ok()?;
    if fam.discriminant().eval(t).is_zero() {
        return None;
    }
    let f = d.surface().form();
    let one = Q::one();
    let mut model: Option<(ShortCurve<Q>, Point<Q>)> = None;
    let mut points: Vec<Point<Q>> = Vec::new();
    let mut surface_points = Vec::new();
    let mut seen_s = Vec::new();
    for p in -height..=height {
        for q in 1..=height {
            let s = qf(p, q);
            if seen_s.contains(&s) {
                continue;
            }
            seen_s.push(s.clone());
            let [g0, g1, g2] = intersection_quadratic(f, (&s, &one), (t, &one));
            if g0.is_zero() {
                continue;
            }
            let Some(r) = sqrt_q(&(&g1 * &g1 - qi(4) * &g0 * &g2)) else { continue };
            for r in [r.clone(), -r] {
                let u = (-&g1 + r) / (qi(2) * &g0);
                let Ok(sp) = d.point(line_point((&s, &one), (t, &one), &u, &one)) else { continue };
                let Ok((m, pt)) = d.to_curve(&sp, Axis::L1) else { continue };
                let (curve, section) = model.get_or_insert_with(|| (m.curve.clone(), m.section.clone()));
                if m.curve != *curve || pt.is_infinity() {
                    continue;
                }
                let neg = curve.neg(&pt);
                let known = points.iter().any(|x| *x == pt || *x == neg) || pt == *section || neg == *section;
                if !known {
                    points.push(pt);
                    surface_points.push(sp);
                }
            }
        }
    }
    let (curve, section) = model?;
    if points.is_empty() {
        return None;
    }
    Some(RationalFiber { t: t.clone(), curve, section, points, surface_points })
}

/// Ten smooth fibers with rational points beyond the section.
pub fn ten_fibers() -> &'static [RationalFiber] {
    static F: OnceLock<Vec<RationalFiber>> = OnceLock::new();
    F.get_or_init(|| {
        let ts = [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (4, 1), (3, 4), (5, 2), (4, 3), (2, 3), (1, 3), (5, 1)];
        let v: Vec<_> = ts.iter().filter_map(|&(a, b)| rational_fiber(sample(), &qf(a, b), 30)).take(10).collect();
        assert_eq!(v.len(), 10, "not enough fibers with extra rational points");
        v
    })
}

/// `(0, 0)` on the Tate normal form `y² + (1−c)xy − by = x³ − bx²`, moved
/// to the short model.
pub fn tate_point(b: Q, c: Q) -> (ShortCurve<Q>, Point<Q>) {
    let long = LongCurve { a1: Q::one() - c, a2: -b.clone(), a3: -b, a4: Q::zero(), a6: Q::zero() };
    let (x, y) = long.point_to_short(&Q::zero(), &Q::zero());
    (long.to_short(), Point::Affine(x, y))
}

/// Rational torsion points of orders 4 to 10 with their orders, from the
/// Kubert parametrizations of the Tate normal form.
pub fn kubert_points() -> Vec<(ShortCurve<Q>, Point<Q>, u32)> {
    let mut out = Vec::new();
    let f = qf(3, 2);
    let d7 = qf(2, 1);
    let d8 = qf(3, 1);
    let curves = [
        (qi(3), qi(0), 4),
        (qi(2), qi(2), 5),
        (qi(2) + qi(4), qi(2), 6),
        (d7.pow(3) - d7.square(), d7.square() - d7.clone(), 7),
        ((qi(2) * &d8 - qi(1)) * (&d8 - qi(1)), (qi(2) * &d8 - qi(1)) * (&d8 - qi(1)) / &d8, 8),
        {
            let c = f.square() * (&f - qi(1));
            let d = f.square() - &f + qi(1);
            (&c * &d, c, 9)
        },
        {
            let d = f.square() / (&f - (&f - qi(1)).square());
            let c = &f * &d - &f;
            (&c * &d, c, 10)
        },
    ];
    for (b, c, n) in curves {
        let (e, p) = tate_point(b, c);
        out.push((e, p, n));
    }
    out
}

/// Every nonzero multiple `kP` of the Kubert points with its exact order.
pub fn torsion_multiples() -> Vec<(ShortCurve<Q>, Point<Q>, u32)> {
    let mut out = Vec::new();
    for (e, p, n) in kubert_points() {
        for k in 1..n {
            let g = num_integer::gcd(k, n);
            out.push((e.clone(), e.scalar_mul(k as i64, &p).unwrap(), n / g));
        }
    }
    out
}
