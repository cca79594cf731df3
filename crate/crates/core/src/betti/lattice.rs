//! Period lattices of `y² = x³ + a x + b` for the differential `dx/y`, the
//! exponential map `z ↦ (4℘(z), 4℘′(z))` and its inverse.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::numeric::roots_c64;
use crate::algebra::ComplexApprox;
use crate::error::{Error, Result};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Relative `|Δ|` below which a fiber is treated as too close to singular.
pub const DEFAULT_DISCRIMINANT_MARGIN: f64 = 1e-10;

/// A lattice basis with `Im(ω₂/ω₁) > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodLattice {
    pub w1: C,
    pub w2: C,
    /// Relative error estimate of both periods.
    pub err: f64,
}

impl PeriodLattice {
    pub fn tau(&self) -> C {
        self.w2 / self.w1
    }

    /// Length of the shortest nonzero vector.
    pub fn min_length(&self) -> f64 {
        let r = reduce_basis(self.w1, self.w2);
        r.0.norm()
    }

    /// Real coordinates of `z` in the basis.
    pub fn coords(&self, z: C) -> (f64, f64) {
        let u = z / self.w1;
        let tau = self.tau();
        let b2 = u.im / tau.im;
        (u.re - b2 * tau.re, b2)
    }

    pub fn point(&self, b1: f64, b2: f64) -> C {
        self.w1 * b1 + self.w2 * b2
    }

    /// `z` moved into the parallelogram `[−½, ½)²`.
    pub fn reduce(&self, z: C) -> C {
        let (b1, b2) = self.coords(z);
        z - self.point(b1.round(), b2.round())
    }

    /// The basis of the same lattice closest to `prev`, if one exists
    /// within a quarter of the shortest vector.
    pub fn aligned_to(&self, prev: &PeriodLattice) -> Option<PeriodLattice> {
        let near = |w: C| {
            let (m, n) = self.coords(w);
            (m.round(), n.round())
        };
        let (m1, n1) = near(prev.w1);
        let (m2, n2) = near(prev.w2);
        if (m1 * n2 - m2 * n1).abs() != 1.0 {
            return None;
        }
        let w1 = self.point(m1, n1);
        let w2 = self.point(m2, n2);
        let tol = 0.25 * self.min_length().min(prev.min_length());
        if (w1 - prev.w1).norm() > tol || (w2 - prev.w2).norm() > tol {
            return None;
        }
        let out = PeriodLattice {
            w1,
            w2,
            err: self.err,
        };
        (out.tau().im > 0.0).then_some(out)
    }
}

fn agm(mut a: C, mut b: C) -> C {
    for _ in 0..64 {
        if (a - b).norm() <= 1e-16 * a.norm() {
            break;
        }
        let a1 = (a + b) * 0.5;
        let mut b1 = (a * b).sqrt();
        if (a1 - b1).norm() > (a1 + b1).norm() {
            b1 = -b1;
        }
        a = a1;
        b = b1;
    }
    a
}

fn optimal_pair(a: C, b: C) -> (C, C) {
    if (a - b).norm() > (a + b).norm() {
        (a, -b)
    } else {
        (a, b)
    }
}

/// Gauss reduction: `|w1| ≤ |w2| ≤ |w2 ± w1|`.
fn reduce_basis(mut w1: C, mut w2: C) -> (C, C) {
    if w1.norm() > w2.norm() {
        std::mem::swap(&mut w1, &mut w2);
    }
    for _ in 0..200 {
        let m = (w2 / w1).re.round();
        w2 -= w1 * m;
        if w2.norm() >= w1.norm() {
            break;
        }
        std::mem::swap(&mut w1, &mut w2);
    }
    (w1, w2)
}

/// Roots of `x³ + a x + b`, polished in double precision.
pub fn cubic_roots(a: C, b: C) -> [C; 3] {
    let r = roots_c64(&[b, a, C::new(0.0, 0.0), C::new(1.0, 0.0)]);
    let mut out = [C::new(0.0, 0.0); 3];
    for (k, mut x) in r.into_iter().enumerate().take(3) {
        for _ in 0..3 {
            let f = x * x * x + a * x + b;
            let d = 3.0 * x * x + a;
            if d.norm() == 0.0 {
                break;
            }
            x -= f / d;
        }
        out[k] = x;
    }
    out
}

/// `g₂`, `g₃` of the lattice from Eisenstein q-series.
fn eisenstein(l: &PeriodLattice) -> (C, C) {
    let q = (2.0 * PI * I * l.tau()).exp();
    let (mut e4, mut e6) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
    let mut qn = C::new(1.0, 0.0);
    for n in 1..200u32 {
        qn *= q;
        if qn.norm() < 1e-18 {
            break;
        }
        let (mut s3, mut s5) = (0.0, 0.0);
        for d in 1..=n {
            if n % d == 0 {
                s3 += (d as f64).powi(3);
                s5 += (d as f64).powi(5);
            }
        }
        e4 += qn * (240.0 * s3);
        e6 -= qn * (504.0 * s5);
    }
    let k = 2.0 * PI / l.w1;
    (k.powi(4) * e4 / 12.0, k.powi(6) * e6 / 216.0)
}

/// Periods of `dx/y` on `y² = x³ + a x + b` by the AGM, in a reduced
/// basis, checked against the Eisenstein series of the result.
pub fn period_lattice(a: C, b: C) -> Result<PeriodLattice> {
    period_lattice_with_margin(a, b, DEFAULT_DISCRIMINANT_MARGIN)
}

pub fn period_lattice_with_margin(a: C, b: C, margin: f64) -> Result<PeriodLattice> {
    let disc = 4.0 * a * a * a + 27.0 * b * b;
    let scale = (4.0 * a.norm().powi(3))
        .max(27.0 * b.norm_sqr())
        .max(f64::MIN_POSITIVE);
    if disc.norm() <= margin * scale {
        return Err(Error::IllConditionedFiber(disc.norm()));
    }
    let e = cubic_roots(a, b);
    let mut cands = Vec::new();
    for (i, j, k) in [
        (0, 1, 2),
        (1, 2, 0),
        (2, 0, 1),
        (0, 2, 1),
        (1, 0, 2),
        (2, 1, 0),
    ] {
        let (s, t) = optimal_pair((e[i] - e[k]).sqrt(), (e[i] - e[j]).sqrt());
        cands.push(2.0 * PI / agm(s, t));
    }
    cands.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    let w1 = cands[0];
    let w2 = cands
        .iter()
        .copied()
        .filter(|w| (w / w1).im.abs() > 1e-6)
        .min_by(|x, y| x.norm().total_cmp(&y.norm()))
        .ok_or_else(|| Error::InternalConsistency("AGM periods are collinear".into()))?;
    let (w1, mut w2) = reduce_basis(w1, w2);
    if (w2 / w1).im < 0.0 {
        w2 = -w2;
    }
    // a basis of a sublattice shows up as wrong invariants; try halving
    let target = (-a / 4.0, -b / 16.0);
    let s = (target.0.norm() + target.1.norm().powf(2.0 / 3.0)).max(f64::MIN_POSITIVE);
    let inv_err = |l: &PeriodLattice| {
        let (g2, g3) = eisenstein(l);
        ((g2 - target.0).norm() / s).max((g3 - target.1).norm() / s.powf(1.5))
    };
    let mut best = PeriodLattice { w1, w2, err: 0.0 };
    let mut best_err = inv_err(&best);
    if best_err > 1e-8 {
        for (u, v) in [(w1 / 2.0, w2), (w1, w2 / 2.0), (w1, (w1 + w2) / 2.0)] {
            let (u, mut v) = reduce_basis(u, v);
            if (v / u).im < 0.0 {
                v = -v;
            }
            let l = PeriodLattice {
                w1: u,
                w2: v,
                err: 0.0,
            };
            let e = inv_err(&l);
            if e < best_err {
                best = l;
                best_err = e;
            }
        }
    }
    if best_err > 1e-6 {
        return Err(Error::PrecisionExhausted {
            bits: 53,
            context: format!("period lattice invariants off by {best_err:e}"),
        });
    }
    best.err = best_err.max(1e-15) * 4.0;
    Ok(best)
}

/// `(℘(z), ℘′(z))` of the lattice by the q-expansion.
pub fn weierstrass_p(z: C, l: &PeriodLattice) -> (C, C) {
    let z = l.reduce(z);
    let tau = l.tau();
    let q = (2.0 * PI * I * tau).exp();
    let u = z / l.w1;
    let v = (2.0 * PI * I * u).exp();
    let vi = 1.0 / v;
    let term = |w: C| w / ((1.0 - w) * (1.0 - w));
    let dterm = |w: C| w * (1.0 + w) / ((1.0 - w) * (1.0 - w) * (1.0 - w));
    let mut p = C::new(1.0 / 12.0, 0.0) + term(v);
    let mut dp = dterm(v);
    let mut qn = C::new(1.0, 0.0);
    for _ in 1..200 {
        qn *= q;
        if qn.norm() < 1e-18 {
            break;
        }
        let (a, b) = (qn * v, qn * vi);
        p += term(a) + term(b) - 2.0 * qn / ((1.0 - qn) * (1.0 - qn));
        dp += dterm(a) - dterm(b);
    }
    let k = 2.0 * PI * I / l.w1;
    (k * k * p, k * k * k * dp)
}

/// The point `(4℘(z), 4℘′(z))` of `y² = x³ + a x + b`; `None` at lattice
/// points.
pub fn exp_map(z: C, l: &PeriodLattice) -> Option<(C, C)> {
    let zr = l.reduce(z);
    if zr.norm() < 1e-300 {
        return None;
    }
    let (p, dp) = weierstrass_p(zr, l);
    Some((4.0 * p, 4.0 * dp))
}

/// `z` modulo the lattice with `exp_map(z) = (x, y)`.
pub fn elliptic_log(a: C, x: C, y: C, l: &PeriodLattice) -> Result<ComplexApprox> {
    let scale = 1.0 + x.norm() + y.norm().powf(2.0 / 3.0);
    let mut best: Option<(f64, C)> = None;
    // asymptotic seed near the origin when x is large: x ≈ 4/z²
    if x.norm() > 0.0 {
        let z0 = 2.0 / x.sqrt();
        best = Some((residual(z0, x, l, scale), z0));
    }
    let n = 8;
    for i in 0..n {
        for j in 0..n {
            let z = l.point(
                (i as f64 + 0.5) / n as f64 - 0.5,
                (j as f64 + 0.5) / n as f64 - 0.5,
            );
            let r = residual(z, x, l, scale);
            if best.is_none_or(|b| r < b.0) {
                best = Some((r, z));
            }
        }
    }
    let mut z = best.map(|b| b.1).unwrap_or_default();
    for _ in 0..60 {
        let Some((xz, yz)) = exp_map(z, l) else { break };
        let dy = (3.0 * xz * xz + a) / 2.0;
        // pick the better conditioned of x(z) = x and y(z) = ±y
        let step = if yz.norm() >= 1e-3 * dy.norm() {
            (xz - x) / yz
        } else {
            let target = if (yz - y).norm() <= (yz + y).norm() {
                y
            } else {
                -y
            };
            (yz - target) / dy
        };
        z -= step;
        z = l.reduce(z);
        if step.norm() < 1e-15 * l.w1.norm() {
            break;
        }
    }
    let (xz, yz) = exp_map(z, l).ok_or_else(|| Error::PrecisionExhausted {
        bits: 53,
        context: "elliptic logarithm reached a lattice point".into(),
    })?;
    if (yz + y).norm() < (yz - y).norm() {
        z = l.reduce(-z);
    }
    let rx = (xz - x).norm() / scale;
    if rx > 1e-9 {
        return Err(Error::PrecisionExhausted {
            bits: 53,
            context: format!("elliptic logarithm residual {rx:e}"),
        });
    }
    // first-order error from whichever coordinate equation is better conditioned
    let dy = ((3.0 * xz * xz + a) / 2.0).norm();
    let ry = (yz - y).norm().min((yz + y).norm());
    let dz = ((xz - x).norm() / yz.norm().max(1e-300)).min(ry / dy.max(1e-300));
    let err = dz.min(rx.sqrt() * l.w1.norm()) + 1e-14 * l.w1.norm() + l.err * z.norm();
    Ok(ComplexApprox::new(z.re, z.im, err))
}

fn residual(z: C, x: C, l: &PeriodLattice, scale: f64) -> f64 {
    match exp_map(z, l) {
        Some((xz, _)) => (xz - x).norm() / scale,
        None => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice() {
        let l = period_lattice(C::new(-1.0, 0.0), C::new(0.0, 0.0)).unwrap();
        let real = if l.w1.im.abs() < 1e-12 { l.w1 } else { l.w2 };
        assert!((real.norm() - 5.2441151086).abs() < 1e-9, "{:?}", l);
        assert!((l.tau().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exp_lands_on_curve() {
        let (a, b) = (C::new(0.3, -1.1), C::new(2.0, 0.5));
        let l = period_lattice(a, b).unwrap();
        for z in [C::new(0.1, 0.2), C::new(-0.7, 0.4), l.point(0.3, 0.6)] {
            let (x, y) = exp_map(z, &l).unwrap();
            let r = y * y - (x * x * x + a * x + b);
            assert!(r.norm() < 1e-9 * (1.0 + x.norm().powi(3)), "{r}");
        }
    }
}
