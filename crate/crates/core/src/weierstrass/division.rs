//! Division polynomials of short Weierstrass curves.
//!
//! The reduced polynomials `f_m` satisfy `ψ_m = f_m` for odd `m` and
//! `ψ_m = 2y·f_m` for even `m`; they are polynomials in `x` alone. The
//! recurrences are written for any commutative ring, so the same code
//! evaluates at a number, builds `f_m(x)` as a polynomial, or builds
//! `f_m(X_σ(t))` over ℚ[t].

use std::ops::{Add, Mul, Sub};

use super::curve::{Point, ShortCurve};
use crate::algebra::{Field, UPoly, Q};

/// `[f_0, …, f_m]` evaluated at `x`; `int` embeds small integers.
pub fn reduced_division_values<R>(m: usize, x: &R, a: &R, b: &R, int: impl Fn(i64) -> R) -> Vec<R>
where
    R: Clone + Add<Output = R> + Sub<Output = R> + Mul<Output = R>,
{
    let x2 = x.clone() * x.clone();
    let x3 = x2.clone() * x.clone();
    let x4 = x2.clone() * x2.clone();
    let x6 = x3.clone() * x3.clone();
    let a2 = a.clone() * a.clone();
    let f3 =
        int(3) * x4.clone() + int(6) * a.clone() * x2.clone() + int(12) * b.clone() * x.clone()
            - a2.clone();
    let f4 = int(2)
        * (x6 + int(5) * a.clone() * x4 + int(20) * b.clone() * x3.clone()
            - int(5) * a2.clone() * x2
            - int(4) * a.clone() * b.clone() * x.clone()
            - int(8) * b.clone() * b.clone()
            - a2 * a.clone());
    // (2y)^4 = F4²
    let big_f = int(4) * (x3 + a.clone() * x.clone() + b.clone());
    let ff = big_f.clone() * big_f;
    let mut f = vec![int(0), int(1), int(1), f3, f4];
    f.truncate(m + 1);
    for n in 5..=m {
        let k = n / 2;
        let cube = |v: &R| v.clone() * v.clone() * v.clone();
        let sq = |v: &R| v.clone() * v.clone();
        let v = if n % 2 == 1 {
            if k % 2 == 0 {
                ff.clone() * f[k + 2].clone() * cube(&f[k]) - f[k - 1].clone() * cube(&f[k + 1])
            } else {
                f[k + 2].clone() * cube(&f[k]) - ff.clone() * f[k - 1].clone() * cube(&f[k + 1])
            }
        } else {
            f[k].clone() * (f[k + 2].clone() * sq(&f[k - 1]) - f[k - 2].clone() * sq(&f[k + 1]))
        };
        f.push(v);
    }
    f
}

/// The reduced division polynomial `f_m(x)` of `y² = x³ + ax + b`.
pub fn reduced_division_polynomial<F: Field>(e: &ShortCurve<F>, m: usize) -> UPoly<F> {
    let vals = reduced_division_values(
        m,
        &UPoly::x(),
        &UPoly::constant(e.a.clone()),
        &UPoly::constant(e.b.clone()),
        |n| UPoly::constant(F::from_i64(n)),
    );
    vals[m].clone()
}

/// `ψ_m(P) = 0`, i.e. `m·P = O` for affine `P` (and always for `O`).
pub fn psi_vanishes<F: Field>(e: &ShortCurve<F>, p: &Point<F>, m: u32) -> bool {
    let (x, y) = match p {
        Point::Infinity => return true,
        Point::Affine(x, y) => (x, y),
    };
    let m = m as usize;
    let f = reduced_division_values(m, x, &e.a, &e.b, F::from_i64);
    if m % 2 == 0 {
        (y.clone() * f[m].clone()).is_negligible()
    } else {
        f[m].is_negligible()
    }
}

/// `[ψ_1(P) = 0, …, ψ_m(P) = 0]` from one pass of the recurrence.
pub fn psi_vanishing_table<F: Field>(e: &ShortCurve<F>, p: &Point<F>, m: u32) -> Vec<bool> {
    let (x, y) = match p {
        Point::Infinity => return vec![true; m as usize],
        Point::Affine(x, y) => (x, y),
    };
    let f = reduced_division_values(m as usize, x, &e.a, &e.b, F::from_i64);
    (1..=m as usize)
        .map(|k| {
            if k % 2 == 0 {
                (y.clone() * f[k].clone()).is_negligible()
            } else {
                f[k].is_negligible()
            }
        })
        .collect()
}

/// `f_m(X(t))` (times `Y(t)` for even m) for polynomial data over ℚ[t].
pub fn torsion_values_raw(
    a: &UPoly<Q>,
    b: &UPoly<Q>,
    x: &UPoly<Q>,
    y: &UPoly<Q>,
    m: usize,
) -> UPoly<Q> {
    let vals = reduced_division_values(m, x, a, b, |n| UPoly::constant(crate::algebra::qi(n)));
    if m % 2 == 0 {
        y * &vals[m]
    } else {
        vals[m].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;

    #[test]
    fn degrees_and_vanishing() {
        let e = ShortCurve::new(qi(0), qi(1));
        for m in 1..=10usize {
            let f = reduced_division_polynomial(&e, m);
            let expect = if m % 2 == 1 {
                (m * m - 1) / 2
            } else {
                (m * m - 4) / 2
            };
            assert_eq!(f.degree(), Some(expect), "m = {m}");
        }
        let p = Point::Affine(qi(2), qi(3));
        for m in 1..=10u32 {
            assert_eq!(psi_vanishes(&e, &p, m), m % 6 == 0, "m = {m}");
        }
        // 2-torsion point (−1, 0)
        let t2 = Point::Affine(qi(-1), qi(0));
        assert!(psi_vanishes(&e, &t2, 2) && !psi_vanishes(&e, &t2, 3));
    }
}
