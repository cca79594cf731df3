use std::sync::Arc;

use fiberlab::algebra::factor::factor;
use fiberlab::algebra::{isolate_roots, qf, qi, Ext, Field, UPoly, Q};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(c: &[i64]) -> UPoly<Q> {
    UPoly::from_ints(c)
}

/// Determinant of the Sylvester matrix by fraction-free elimination.
fn sylvester_resultant(f: &UPoly<Q>, g: &UPoly<Q>) -> Q {
    let (m, n) = (f.deg() as usize, g.deg() as usize);
    let size = m + n;
    let mut a = vec![vec![Q::zero(); size]; size];
    for i in 0..n {
        for k in 0..=m {
            a[i][i + k] = f.coeff(m - k);
        }
    }
    for i in 0..m {
        for k in 0..=n {
            a[n + i][i + k] = g.coeff(n - k);
        }
    }
    let mut sign = Q::one();
    let mut prev = Q::one();
    for k in 0..size {
        let Some(p) = (k..size).find(|&r| !a[r][k].is_zero()) else { return Q::zero() };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
            a[i][k] = Q::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[size - 1][size - 1]
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize, h: i64) -> UPoly<Q> {
    let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-h..=h)).collect();
    while c[deg] == 0 {
        c[deg] = rng.gen_range(-h..=h);
    }
    poly(&c)
}

#[test]
fn rational_arithmetic_is_exact() {
    let third = qf(1, 3);
    let sum = &third + &third + third.clone();
    assert_eq!(sum, Q::one());
    let x = qf(-7, 12);
    assert_eq!(x.inv().unwrap() * x, Q::one());
    assert!(Q::zero().inv().is_none());
}

#[test]
fn resultant_of_two_square_roots() {
    assert_eq!(poly(&[-2, 0, 1]).resultant(&poly(&[-3, 0, 1])).unwrap(), qi(1));
}

#[test]
fn resultant_vanishes_exactly_for_common_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut shared = 0;
    for i in 0..1000 {
        let (df, dg) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let (mut f, mut g) = (random_poly(&mut rng, df, 6), random_poly(&mut rng, dg, 6));
        if i % 3 == 0 {
            let dh = rng.gen_range(1..3);
            let h = random_poly(&mut rng, dh, 4);
            f = &f * &h;
            g = &g * &h;
        }
        let r = f.resultant(&g).unwrap();
        assert_eq!(r, sylvester_resultant(&f, &g), "{f} / {g}");
        let common = f.gcd_q(&g).deg() > 0;
        shared += common as usize;
        assert_eq!(r.is_zero(), common, "{f} / {g}");
    }
    assert!(shared >= 333);
}

#[test]
fn root_multiplicities_add_up() {
    // (x² + 1)² (x − 3)³ (2x + 1)
    let f = &(&poly(&[1, 0, 1]).pow(2) * &poly(&[-3, 1]).pow(3)) * &poly(&[1, 2]);
    let roots = isolate_roots(&f, 1e-14).unwrap();
    assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<u32>(), 8);
    let triple = roots.iter().find(|r| r.multiplicity == 3).unwrap();
    assert!(triple.real && (triple.re() - 3.0).abs() < 1e-12);
    assert_eq!(roots.iter().filter(|r| r.multiplicity == 2).count(), 2);
}

/// Expands `lc · ∏ (x − cᵢ)^{mᵢ}` in floating point.
fn vieta(lc: f64, roots: &[(Complex64, u32)]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(lc, 0.0)];
    for &(z, m) in roots {
        for _ in 0..m {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * z;
            }
            c = next;
        }
    }
    c
}

#[test]
fn factors_multiply_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let f = &random_poly(&mut rng, 3, 5) * &random_poly(&mut rng, 2, 5);
        let parts = factor(&f).unwrap();
        let mut prod = UPoly::constant(f.lc());
        for (p, e) in &parts {
            assert!(p.deg() >= 1);
            prod = &prod * &p.monic().pow(*e);
        }
        assert_eq!(prod, f);
    }
}

#[test]
fn number_field_norm() {
    let m = Arc::new(poly(&[-2, 0, 1]));
    let s = Ext::generator(&m);
    let (a, b) = (qf(3, 2), qf(-5, 7));
    let x = Ext::from_q(&a) + Ext::from_q(&b) * s.clone();
    let y = Ext::from_q(&a) - Ext::from_q(&b) * s.clone();
    let norm = (&a * &a) - qi(2) * &b * &b;
    assert_eq!((x.clone() * y).as_base(), Some(norm));
    assert_eq!((x.inv().unwrap() * x).as_base(), Some(Q::one()));
    assert_eq!((s.clone() * s).as_base(), Some(qi(2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_are_complete(c in prop::collection::vec(-20i64..=20, 2..9), lead in 1i64..=5) {
        let mut c = c;
        c.push(lead);
        let f = poly(&c);
        let roots = isolate_roots(&f, 1e-13).unwrap();
        prop_assert_eq!(roots.iter().map(|r| r.multiplicity as usize).sum::<usize>(), f.deg() as usize);
        for (i, a) in roots.iter().enumerate() {
            for b in &roots[i + 1..] {
                let d = Complex64::new(a.re() - b.re(), a.im() - b.im()).norm();
                prop_assert!(d > a.radius + b.radius);
            }
        }
        let zs: Vec<(Complex64, u32)> = roots.iter().map(|r| (Complex64::new(r.re(), r.im()), r.multiplicity)).collect();
        let expanded = vieta(lead as f64, &zs);
        let scale = c.iter().map(|&x| x.abs() as f64).fold(1.0, f64::max);
        for (k, &ck) in c.iter().enumerate() {
            prop_assert!((expanded[k] - Complex64::new(ck as f64, 0.0)).norm() < 1e-10 * scale * 2f64.powi(c.len() as i32),
                "coefficient {} of {:?}", k, c);
        }
    }

    #[test]
    fn ring_laws_hold_for_rationals(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let (x, y) = (qf(a, b), qf(c, d));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!((&x + &y) - y.clone(), x.clone());
        if !y.is_zero() {
            prop_assert_eq!((&x / &y) * y.clone(), x);
        }
    }
}
