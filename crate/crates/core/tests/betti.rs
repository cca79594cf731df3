mod common;

use common::{sample, torsion_multiples};
use fiberlab::algebra::field::q_to_f64;
use fiberlab::algebra::{ComplexApprox, Q};
use fiberlab::betti::{
    betti_coords, detect_rational, elliptic_log, exp_map, jacobian_rank, period_lattice, BettiPoint, PeriodLattice,
};
use fiberlab::surface::{Axis, Chart};
use fiberlab::weierstrass::{Point, ShortCurve};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn complex_point(p: &Point<Q>) -> (C, C) {
    match p {
        Point::Affine(x, y) => (C::new(q_to_f64(x), 0.0), C::new(q_to_f64(y), 0.0)),
        Point::Infinity => unreachable!(),
    }
}

fn lattice_of(e: &ShortCurve<Q>) -> (C, PeriodLattice) {
    let a = C::new(q_to_f64(&e.a), 0.0);
    (a, period_lattice(a, C::new(q_to_f64(&e.b), 0.0)).unwrap())
}

/// Distance from `z` to the nearest lattice point, relative to the lattice.
fn lattice_distance(z: C, l: &PeriodLattice) -> f64 {
    l.reduce(z).norm() / l.min_length()
}

#[test]
fn torsion_points_have_rational_betti_coordinates() {
    for (e, p, n) in torsion_multiples() {
        let (a, l) = lattice_of(&e);
        let (x, y) = complex_point(&p);
        let z = elliptic_log(a, x, y, &l).unwrap();
        let b = betti_coords(&z, &l);
        let hit = detect_rational(&b, 12).unwrap_or_else(|| panic!("order {n}: no hit at {b:?}"));
        assert_eq!(hit.q, n as u64);
    }
}

#[test]
fn points_of_infinite_order_give_no_hit() {
    let e = ShortCurve::<Q>::new(Q::from_integer(0.into()), Q::from_integer(17.into()));
    let (a, l) = lattice_of(&e);
    for p in [(-2, 3), (2, 5), (8, 23), (-1, 4)] {
        let (x, y) = (C::new(p.0 as f64, 0.0), C::new(p.1 as f64, 0.0));
        let b = betti_coords(&elliptic_log(a, x, y, &l).unwrap(), &l);
        assert!(b.err < 1e-9);
        assert_eq!(detect_rational(&b, 12), None, "{p:?}");
    }
}

#[test]
fn irrational_coordinates_are_not_detected() {
    let s = 2f64.sqrt() - 1.0;
    assert_eq!(detect_rational(&BettiPoint::new(s, s, 1e-13), 50), None);
    assert_eq!(detect_rational(&BettiPoint::new(0.25, s, 1e-13), 50), None);
    let hit = detect_rational(&BettiPoint::new(0.25, 2.0 / 3.0, 1e-13), 50).unwrap();
    assert_eq!((hit.p1, hit.p2, hit.q), (3, 8, 12));
}

#[test]
fn lemniscatic_lattice_is_stable_under_i() {
    // y² = x³ − x has complex multiplication by i
    let l = period_lattice(C::new(-1.0, 0.0), C::new(0.0, 0.0)).unwrap();
    for w in [l.w1, l.w2] {
        let (m, n) = l.coords(C::i() * w);
        assert!((m - m.round()).abs() < 1e-10 && (n - n.round()).abs() < 1e-10);
    }
    // the shortest period is twice the lemniscate constant ϖ
    let varpi = 2.622_057_554_292_119_8;
    assert!((l.min_length() - 2.0 * varpi).abs() < 1e-10);
}

#[test]
fn periods_vary_continuously_along_a_path() {
    let sb = sample().section_betti(Axis::L1, Chart::Finite).unwrap();
    let mut prev = sb.eval(C::new(0.3, 0.2), None).unwrap();
    for k in 1..=200 {
        let t = C::new(0.3 + 0.002 * k as f64, 0.2 - 0.001 * k as f64);
        let s = sb.eval(t, Some(&prev.lattice)).unwrap();
        let jump = (s.lattice.w1 - prev.lattice.w1).norm().max((s.lattice.w2 - prev.lattice.w2).norm());
        assert!(jump < 0.05 * prev.lattice.min_length(), "jump {jump} at {t}");
        let (d1, d2) = (s.raw.0 - prev.raw.0, s.raw.1 - prev.raw.1);
        assert!(d1.abs().max(d2.abs()) < 0.05, "Betti jump at {t}");
        prev = s;
    }
}

#[test]
fn section_betti_map_is_a_local_submersion() {
    let sb = sample().section_betti(Axis::L1, Chart::Finite).unwrap();
    for t in [C::new(0.3, 0.2), C::new(-0.4, 0.7), C::new(0.1, -0.5)] {
        let s = sb.eval(t, None).unwrap();
        assert_eq!(jacobian_rank(&sb.jacobian(&s, 1e-6).unwrap()), 2, "at {t}");
    }
}

#[test]
fn evaluation_refuses_singular_fibers() {
    let sb = sample().section_betti(Axis::L1, Chart::Finite).unwrap();
    let t = sb.singular_parameters()[0];
    assert!(sb.eval(t, None).is_err());
}

fn curve_and_z() -> impl Strategy<Value = (C, C, f64, f64)> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -0.45..0.45f64, -0.45..0.45f64)
        .prop_map(|(ar, ai, br, bi, u, v)| (C::new(ar, ai), C::new(br, bi), u, v))
        .prop_filter("nonsingular", |(a, b, ..)| (4.0 * a * a * a + 27.0 * b * b).norm() > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exp_then_log_is_the_identity((a, b, u, v) in curve_and_z()) {
        let l = period_lattice(a, b).unwrap();
        let z = l.point(u, v);
        prop_assume!(z.norm() > 0.05 * l.min_length());
        let (x, y) = exp_map(z, &l).unwrap();
        // the image lies on the curve
        let scale = 1.0 + x.norm().powi(3);
        prop_assert!((y * y - (x * x * x + a * x + b)).norm() < 1e-8 * scale);
        let w = elliptic_log(a, x, y, &l).unwrap();
        prop_assert!(lattice_distance(w.value - z, &l) < 1e-8);
    }

    #[test]
    fn log_is_a_homomorphism((a, b, u, v) in curve_and_z(), s in -0.45..0.45f64, r in -0.45..0.45f64) {
        let l = period_lattice(a, b).unwrap();
        let (z1, z2) = (l.point(u, v), l.point(s, r));
        prop_assume!(lattice_distance(z1, &l) > 0.05 && lattice_distance(z2, &l) > 0.05);
        prop_assume!(lattice_distance(z1 + z2, &l) > 0.05 && lattice_distance(z1 - z2, &l) > 0.05);
        let e = ShortCurve::new(ComplexApprox::exact(a), ComplexApprox::exact(b));
        let pt = |z: C| {
            let (x, y) = exp_map(z, &l).unwrap();
            Point::Affine(ComplexApprox::exact(x), ComplexApprox::exact(y))
        };
        let sum = e.add(&pt(z1), &pt(z2)).unwrap();
        let Point::Affine(x, y) = sum else { panic!("sum is finite") };
        let w = elliptic_log(a, x.value, y.value, &l).unwrap();
        prop_assert!(lattice_distance(w.value - z1 - z2, &l) < 1e-6);
    }
}
