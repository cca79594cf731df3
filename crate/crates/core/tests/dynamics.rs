mod common;

use common::{sample, ten_fibers};
use fiberlab::algebra::{qf, qi, ComplexApprox, Q};
use fiberlab::dynamics::{
    bezout_fiber_check, conjugate_control_experiment, find_delta, finite_orbit_certificate, orbit_grid,
    same_point_exact, torsion_parameters, CertificateOutcome, ConjugateControl, FiberParam, OrbitGuards,
    OrbitStatus, SurfacePoint,
};
use fiberlab::heights::canonical_height;
use fiberlab::surface::{Axis, Chart};
use num_complex::Complex64;
use proptest::prelude::*;

fn rational_points() -> Vec<SurfacePoint<Q>> {
    ten_fibers().iter().flat_map(|f| f.surface_points.iter().take(2).cloned()).collect()
}

#[test]
fn translations_preserve_their_fibers() {
    let d = sample();
    let mut checked = 0;
    for p in rational_points() {
        for axis in [Axis::L1, Axis::L2] {
            let q = d.translate(&p, axis).unwrap();
            assert!(d.surface().contains(&q.coords));
            // the image may be a base point of the pencil, where the parameter is undefined
            let Some(b) = q.param(axis) else { continue };
            let (a, b) = (p.param(axis).unwrap().projective(), b.projective());
            assert_eq!(&a.0 * &b.1, &a.1 * &b.0, "{axis:?}");
            checked += 1;
        }
    }
    assert!(checked >= 30);
}

#[test]
fn translation_adds_the_section_on_the_fiber() {
    let d = sample();
    let mut checked = 0;
    for p in rational_points() {
        for axis in [Axis::L1, Axis::L2] {
            let (model, pt) = d.to_curve(&p, axis).unwrap();
            let q = d.translate(&p, axis).unwrap();
            let Ok((model2, qt)) = d.to_curve(&q, axis) else { continue };
            checked += 1;
            assert_eq!(model.curve, model2.curve);
            assert_eq!(qt, model.curve.add(&pt, &model.section).unwrap());
        }
    }
    assert!(checked >= 30);
}

#[test]
fn powers_compose_and_invert() {
    let d = sample();
    let p = &rational_points()[0];
    for axis in [Axis::L1, Axis::L2] {
        let once = d.translate(p, axis).unwrap();
        let twice = d.translate(&once, axis).unwrap();
        assert!(same_point_exact(&twice.coords, &d.translate_by(p, axis, 2).unwrap().coords));
        let back = d.translate_by(&once, axis, -1).unwrap();
        assert!(same_point_exact(&back.coords, &p.coords));
    }
}

#[test]
fn translating_the_zero_point_gives_the_section() {
    let d = sample();
    for s in [qi(2), qf(1, 3), qf(-5, 2)] {
        for axis in [Axis::L1, Axis::L2] {
            let t = FiberParam { chart: Chart::Finite, value: s.clone() };
            let zero = d.zero_point(axis, &t).unwrap();
            let sec = d.section_point(axis, &t).unwrap();
            let moved = d.translate(&zero, axis).unwrap();
            assert!(same_point_exact(&moved.coords, &sec.coords), "{axis:?} at {s}");
        }
    }
}

/// `ĥ(P + kσ)` is quadratic in `k` with second difference `2ĥ(σ)`.
#[test]
fn heights_grow_quadratically_along_rays() {
    let d = sample();
    for p in rational_points().iter().take(3) {
        let (model, _) = d.to_curve(p, Axis::L1).unwrap();
        let hs = canonical_height(&model.curve, &model.section, 1e-9).unwrap().value;
        assert!(hs > 0.0);
        let mut q = p.clone();
        let mut h = Vec::new();
        for _ in 0..4 {
            let (_, pt) = d.to_curve(&q, Axis::L1).unwrap();
            h.push(canonical_height(&model.curve, &pt, 1e-9).unwrap().value);
            q = d.translate(&q, Axis::L1).unwrap();
        }
        for w in h.windows(3) {
            assert!((w[2] - 2.0 * w[1] + w[0] - 2.0 * hs).abs() < 1e-7);
        }
    }
}

#[test]
fn rational_orbits_grow_without_bound() {
    let d = sample();
    let p = &rational_points()[0];
    let rec = orbit_grid(d, p, 3, 2, &OrbitGuards::default());
    assert_eq!(rec.entries.len(), 12);
    assert_eq!(rec.distinct, 12);
    assert_ne!(rec.status, OrbitStatus::Finite);
    let ray: Vec<f64> = rec.entries.iter().filter(|e| e.r2 == 0).map(|e| e.height).collect();
    assert!(ray.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn certificate_is_undefined_on_the_axis_lines() {
    let d = sample();
    let p = d.point([qi(1), qi(2), qi(0), qi(0)]).unwrap();
    let o = finite_orbit_certificate(d, &p, 4, 4).unwrap();
    assert!(matches!(o, CertificateOutcome::Undefined { .. }), "{}", o.kind());
}

#[test]
fn certificate_rejects_rational_points() {
    let d = sample();
    for p in rational_points().iter().take(4) {
        let o = finite_orbit_certificate(d, p, 4, 4).unwrap();
        assert!(matches!(o, CertificateOutcome::Rejected { .. }), "{}", o.kind());
    }
}

#[test]
fn bezout_count_for_a_rational_fiber() {
    let r = bezout_fiber_check(sample(), &qf(1, 3)).unwrap();
    assert_eq!(r.n_singular, 24);
    assert_eq!(r.bound, 9 * 24);
    assert!(r.pass && r.count <= r.bound);
    assert_eq!(r.numeric_verified, r.distinct);
}

#[test]
fn conjugate_distances_for_small_orders() {
    let d = sample();
    let params = torsion_parameters(d, Axis::L2, 3, 1e-14).unwrap();
    assert!(!params.is_empty());
    for tp in &params {
        let c = conjugate_control_experiment(d, tp, &[]).unwrap();
        assert_eq!(c.distances.len(), c.degree);
        assert!(c.distances.iter().all(|&x| x > 0.0));
        let s = find_delta(&c, 0.05, 0.75, 30).unwrap();
        assert!(s.fraction >= 0.75);
        assert!(s.delta <= c.critical_delta(0.75) * (1.0 + 1e-12));
    }
}

#[test]
fn delta_search_on_a_known_distribution() {
    let c = ConjugateControl { order: 3, degree: 4, minpoly: String::new(), distances: vec![0.001, 0.01, 0.02, 0.3] };
    assert_eq!(c.critical_delta(0.75), 0.01);
    let s = find_delta(&c, 0.05, 0.75, 40).unwrap();
    assert!((s.delta - 0.01).abs() < 1e-12);
    assert_eq!(s.halvings, 3);
    assert!(find_delta(&c, 0.0, 0.75, 4).is_err());
}

#[test]
fn exact_and_numeric_translations_agree() {
    let d = sample();
    for p in rational_points().iter().take(4) {
        let c = p.coords.clone().map(|x| ComplexApprox::exact(Complex64::new(fiberlab::algebra::field::q_to_f64(&x), 0.0)));
        let pn = d.point(c).unwrap();
        for axis in [Axis::L1, Axis::L2] {
            let exact = d.translate(p, axis).unwrap();
            let num = d.translate(&pn, axis).unwrap();
            let e: [ComplexApprox; 4] =
                exact.coords.clone().map(|x| ComplexApprox::exact(Complex64::new(fiberlab::algebra::field::q_to_f64(&x), 0.0)));
            assert!(fiberlab::dynamics::projective_distance(&e, &num.coords) < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn orbit_entries_stay_on_the_surface(i in 0usize..20, r1 in 0u32..3, r2 in 0u32..3) {
        let d = sample();
        let pts = rational_points();
        let p = &pts[i % pts.len()];
        let rec = orbit_grid(d, p, r1, r2, &OrbitGuards::default());
        let steps = std::iter::repeat(Axis::L2).take(r2 as usize).chain(std::iter::repeat(Axis::L1).take(r1 as usize));
        let q = steps.fold(Ok(p.clone()), |q, axis| q.and_then(|q| d.translate(&q, axis)));
        // the grid walks the same path, so an undefined step must trip its guard
        let Ok(q) = q else {
            prop_assert!(rec.guard.is_some());
            prop_assert!(!rec.entries.iter().any(|e| e.r1 == r1 && e.r2 == r2));
            return Ok(());
        };
        prop_assert!(d.surface().contains(&q.coords));
        // the entry is missing only if a guard tripped or a ray closed up first
        let Some(last) = rec.entries.iter().find(|e| e.r1 == r1 && e.r2 == r2) else {
            let closed_column = rec.column_periods.get(r2 as usize).is_some_and(|p| p.is_some_and(|n| n <= r1));
            let closed_row = rec.t2_period.is_some_and(|n| n <= r2);
            prop_assert!(rec.guard.is_some() || closed_column || closed_row);
            return Ok(());
        };
        let want = d.point(q.coords.clone()).unwrap();
        let got: Vec<f64> = last.point.coords.iter().map(|c| c.0).collect();
        let want: Vec<f64> = want.coords.iter().map(fiberlab::algebra::field::q_to_f64).collect();
        let scale = want.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for k in 0..4 {
            prop_assert!((got[k] - want[k]).abs() <= 1e-12 * scale);
        }
    }
}

