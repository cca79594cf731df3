mod common;

use common::sample;
use fiberlab::algebra::{qf, Field, Q};
use fiberlab::surface::{build_three_line_quartic, sample_surface, Axis, Chart, QuarticSurface};
use proptest::prelude::*;

const CHARTS: [(Axis, Chart); 4] =
    [(Axis::L1, Chart::Finite), (Axis::L1, Chart::Infinity), (Axis::L2, Chart::Finite), (Axis::L2, Chart::Infinity)];

fn rational() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(a, b)| qf(a, b))
}

#[test]
fn lines_lie_on_the_surface() {
    let s = sample_surface().unwrap();
    assert!(s.pairwise_skew());
    for l in s.lines() {
        for (u, v) in [(1, 0), (0, 1), (3, -2), (5, 7)] {
            assert!(s.contains(&l.point(&qf(u, 1), &qf(v, 1))), "{}", l.name);
        }
    }
}

#[test]
fn sample_has_24_singular_fibers_per_pencil() {
    let rep = sample().surface().smoothness().unwrap();
    assert!(rep.is_smooth());
    assert_eq!(rep.singular_fiber_counts, [24, 24]);
}

#[test]
fn text_round_trip_for_several_seeds() {
    for seed in 1..=3 {
        let s = build_three_line_quartic(seed, 2).unwrap();
        let back = QuarticSurface::from_text(&s.to_text()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.id(), s.id());
    }
}

#[test]
fn malformed_text_is_rejected() {
    let text = sample_surface().unwrap().to_text();
    assert!(QuarticSurface::from_text(&text.replacen("coeff", "cof", 1)).is_err());
    let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
    assert!(QuarticSurface::from_text(&truncated).is_err());
}

#[test]
fn surface_without_the_lines_is_rejected() {
    let mut c = sample_surface().unwrap().coefficients();
    // x⁴ does not vanish on L1
    c[0] = c[0].clone() + Q::one();
    assert!(QuarticSurface::from_coefficients(&c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// The quartic restricted to the plane of parameter `t` splits off the
    /// axis line: `F(to_space(t, p)) = ℓ(p)·C_t(p)` for a coordinate `ℓ`.
    #[test]
    fn quartic_factors_through_the_residual_cubic(t in rational(), p in prop::array::uniform3(-9i64..=9)) {
        let s = sample().surface();
        let p = p.map(|a| qf(a, 1));
        for (axis, chart) in CHARTS {
            let fam = s.residual_cubic(axis, chart).unwrap();
            let c = fam.at(&t);
            prop_assert_eq!(c.total_degree(), Some(3));
            prop_assert!(c.is_homogeneous());
            let lhs = s.form().eval(&fam.to_space(&t, &p));
            let cv = c.eval(&p);
            prop_assert!(p.iter().any(|l| lhs == l * &cv));
        }
    }

    #[test]
    fn marked_points_lie_on_every_fiber(t in rational()) {
        let s = sample().surface();
        for (axis, chart) in CHARTS {
            let fam = s.residual_cubic(axis, chart).unwrap();
            let c = fam.at(&t);
            prop_assert!(c.eval(&fam.zero_point::<Q>()).is_zero());
            prop_assert!(c.eval(&fam.section_point(&t)).is_zero());
            // and on the surface
            prop_assert!(s.contains(&fam.to_space(&t, &fam.section_point(&t))));
        }
    }

    #[test]
    fn trisection_has_three_points(t in rational()) {
        let s = sample().surface();
        for (axis, chart) in CHARTS {
            let fam = s.residual_cubic(axis, chart).unwrap();
            if let Ok(tri) = fam.trisection_points(&t) {
                prop_assert_eq!(tri.total_multiplicity(), 3);
            }
        }
    }

    #[test]
    fn chart_coordinates_round_trip(t in rational(), p in prop::array::uniform3(1i64..=9)) {
        let s = sample().surface();
        let p = p.map(|a| qf(a, 1));
        for (axis, chart) in CHARTS {
            let fam = s.residual_cubic(axis, chart).unwrap();
            let x = fam.to_space(&t, &p);
            let (t2, p2) = fam.from_space(&x).unwrap();
            prop_assert_eq!(&t2, &t);
            prop_assert_eq!(fam.to_space(&t2, &p2), x);
        }
    }
}
