use std::sync::Arc;

use serde::Serialize;

use super::point::{intersection_quadratic, line_point, DoubleFibration};
use crate::algebra::factor::irreducible_factors;
use crate::algebra::field::q_to_f64;
use crate::algebra::{AlgebraicNumber, ComplexApprox, Ext, Field, UPoly, Q};
use crate::error::{Error, Result};
use crate::surface::{Axis, Chart};

/// Intersection count of one `f₂`-fiber with the singular `f₁`-fibers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BezoutReport {
    /// The `f₂`-parameter `s`, as a fraction.
    pub s: String,
    /// `#Sing₁`.
    pub n_singular: usize,
    /// Intersection points with multiplicity, away from the zero point of the fiber.
    pub count: usize,
    /// `9·#Sing₁`.
    pub bound: usize,
    pub pass: bool,
    /// Degree in `w = u/v` of the elimination polynomial.
    pub elimination_degree: usize,
    /// Roots of the homogeneous elimination form at `v = 0`.
    pub at_infinity: usize,
    /// Distinct finite roots of the elimination polynomial.
    pub distinct: usize,
    /// Points recomputed numerically and found on the surface and on both fibers.
    pub numeric_verified: usize,
}

/// `g(w, 1; t)` for `t` the generator of `ℚ[t]/(φ)`.
fn quadratic_mod(f: &crate::algebra::MultiPoly<Q>, s: &Q, phi: &Arc<UPoly<Q>>) -> [Ext<Q>; 3] {
    let t = Ext::generator(phi);
    let (s, one) = (Ext::from_q(s), Ext::<Q>::one());
    intersection_quadratic(f, (&s, &one), (&t, &one))
}

/// Counts the points where the fiber `f₂ = s` meets the singular fibers of
/// `f₁`, with multiplicity, and compares the total with `9·#Sing₁`.
///
/// Each singular plane `f₁ = t_k` cuts the residual cubic in its zero point
/// and the two roots of a binary quadratic; the roots are counted, and
/// their total is checked against the elimination form
/// `Res_t(Δ₁(t), g(u, v; t))` of degree `2·deg Δ₁`.
pub fn bezout_fiber_check(d: &DoubleFibration, s: &Q) -> Result<BezoutReport> {
    let fam2 = d.family(Axis::L2, Chart::Finite)?;
    if fam2.discriminant().eval(s).is_zero() {
        return Err(Error::SingularFiber(format!("f₂ = {s} is a singular fiber")));
    }
    let fam1 = d.family(Axis::L1, Chart::Finite)?;
    let f = d.surface().form();
    let delta = fam1.discriminant().squarefree_part().primitive();
    let deg = delta.degree().unwrap_or(0);
    let mut count = 0;
    for phi in irreducible_factors(&delta)? {
        let phi = Arc::new(phi.monic());
        let g = quadratic_mod(f, s, &phi);
        if g.iter().all(|c| c.is_zero()) {
            return Err(Error::DegenerateElimination(format!(
                "a line of the fiber over {s} lies in a singular f₁-fiber"
            )));
        }
        count += 2 * phi.degree().unwrap();
    }
    // the parameter at infinity
    let mut n_singular = deg;
    let at_inf = 24usize.saturating_sub(fam1.discriminant().degree().unwrap_or(0));
    if at_inf > 0 {
        n_singular += 1;
        let (sq, one, zero) = (s.clone(), Q::one(), Q::zero());
        let g = intersection_quadratic(f, (&sq, &one), (&one, &zero));
        if g.iter().all(|c| c.is_zero()) {
            return Err(Error::DegenerateElimination(format!(
                "a line of the fiber over {s} lies in the f₁-fiber at infinity"
            )));
        }
        count += 2;
    }
    let elim = elimination_polynomial(f, s, &delta)?;
    let elimination_degree = elim.degree().unwrap_or(0);
    let at_infinity = 2 * deg - elimination_degree;
    let distinct = elim.squarefree_part().degree().unwrap_or(0);
    let expected = 2 * deg + if at_inf > 0 { 2 } else { 0 };
    if count != expected {
        return Err(Error::InternalConsistency(format!(
            "intersection count {count} differs from the elimination degree {expected}"
        )));
    }
    let numeric_verified = verify_numeric(d, s, &delta)?;
    let bound = 9 * n_singular;
    Ok(BezoutReport {
        s: s.to_string(),
        n_singular,
        count,
        bound,
        pass: count <= bound,
        elimination_degree,
        at_infinity,
        distinct,
        numeric_verified,
    })
}

/// `E(w) = Res_t(Δ(t), g₀(t)w² + g₁(t)w + g₂(t))`, by evaluation at
/// `2·deg Δ + 1` integers and interpolation.
fn elimination_polynomial(f: &crate::algebra::MultiPoly<Q>, s: &Q, delta: &UPoly<Q>) -> Result<UPoly<Q>> {
    let deg = delta.degree().unwrap_or(0);
    let phi = Arc::new(delta.monic());
    let g = quadratic_mod(f, s, &phi);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..=(2 * deg) as i64 {
        let w = Ext::from_i64(k);
        let v = g[0].clone() * w.square() + g[1].clone() * w + g[2].clone();
        let r = if v.is_zero() { Q::zero() } else { phi.resultant(v.value())? };
        xs.push(Q::from_integer(k.into()));
        ys.push(r);
    }
    Ok(interpolate(&xs, &ys))
}

/// Newton interpolation through `(xs[i], ys[i])`.
fn interpolate(xs: &[Q], ys: &[Q]) -> UPoly<Q> {
    let n = xs.len();
    let mut c = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = (&c[i] - &c[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = UPoly::constant(c[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = UPoly::new(vec![-xs[i].clone(), Q::one()]);
        p = &(&p * &lin) + &UPoly::constant(c[i].clone());
    }
    p
}

/// Recomputes the intersection points numerically and counts those that
/// lie on the surface with `f₂ = s` and `f₁ = t_k`.
fn verify_numeric(d: &DoubleFibration, s: &Q, delta: &UPoly<Q>) -> Result<usize> {
    let f = d.surface().form();
    let sc = ComplexApprox::new(q_to_f64(s), 0.0, 0.0);
    let one = ComplexApprox::one();
    let mut ok = 0;
    for t in AlgebraicNumber::roots_of(delta, 1e-14)? {
        let tc = t.approx().with_err(0.0);
        let [g0, g1, g2] = intersection_quadratic(f, (&sc, &one), (&tc, &one));
        let sq = (g1.square() - ComplexApprox::from_i64(4) * g0.clone() * g2.clone()).sqrt();
        let Some(den) = (ComplexApprox::from_i64(2) * g0.clone()).inv() else { continue };
        for r in [sq.clone(), -sq] {
            let u = (-g1.clone() + r) * den.clone();
            let p = line_point((&sc, &one), (&tc, &one), &u, &one);
            let on_surface = d.relative_residual(&p) < 1e-9;
            // f₂ = x/y and f₁ = z/w, compared without division
            let close = |a: usize, b: usize, want: &ComplexApprox| {
                let lhs = p[a].clone() - want.clone() * p[b].clone();
                lhs.abs() < 1e-8 * (p[a].abs() + want.abs() * p[b].abs())
            };
            if on_surface && close(0, 1, &sc) && close(2, 3, &tc) {
                ok += 1;
            }
        }
    }
    Ok(ok)
}
