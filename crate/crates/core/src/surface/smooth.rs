//! Smoothness of the quartic.
//!
//! Write `F = z·A(x,y) + w·B(x,y) + (terms of degree ≥ 2 in z, w)`. Then `S`
//! is smooth along `L1` iff the binary cubics `A`, `B` have no common zero,
//! i.e. their resultant is nonzero. Away from `L1` the map `t = z/w` is a
//! morphism, and a point of `C_{t0}` is singular on `S` iff it is a singular
//! point of the plane cubic where `∂C/∂t` also vanishes. At a node with
//! `∂C/∂t ≠ 0` the discriminant of the pencil has a simple zero, and any
//! worse fiber singularity gives a multiple zero. So `S` is smooth iff the
//! resultants for `L1` are nonzero and the discriminant `D(t)` of the `L1`
//! pencil, counted on both charts, has 24 simple zeros. The same test is
//! run for `L2` as a redundant check.
//!
//! The discriminant used is `4I³ − J²` for the invariants of the binary
//! quartic `Q² − 4LK` obtained by projecting `C_t` from its zero point.
//!
//! As a numeric cross-check every node of every singular fiber is located
//! and `∂C/∂t` is evaluated there.

use num_complex::Complex64;

use super::pencil::{Axis, Chart, ResidualCubicFamily};
use super::QuarticSurface;
use crate::algebra::numeric::roots_c64;
use crate::algebra::roots::{isolate_roots_with, RootOptions};
use crate::algebra::{linalg, ComplexApprox, Field, UPoly, Q};
use crate::error::Result;

/// Relative size below which `∂C/∂t` at a node counts as zero.
const NODE_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SmoothnessReport {
    /// Resultants of the axis forms are nonzero for `L1` and `L2`.
    pub along_axes: bool,
    /// Both discriminants are square-free with 24 zeros over both charts.
    pub discriminants_ok: bool,
    /// Every node found numerically has `∂C/∂t` away from 0.
    pub numeric_ok: bool,
    /// Number of singular fibers per axis (`L1`, `L2`), including infinity.
    pub singular_fiber_counts: [usize; 2],
    /// Smallest relative `|∂C/∂t|` seen at a node.
    pub min_node_derivative: f64,
}

impl SmoothnessReport {
    /// Both the exact criterion and the numeric cross-check pass.
    pub fn is_smooth(&self) -> bool {
        self.along_axes && self.discriminants_ok && self.numeric_ok
    }
}

/// The binary cubics `(A, B)` with `F ≡ u·A + v·B` modulo the square of the
/// ideal of the axis, where `(u, v)` are the axis' defining coordinates.
/// Coefficients run over `s³, s²r, sr², r³` in the remaining coordinates.
pub fn axis_forms(s: &QuarticSurface, axis: Axis) -> ([Q; 4], [Q; 4]) {
    let (uv, rest): ([usize; 2], [usize; 2]) = match axis {
        Axis::L1 => ([2, 3], [0, 1]),
        Axis::L2 => ([0, 1], [2, 3]),
    };
    let pick = |lin: usize| -> [Q; 4] {
        std::array::from_fn(|k| {
            let mut e = [0u32; 4];
            e[lin] = 1;
            e[rest[0]] = 3 - k as u32;
            e[rest[1]] = k as u32;
            s.form().coeff(&e)
        })
    };
    (pick(uv[0]), pick(uv[1]))
}

/// Resultant of two binary forms of degree 3 (coefficients from the top
/// power of the first variable down), as the Sylvester determinant.
pub fn binary_cubic_resultant(a: &[Q; 4], b: &[Q; 4]) -> Q {
    let zero = <Q as Field>::zero;
    let mut m = vec![vec![zero(); 6]; 6];
    for r in 0..3 {
        for k in 0..4 {
            m[r][r + k] = a[k].clone();
            m[r + 3][r + k] = b[k].clone();
        }
    }
    linalg::det(&m)
}

/// Coefficients over `ℚ[t]` of `C = c²·L + c·Q + K` around the zero point
/// (`c` the zero-point coordinate, `(a, b)` the other two in order):
/// returns `(L, Q, K)` as `[a, b]`, `[a², ab, b²]`, `[a³, a²b, ab², b³]`.
pub fn zero_point_expansion(
    fam: &ResidualCubicFamily,
) -> ([UPoly<Q>; 2], [UPoly<Q>; 3], [UPoly<Q>; 4]) {
    let cp = fam.coefficient_polys();
    let c = fam.zero_slot();
    let ab: Vec<usize> = (0..3).filter(|&i| i != c).collect();
    let get = |ea: u32, eb: u32, ec: u32| {
        let mut e = [0u32; 3];
        e[ab[0]] = ea;
        e[ab[1]] = eb;
        e[c] = ec;
        cp.get(&e).cloned().unwrap_or_else(UPoly::zero)
    };
    (
        [get(1, 0, 2), get(0, 1, 2)],
        [get(2, 0, 1), get(1, 1, 1), get(0, 2, 1)],
        [get(3, 0, 0), get(2, 1, 0), get(1, 2, 0), get(0, 3, 0)],
    )
}

/// The binary quartic `Q² − 4LK` over `ℚ[t]`, coefficients of
/// `a⁴, a³b, a²b², ab³, b⁴`.
pub fn projected_quartic(fam: &ResidualCubicFamily) -> [UPoly<Q>; 5] {
    let ([l1, l2], [qa, qb, qc], [ka, kb, kc, kd]) = zero_point_expansion(fam);
    let two = UPoly::constant(Q::from_integer(2.into()));
    let four = UPoly::constant(Q::from_integer(4.into()));
    [
        &(&qa * &qa) - &(&four * &(&l1 * &ka)),
        &(&two * &(&qa * &qb)) - &(&four * &(&(&l1 * &kb) + &(&l2 * &ka))),
        &(&(&qb * &qb) + &(&two * &(&qa * &qc))) - &(&four * &(&(&l1 * &kc) + &(&l2 * &kb))),
        &(&two * &(&qb * &qc)) - &(&four * &(&(&l1 * &kd) + &(&l2 * &kc))),
        &(&qc * &qc) - &(&four * &(&l2 * &kd)),
    ]
}

/// `(I, J)` of a binary quartic over `ℚ[t]`.
pub fn quartic_invariants(g: &[UPoly<Q>; 5]) -> (UPoly<Q>, UPoly<Q>) {
    let k = |n: i64| UPoly::constant(Q::from_integer(n.into()));
    let [a, b, c, d, e] = g;
    let i = &(&(&k(12) * &(a * e)) - &(&k(3) * &(b * d))) + &(c * c);
    let j = &(&(&(&k(72) * &(&(a * c) * e)) + &(&k(9) * &(&(b * c) * d)))
        - &(&k(27) * &(&(a * d) * d)))
        - &(&(&k(27) * &(&(e * b) * b)) + &(&k(2) * &(&(c * c) * c)));
    (i, j)
}

/// `D(t) = 4I³ − J²` of the pencil in the given chart.
pub fn discriminant_polynomial(fam: &ResidualCubicFamily) -> UPoly<Q> {
    let (i, j) = quartic_invariants(&projected_quartic(fam));
    let four = UPoly::constant(Q::from_integer(4.into()));
    &(&four * &(&(&i * &i) * &i)) - &(&j * &j)
}

fn order_at_zero(p: &UPoly<Q>) -> usize {
    p.coeffs().iter().take_while(|c| Field::is_zero(*c)).count()
}

pub(super) fn check(s: &QuarticSurface) -> Result<SmoothnessReport> {
    let mut along_axes = true;
    let mut discriminants_ok = true;
    let mut numeric_ok = true;
    let mut counts = [0usize; 2];
    let mut min_rel = f64::INFINITY;
    for (ai, axis) in [Axis::L1, Axis::L2].into_iter().enumerate() {
        let (a, b) = axis_forms(s, axis);
        if Field::is_zero(&binary_cubic_resultant(&a, &b)) {
            along_axes = false;
            continue;
        }
        let fin = ResidualCubicFamily::new(s, axis, Chart::Finite)?;
        let inf = ResidualCubicFamily::new(s, axis, Chart::Infinity)?;
        let d = discriminant_polynomial(&fin);
        let d_inf = discriminant_polynomial(&inf);
        if d.is_zero() || d_inf.is_zero() {
            discriminants_ok = false;
            continue;
        }
        let n_fin = d.degree().unwrap();
        let n_inf = order_at_zero(&d_inf);
        let squarefree = d.squarefree_part().degree() == d.degree();
        if !squarefree || n_inf > 1 || n_fin + n_inf != 24 {
            discriminants_ok = false;
            continue;
        }
        counts[ai] = n_fin + n_inf;
        let roots = isolate_roots_with(
            &d,
            RootOptions {
                precision: 1e-12,
                ..Default::default()
            },
        )?;
        let mut params: Vec<(&ResidualCubicFamily, Complex64)> = roots
            .iter()
            .map(|r| (&fin, Complex64::new(r.re(), r.im())))
            .collect();
        if n_inf == 1 {
            params.push((&inf, Complex64::new(0.0, 0.0)));
        }
        for (fam, t0) in params {
            match node_derivative(fam, t0) {
                Some(rel) => {
                    min_rel = min_rel.min(rel);
                    if rel < NODE_TOL {
                        numeric_ok = false;
                    }
                }
                None => numeric_ok = false,
            }
        }
    }
    Ok(SmoothnessReport {
        along_axes,
        discriminants_ok,
        numeric_ok,
        singular_fiber_counts: counts,
        min_node_derivative: min_rel,
    })
}

fn chordal(a: Option<Complex64>, b: Option<Complex64>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(z), None) | (None, Some(z)) => 1.0 / (1.0 + z.norm_sqr()).sqrt(),
        (Some(z), Some(w)) => (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt(),
    }
}

/// Locates the node of `C_{t0}` and returns `|∂C/∂t|` there relative to the
/// size of `∂C/∂t`'s coefficients; `None` if no node could be located.
pub fn node_derivative(fam: &ResidualCubicFamily, t0: Complex64) -> Option<f64> {
    let t = ComplexApprox::exact(t0);
    let c = fam.at(&t);
    let dt = fam.t_derivative_at(&t);
    let zs = fam.zero_slot();
    let ab: Vec<usize> = (0..3).filter(|&i| i != zs).collect();
    let coeff = |ea: u32, eb: u32, ec: u32| {
        let mut e = [0u32; 3];
        e[ab[0]] = ea;
        e[ab[1]] = eb;
        e[zs] = ec;
        c.coeff(&e).value
    };
    let l = [coeff(1, 0, 2), coeff(0, 1, 2)];
    let q = [coeff(2, 0, 1), coeff(1, 1, 1), coeff(0, 2, 1)];
    let k = [
        coeff(3, 0, 0),
        coeff(2, 1, 0),
        coeff(1, 2, 0),
        coeff(0, 3, 0),
    ];
    let scale = l
        .iter()
        .chain(&q)
        .chain(&k)
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let node: [Complex64; 3] = if l.iter().all(|z| z.norm() < 1e-9 * scale) {
        // singular at the zero point itself
        let mut p = [Complex64::new(0.0, 0.0); 3];
        p[zs] = Complex64::new(1.0, 0.0);
        p
    } else {
        let g = [
            q[0] * q[0] - 4.0 * l[0] * k[0],
            2.0 * q[0] * q[1] - 4.0 * (l[0] * k[1] + l[1] * k[0]),
            q[1] * q[1] + 2.0 * q[0] * q[2] - 4.0 * (l[0] * k[2] + l[1] * k[1]),
            2.0 * q[1] * q[2] - 4.0 * (l[0] * k[3] + l[1] * k[2]),
            q[2] * q[2] - 4.0 * l[1] * k[3],
        ];
        let gs = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
        // roots in a/b; small leading terms mean roots near b = 0
        let mut lead = 4usize;
        while lead > 0 && g[4 - lead].norm() < 1e-12 * gs {
            lead -= 1;
        }
        let coeffs: Vec<Complex64> = (0..=lead).map(|i| g[4 - i]).collect();
        let mut roots: Vec<Option<Complex64>> = roots_c64(&coeffs).into_iter().map(Some).collect();
        roots.resize(4, None);
        let mut best = (f64::INFINITY, 0, 1);
        for i in 0..4 {
            for j in (i + 1)..4 {
                let d = chordal(roots[i], roots[j]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        let (ar, br) = match (roots[best.1], roots[best.2]) {
            (Some(u), Some(v)) => ((u + v) / 2.0, Complex64::new(1.0, 0.0)),
            _ => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        };
        let lv = l[0] * ar + l[1] * br;
        let qv = q[0] * ar * ar + q[1] * ar * br + q[2] * br * br;
        if lv.norm() < 1e-12 * scale {
            return None;
        }
        let cv = -qv / (2.0 * lv);
        let mut p = [Complex64::new(0.0, 0.0); 3];
        p[ab[0]] = ar;
        p[ab[1]] = br;
        p[zs] = cv;
        p
    };
    let norm = node.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let p: Vec<ComplexApprox> = node
        .iter()
        .map(|z| ComplexApprox::exact(z / norm))
        .collect();
    // the node must actually be singular on the cubic
    let grad_max = (0..3)
        .map(|i| c.partial(i).eval(&p).value.norm())
        .fold(0.0, f64::max);
    if grad_max > 1e-5 * scale {
        return None;
    }
    let dscale = dt
        .terms()
        .map(|(_, v)| v.value.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    Some(dt.eval(&p).value.norm() / dscale)
}
