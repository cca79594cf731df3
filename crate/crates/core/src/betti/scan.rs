//! The Betti map `t ↦ β_σ(t)` of a section over the base, with period
//! continuation, scans, local inversion and searches for rational values.

use num_complex::Complex64;
use serde::Serialize;

use super::coords::{betti_coords, detect_rational, BettiPoint, RationalHit};
use super::lattice::{
    elliptic_log, period_lattice_with_margin, PeriodLattice, DEFAULT_DISCRIMINANT_MARGIN,
};
use crate::algebra::field::q_to_f64;
use crate::algebra::numeric::horner;
use crate::algebra::{ComplexApprox, UPoly, Q};
use crate::error::{Error, Result};
use crate::weierstrass::WeierstrassFamily;

type C = Complex64;

fn to_c(p: &UPoly<Q>) -> Vec<C> {
    p.coeffs()
        .iter()
        .map(|c| C::new(q_to_f64(c), 0.0))
        .collect()
}

/// A section of a Weierstrass family, evaluated numerically.
#[derive(Clone, Debug)]
pub struct SectionBetti {
    a: Vec<C>,
    b: Vec<C>,
    xn: Vec<C>,
    xd: Vec<C>,
    yn: Vec<C>,
    yd: Vec<C>,
    singular: Vec<C>,
    /// Distance in `t` below which a parameter counts as a singular fiber.
    pub margin: f64,
    /// Relative discriminant threshold passed to the lattice computation.
    pub disc_margin: f64,
}

/// One evaluation of the Betti map.
#[derive(Clone, Copy, Debug)]
pub struct BettiSample {
    pub t: C,
    pub lattice: PeriodLattice,
    pub log: ComplexApprox,
    pub betti: BettiPoint,
    /// Unreduced coordinates in the (possibly continued) basis.
    pub raw: (f64, f64),
}

impl SectionBetti {
    pub fn new(family: &WeierstrassFamily, singular: Vec<C>) -> Self {
        SectionBetti {
            a: to_c(family.a()),
            b: to_c(family.b()),
            xn: to_c(family.section_x().num()),
            xd: to_c(family.section_x().den()),
            yn: to_c(family.section_y().num()),
            yd: to_c(family.section_y().den()),
            singular,
            margin: 1e-4,
            disc_margin: DEFAULT_DISCRIMINANT_MARGIN,
        }
    }

    /// Builds the evaluator with the singular parameters isolated from the
    /// family's discriminant.
    pub fn from_family(family: &WeierstrassFamily) -> Result<Self> {
        let sing = family.singular_fibers(1e-10)?;
        Ok(Self::new(
            family,
            sing.finite.iter().map(|s| s.approx().value).collect(),
        ))
    }

    pub fn singular_parameters(&self) -> &[C] {
        &self.singular
    }

    pub fn distance_to_singular(&self, t: C) -> f64 {
        self.singular
            .iter()
            .map(|s| (s - t).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn curve(&self, t: C) -> (C, C) {
        (horner(&self.a, t), horner(&self.b, t))
    }

    /// `σ(t)`, or `None` at a pole (the zero of the group).
    pub fn section(&self, t: C) -> Option<(C, C)> {
        let (xd, yd) = (horner(&self.xd, t), horner(&self.yd, t));
        let xn = horner(&self.xn, t);
        if xd.norm() <= 1e-14 * xn.norm() {
            return None;
        }
        Some((xn / xd, horner(&self.yn, t) / yd))
    }

    /// `β_σ(t)`; with `reference`, the lattice basis is continued from it.
    pub fn eval(&self, t: C, reference: Option<&PeriodLattice>) -> Result<BettiSample> {
        if self.distance_to_singular(t) < self.margin {
            return Err(Error::SingularFiber(format!(
                "parameter {t} within {:e} of a singular fiber",
                self.margin
            )));
        }
        let (a, b) = self.curve(t);
        let mut lattice = period_lattice_with_margin(a, b, self.disc_margin)?;
        if let Some(r) = reference {
            lattice = lattice.aligned_to(r).ok_or(Error::BranchTracking {
                step: 0,
                hint: 0.5 * (t.norm() + 1.0),
            })?;
        }
        let log = match self.section(t) {
            None => ComplexApprox::new(0.0, 0.0, 0.0),
            Some((x, y)) => elliptic_log(a, x, y, &lattice)?,
        };
        let raw = lattice.coords(log.value);
        let betti = betti_coords(&log, &lattice);
        Ok(BettiSample {
            t,
            lattice,
            log,
            betti,
            raw,
        })
    }

    /// Finite-difference Jacobian of `β_σ` in `(Re t, Im t)`.
    pub fn jacobian(&self, at: &BettiSample, h: f64) -> Result<[[f64; 2]; 2]> {
        let mut j = [[0.0; 2]; 2];
        for (k, dt) in [C::new(h, 0.0), C::new(0.0, h)].into_iter().enumerate() {
            let p = self.eval(at.t + dt, Some(&at.lattice))?;
            let m = self.eval(at.t - dt, Some(&at.lattice))?;
            let d = unwrap_diff(p.raw, m.raw);
            j[0][k] = d.0 / (2.0 * h);
            j[1][k] = d.1 / (2.0 * h);
        }
        Ok(j)
    }

    /// Newton iteration for `β_σ(t) ≡ v (mod ℤ²)` from `t0`.
    pub fn invert_near(
        &self,
        t0: C,
        v: (f64, f64),
        reference: Option<&PeriodLattice>,
    ) -> Option<BettiSample> {
        let mut s = self.eval(t0, reference).ok()?;
        let h = 1e-6 * (1.0 + t0.norm());
        for _ in 0..30 {
            let j = self.jacobian(&s, h).ok()?;
            let r = unwrap_diff(s.raw, v);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                return None;
            }
            let dx = (j[1][1] * r.0 - j[0][1] * r.1) / det;
            let dy = (-j[1][0] * r.0 + j[0][0] * r.1) / det;
            let step = C::new(dx, dy);
            let next = self.eval(s.t - step, Some(&s.lattice)).ok()?;
            s = next;
            if step.norm() < 1e-13 * (1.0 + s.t.norm()) {
                break;
            }
        }
        let r = unwrap_diff(s.raw, v);
        (r.0.abs().max(r.1.abs()) < 1e-9f64.max(4.0 * s.betti.err)).then_some(s)
    }
}

/// `a − b` with each coordinate reduced to `[−½, ½)`.
fn unwrap_diff(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let w = |x: f64| x - x.round();
    (w(a.0 - b.0), w(a.1 - b.1))
}

/// Rank of a 2×2 Jacobian with a relative determinant threshold.
pub fn jacobian_rank(j: &[[f64; 2]; 2]) -> usize {
    let norm = j.iter().flatten().map(|x| x * x).sum::<f64>();
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if norm == 0.0 {
        0
    } else if det.abs() > 1e-8 * norm {
        2
    } else {
        1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSample {
    pub t_re: f64,
    pub t_im: f64,
    pub betti: Option<BettiPoint>,
    pub hit: Option<RationalHit>,
    pub flags: String,
}

/// Options for [`base_betti_scan`].
#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub qmax: u64,
    /// Maximum number of bisections between two consecutive path samples.
    pub max_refine: u32,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            qmax: 6,
            max_refine: 12,
        }
    }
}

/// Evaluates `β_σ` along a path, continuing the period basis between
/// consecutive samples (bisecting when the basis would jump). Samples near
/// singular fibers are flagged and restart the continuation.
pub fn base_betti_scan(
    sb: &SectionBetti,
    path: &[C],
    opts: ScanOptions,
) -> Result<Vec<ScanSample>> {
    let mut out = Vec::with_capacity(path.len());
    let mut prev: Option<BettiSample> = None;
    for (step, &t) in path.iter().enumerate() {
        let s = match continue_to(sb, prev.as_ref(), t, opts.max_refine) {
            Ok(s) => s,
            Err(Error::SingularFiber(_)) | Err(Error::IllConditionedFiber(_)) => {
                out.push(ScanSample {
                    t_re: t.re,
                    t_im: t.im,
                    betti: None,
                    hit: None,
                    flags: "near-singular".into(),
                });
                prev = None;
                continue;
            }
            Err(Error::BranchTracking { hint, .. }) => {
                return Err(Error::BranchTracking { step, hint })
            }
            Err(e) => return Err(e),
        };
        let hit = detect_rational(&s.betti, opts.qmax);
        let flags = if prev.is_none() && step > 0 {
            "restart"
        } else {
            ""
        };
        out.push(ScanSample {
            t_re: t.re,
            t_im: t.im,
            betti: Some(s.betti),
            hit,
            flags: flags.into(),
        });
        prev = Some(s);
    }
    Ok(out)
}

fn continue_to(
    sb: &SectionBetti,
    prev: Option<&BettiSample>,
    t: C,
    depth: u32,
) -> Result<BettiSample> {
    let Some(p) = prev else {
        return sb.eval(t, None);
    };
    match sb.eval(t, Some(&p.lattice)) {
        Ok(s) => Ok(s),
        Err(Error::BranchTracking { .. }) if depth > 0 => {
            let mid = continue_to(sb, Some(p), (p.t + t) * 0.5, depth - 1)?;
            continue_to(sb, Some(&mid), t, depth - 1)
        }
        Err(Error::BranchTracking { .. }) => Err(Error::BranchTracking {
            step: 0,
            hint: (t - p.t).norm() / 2.0,
        }),
        Err(e) => Err(e),
    }
}

/// An axis-parallel box in the parameter plane.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn square(center: C, half: f64) -> Self {
        Region {
            re: (center.re - half, center.re + half),
            im: (center.im - half, center.im + half),
        }
    }

    pub fn contains(&self, t: C) -> bool {
        t.re >= self.re.0 && t.re <= self.re.1 && t.im >= self.im.0 && t.im <= self.im.1
    }
}

/// Options for the covering searches.
#[derive(Clone, Copy, Debug)]
pub struct CoverOptions {
    /// Cells are refined until `‖J‖·(half diagonal)` is below this.
    pub max_image: f64,
    /// Initial grid is `n × n`.
    pub grid: usize,
    pub max_depth: u32,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            max_image: 0.2,
            grid: 16,
            max_depth: 14,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    c: C,
    half: f64,
    depth: u32,
}

/// Leaves of an adaptive subdivision of `region` on which `β_σ` is close
/// to affine, with their centre samples and Jacobians. Cells that meet the
/// singular margin are split down to `max_depth` and then dropped.
fn leaves(
    sb: &SectionBetti,
    region: Region,
    opts: CoverOptions,
) -> Vec<(Cell, BettiSample, [[f64; 2]; 2])> {
    let w = (region.re.1 - region.re.0).max(region.im.1 - region.im.0);
    let half = w / (2.0 * opts.grid as f64);
    let mut stack = Vec::new();
    for i in 0..opts.grid {
        for j in 0..opts.grid {
            let c = C::new(
                region.re.0 + (2 * i + 1) as f64 * half,
                region.im.0 + (2 * j + 1) as f64 * half,
            );
            stack.push(Cell { c, half, depth: 0 });
        }
    }
    let mut out = Vec::new();
    while let Some(cell) = stack.pop() {
        let diag = cell.half * std::f64::consts::SQRT_2;
        let dist = sb.distance_to_singular(cell.c);
        let sample = if dist > diag + sb.margin {
            sb.eval(cell.c, None).ok().and_then(|s| {
                let h = (cell.half * 1e-3).max(1e-9);
                sb.jacobian(&s, h).ok().map(|j| (s, j))
            })
        } else {
            None
        };
        let ok = match &sample {
            Some((s, j)) => {
                let n = j.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
                n * diag <= opts.max_image && nearly_affine(sb, &cell, s, j, 0.1 * opts.max_image)
            }
            None => false,
        };
        if ok {
            let (s, j) = sample.unwrap();
            out.push((cell, s, j));
        } else if cell.depth < opts.max_depth && dist > sb.margin * 0.5 - diag {
            let h = cell.half / 2.0;
            for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
                stack.push(Cell {
                    c: cell.c + C::new(dx * h, dy * h),
                    half: h,
                    depth: cell.depth + 1,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        (a.0.c.re, a.0.c.im)
            .partial_cmp(&(b.0.c.re, b.0.c.im))
            .unwrap()
    });
    out
}

/// Whether the affine model at the centre predicts the corners to within `tol`.
fn nearly_affine(
    sb: &SectionBetti,
    cell: &Cell,
    s: &BettiSample,
    j: &[[f64; 2]; 2],
    tol: f64,
) -> bool {
    [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
        .iter()
        .all(|&(dx, dy)| {
            let (dx, dy) = (dx * cell.half, dy * cell.half);
            match sb.eval(cell.c + C::new(dx, dy), Some(&s.lattice)) {
                Ok(c) => {
                    let d = unwrap_diff(c.raw, s.raw);
                    let e0 = d.0 - (j[0][0] * dx + j[0][1] * dy);
                    let e1 = d.1 - (j[1][0] * dx + j[1][1] * dy);
                    e0.abs().max(e1.abs()) <= tol
                }
                Err(_) => false,
            }
        })
}

/// A parameter where `β_σ` is rational.
#[derive(Clone, Debug, Serialize)]
pub struct RationalBettiValue {
    pub t_re: f64,
    pub t_im: f64,
    pub betti: BettiPoint,
    pub hit: RationalHit,
}

impl RationalBettiValue {
    pub fn t(&self) -> C {
        C::new(self.t_re, self.t_im)
    }
}

/// Every parameter in `region` (outside the singular margin) whose Betti
/// point is rational with denominator ≤ `qmax`: each leaf of an adaptive
/// subdivision is inverted linearly onto the candidate targets, then
/// refined by Newton's method. Results are sorted and deduplicated.
pub fn rational_betti_search(
    sb: &SectionBetti,
    region: Region,
    qmax: u64,
    opts: CoverOptions,
) -> Vec<RationalBettiValue> {
    let mut targets = Vec::new();
    for q in 1..=qmax {
        for p1 in 0..q {
            for p2 in 0..q {
                if RationalHit::new(p1, p2, q).q == q {
                    targets.push((p1 as f64 / q as f64, p2 as f64 / q as f64));
                }
            }
        }
    }
    let cells = leaves(sb, region, opts);
    let found: Vec<RationalBettiValue> = {
        use rayon::prelude::*;
        cells
            .par_iter()
            .flat_map_iter(|(cell, s, j)| {
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                let mut local = Vec::new();
                if det.abs() < 1e-300 {
                    return local.into_iter();
                }
                for &v in &targets {
                    let r = unwrap_diff(v, s.raw);
                    let dx = (j[1][1] * r.0 - j[0][1] * r.1) / det;
                    let dy = (-j[1][0] * r.0 + j[0][0] * r.1) / det;
                    if dx.abs() > 2.0 * cell.half || dy.abs() > 2.0 * cell.half {
                        continue;
                    }
                    if let Some(hit) = sb.invert_near(cell.c + C::new(dx, dy), v, Some(&s.lattice))
                    {
                        if !region.contains(hit.t) {
                            continue;
                        }
                        if let Some(rh) = detect_rational(&hit.betti, qmax) {
                            local.push(RationalBettiValue {
                                t_re: hit.t.re,
                                t_im: hit.t.im,
                                betti: hit.betti,
                                hit: rh,
                            });
                        }
                    }
                }
                local.into_iter()
            })
            .collect()
    };
    dedup_parameters(found, 1e-7)
}

fn dedup_parameters(mut v: Vec<RationalBettiValue>, tol: f64) -> Vec<RationalBettiValue> {
    v.sort_by(|a, b| (a.t_re, a.t_im).partial_cmp(&(b.t_re, b.t_im)).unwrap());
    let mut out: Vec<RationalBettiValue> = Vec::new();
    for x in v {
        if !out
            .iter()
            .any(|y| (y.t() - x.t()).norm() < tol * (1.0 + x.t().norm()))
        {
            out.push(x);
        }
    }
    out
}

/// Largest number of solutions of `β_σ(t) = v` in `region` over the given
/// targets, and the number of leaves used.
pub fn fiber_cardinality_check(
    sb: &SectionBetti,
    region: Region,
    targets: &[(f64, f64)],
    opts: CoverOptions,
) -> (usize, usize) {
    let cells = leaves(sb, region, opts);
    let mut best = 0;
    for &v in targets {
        let mut sols: Vec<C> = Vec::new();
        for (cell, s, j) in &cells {
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let r = unwrap_diff(v, s.raw);
            let dx = (j[1][1] * r.0 - j[0][1] * r.1) / det;
            let dy = (-j[1][0] * r.0 + j[0][0] * r.1) / det;
            if !(dx.abs() <= 2.0 * cell.half && dy.abs() <= 2.0 * cell.half) {
                continue;
            }
            if let Some(hit) = sb.invert_near(cell.c + C::new(dx, dy), v, Some(&s.lattice)) {
                if region.contains(hit.t)
                    && !sols
                        .iter()
                        .any(|u| (u - hit.t).norm() < 1e-7 * (1.0 + u.norm()))
                {
                    sols.push(hit.t);
                }
            }
        }
        best = best.max(sols.len());
    }
    (best, cells.len())
}
