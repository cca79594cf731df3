use serde::Serialize;

use super::point::{projective_distance, DoubleFibration, PointRecord, SurfacePoint};
use crate::algebra::field::q_to_f64;
use crate::algebra::{ComplexApprox, Field, Q};
use crate::error::Error;
use crate::heights::{naive_height, ProjectivePoint};
use crate::surface::{Axis, Chart};

/// Coefficient domains in which orbits can be enumerated.
pub trait OrbitDomain: Field {
    fn record(p: &SurfacePoint<Self>) -> PointRecord;
    /// Height of the projective point: the Weil height for exact points,
    /// the archimedean log-size `ln(‖p‖∞ / min |pᵢ ≠ 0|)` for approximate
    /// ones.
    fn height(p: &[Self; 4]) -> f64;
    fn same_point(a: &[Self; 4], b: &[Self; 4], tol: f64) -> bool;
    fn error(p: &[Self; 4]) -> f64;
    /// Distance from `f_i(p)` to the singular parameters of its chart;
    /// infinite for exact points, whose singular fibers are caught exactly.
    fn distance_to_bad(d: &DoubleFibration, p: &SurfacePoint<Self>, axis: Axis) -> f64;
}

impl OrbitDomain for ComplexApprox {
    fn record(p: &SurfacePoint<Self>) -> PointRecord {
        PointRecord::from(p)
    }
    fn height(p: &[Self; 4]) -> f64 {
        let mags: Vec<f64> = p.iter().map(|c| c.abs()).filter(|&m| m > 0.0).collect();
        let hi = mags.iter().cloned().fold(0.0, f64::max);
        let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        (hi / lo).ln()
    }
    fn same_point(a: &[Self; 4], b: &[Self; 4], tol: f64) -> bool {
        projective_distance(a, b) <= tol
    }
    fn error(p: &[Self; 4]) -> f64 {
        p.iter().map(|c| c.err).fold(0.0, f64::max)
    }
    fn distance_to_bad(d: &DoubleFibration, p: &SurfacePoint<Self>, axis: Axis) -> f64 {
        p.param(axis)
            .and_then(|fp| d.distance_to_singular(axis, fp).ok())
            .unwrap_or(f64::INFINITY)
    }
}

impl OrbitDomain for Q {
    fn record(p: &SurfacePoint<Self>) -> PointRecord {
        let par = |f: &Option<super::point::FiberParam<Q>>| {
            f.as_ref()
                .map(|f| (q_to_f64(&f.value), 0.0, f.chart == Chart::Infinity))
        };
        PointRecord {
            coords: p.coords.clone().map(|c| (q_to_f64(&c), 0.0)),
            t: par(&p.f1),
            s: par(&p.f2),
        }
    }
    fn height(p: &[Self; 4]) -> f64 {
        naive_height(&ProjectivePoint::Rational(p.to_vec()))
            .map(|h| h.value)
            .unwrap_or(f64::NAN)
    }
    fn same_point(a: &[Self; 4], b: &[Self; 4], _tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
    }
    fn error(_p: &[Self; 4]) -> f64 {
        0.0
    }
    fn distance_to_bad(_d: &DoubleFibration, _p: &SurfacePoint<Self>, _axis: Axis) -> f64 {
        f64::INFINITY
    }
}

/// Limits applied while enumerating an orbit; a tripped guard ends the ray
/// and becomes the status.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitGuards {
    /// Largest tolerated coordinate error (approximate domains).
    pub max_error: f64,
    /// Largest tolerated height.
    pub height_cap: f64,
    /// Smallest tolerated distance from a fibration parameter to the
    /// singular parameters of its chart (approximate domains).
    pub bad_margin: f64,
    /// Relative distance below which two approximate points are equal.
    pub same_tol: f64,
}

impl Default for OrbitGuards {
    fn default() -> Self {
        OrbitGuards {
            max_error: 1e-6,
            height_cap: 1e4,
            bad_margin: 1e-8,
            same_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitStatus {
    Finite,
    EscapedPrecision,
    MaxIterations,
    HitBadLocus,
}

impl OrbitStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitStatus::Finite => "finite",
            OrbitStatus::EscapedPrecision => "escaped-precision",
            OrbitStatus::MaxIterations => "max-iterations",
            OrbitStatus::HitBadLocus => "hit-bad-locus",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitEntry {
    pub r1: u32,
    pub r2: u32,
    pub point: PointRecord,
    pub height: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub base: PointRecord,
    /// Visited points, column by column (`r2` outer, `r1` inner).
    pub entries: Vec<OrbitEntry>,
    pub status: OrbitStatus,
    /// Why a guard tripped, if one did.
    pub guard: Option<String>,
    /// Least `m ≥ 1` with `t₂^m(p) = p`, if seen.
    pub t2_period: Option<u32>,
    /// Least `n ≥ 1` with `t₁^n(p_r) = p_r`, per explored column.
    pub column_periods: Vec<Option<u32>>,
    /// Number of distinct visited points.
    pub distinct: usize,
}

enum Step<F: Field> {
    Ok(SurfacePoint<F>),
    Guard(OrbitStatus, String),
}

fn step<F: OrbitDomain>(
    d: &DoubleFibration,
    p: &SurfacePoint<F>,
    axis: Axis,
    g: &OrbitGuards,
) -> Step<F> {
    let dist = F::distance_to_bad(d, p, axis);
    if dist < g.bad_margin {
        return Step::Guard(
            OrbitStatus::HitBadLocus,
            format!(
                "fibration {} parameter within {dist:e} of a singular fiber",
                axis.index()
            ),
        );
    }
    match d.translate(p, axis) {
        Ok(q) => {
            let e = F::error(&q.coords);
            if e > g.max_error {
                return Step::Guard(
                    OrbitStatus::EscapedPrecision,
                    format!("coordinate error {e:e} above {:e}", g.max_error),
                );
            }
            let h = F::height(&q.coords);
            if h > g.height_cap {
                return Step::Guard(
                    OrbitStatus::EscapedPrecision,
                    format!("height {h:.1} above cap {:.1}", g.height_cap),
                );
            }
            Step::Ok(q)
        }
        Err(e @ (Error::UndefinedMap(_) | Error::SingularFiber(_) | Error::ChartDegenerate(_))) => {
            Step::Guard(OrbitStatus::HitBadLocus, e.to_string())
        }
        Err(e) => Step::Guard(OrbitStatus::EscapedPrecision, e.to_string()),
    }
}

/// Enumerates `t₁^{r1}(t₂^{r2}(p))` for `r2 ≤ r2max`, `r1 ≤ r1max`. A ray
/// stops early when it returns to its start or a guard trips.
pub fn orbit_grid<F: OrbitDomain>(
    d: &DoubleFibration,
    p: &SurfacePoint<F>,
    r1max: u32,
    r2max: u32,
    guards: &OrbitGuards,
) -> OrbitRecord {
    let mut entries = Vec::new();
    let mut guard: Option<(OrbitStatus, String)> = None;
    let mut seen: Vec<[F; 4]> = Vec::new();
    let note = |q: &SurfacePoint<F>, seen: &mut Vec<[F; 4]>| {
        if !seen
            .iter()
            .any(|s| F::same_point(s, &q.coords, guards.same_tol))
        {
            seen.push(q.coords.clone());
        }
    };
    // the t₂-ray
    let mut column_starts = vec![p.clone()];
    let mut t2_period = None;
    for r2 in 1..=r2max {
        match step(d, column_starts.last().unwrap(), Axis::L2, guards) {
            Step::Ok(q) => {
                if F::same_point(&q.coords, &p.coords, guards.same_tol) {
                    t2_period = Some(r2);
                    break;
                }
                column_starts.push(q);
            }
            Step::Guard(s, m) => {
                guard.get_or_insert((s, format!("t2 ray at r2 = {r2}: {m}")));
                break;
            }
        }
    }
    let mut column_periods = Vec::new();
    for (r2, start) in column_starts.iter().enumerate() {
        let r2 = r2 as u32;
        entries.push(OrbitEntry {
            r1: 0,
            r2,
            point: F::record(start),
            height: F::height(&start.coords),
            error: F::error(&start.coords),
        });
        note(start, &mut seen);
        let mut cur = start.clone();
        let mut period = None;
        for r1 in 1..=r1max {
            match step(d, &cur, Axis::L1, guards) {
                Step::Ok(q) => {
                    if F::same_point(&q.coords, &start.coords, guards.same_tol) {
                        period = Some(r1);
                        break;
                    }
                    entries.push(OrbitEntry {
                        r1,
                        r2,
                        point: F::record(&q),
                        height: F::height(&q.coords),
                        error: F::error(&q.coords),
                    });
                    note(&q, &mut seen);
                    cur = q;
                }
                Step::Guard(s, m) => {
                    guard.get_or_insert((s, format!("t1 ray at (r1, r2) = ({r1}, {r2}): {m}")));
                    break;
                }
            }
        }
        column_periods.push(period);
    }
    let closed = t2_period.is_some() && column_periods.iter().all(|p| p.is_some());
    let (status, guard) = match guard {
        Some((s, m)) => (s, Some(m)),
        None if closed => (OrbitStatus::Finite, None),
        None => (OrbitStatus::MaxIterations, None),
    };
    OrbitRecord {
        base: F::record(p),
        entries,
        status,
        guard,
        t2_period,
        column_periods,
        distinct: seen.len(),
    }
}
