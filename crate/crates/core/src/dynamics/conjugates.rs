use num_complex::Complex64;
use serde::Serialize;

use super::point::DoubleFibration;
use super::search::TorsionParameter;
use crate::error::{Error, Result};
use crate::surface::Chart;

/// Distances of the conjugates of a torsion value to the bad locus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateControl {
    pub order: u32,
    pub degree: usize,
    pub minpoly: String,
    /// Chart-wise distance of each conjugate, in designation order.
    pub distances: Vec<f64>,
}

impl ConjugateControl {
    /// Share of conjugates at distance `≥ δ`.
    pub fn fraction(&self, delta: f64) -> f64 {
        let k = self.distances.iter().filter(|&&x| x >= delta).count();
        k as f64 / self.degree as f64
    }

    /// Largest `δ` with fraction `≥ target`: the `⌈target·d⌉`-th largest distance.
    pub fn critical_delta(&self, target: f64) -> f64 {
        let mut v = self.distances.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        let k = ((target * self.degree as f64).ceil() as usize).clamp(1, v.len());
        v[k - 1]
    }
}

/// Configured bad locus: the singular parameters plus extra points given
/// in the finite chart.
fn bad_points(d: &DoubleFibration, tp: &TorsionParameter, excluded: &[Complex64]) -> Result<[Vec<Complex64>; 2]> {
    let mut fin = d.section_betti(tp.axis, Chart::Finite)?.singular_parameters().to_vec();
    let mut inf = match d.section_betti(tp.axis, Chart::Infinity) {
        Ok(sb) => sb.singular_parameters().to_vec(),
        Err(_) => fin.iter().filter(|z| z.norm() > 0.0).map(|z| z.inv()).collect(),
    };
    fin.extend_from_slice(excluded);
    inf.extend(excluded.iter().filter(|z| z.norm() > 0.0).map(|z| z.inv()));
    Ok([fin, inf])
}

/// Distance of every conjugate of `tp` to the bad locus, measured in the
/// finite chart when `|x| ≤ 1` and in the chart at infinity (on `1/x`)
/// otherwise.
pub fn conjugate_control_experiment(
    d: &DoubleFibration,
    tp: &TorsionParameter,
    excluded: &[Complex64],
) -> Result<ConjugateControl> {
    let [fin, inf] = bad_points(d, tp, excluded)?;
    let nearest = |z: Complex64, set: &[Complex64]| set.iter().map(|s| (s - z).norm()).fold(f64::INFINITY, f64::min);
    let distances = tp
        .conjugates
        .iter()
        .map(|a| {
            let z = a.approx().value;
            match tp.chart {
                Chart::Finite if z.norm() <= 1.0 => nearest(z, &fin),
                Chart::Finite => nearest(z.inv(), &inf),
                Chart::Infinity if z.norm() <= 1.0 => nearest(z, &inf),
                Chart::Infinity => nearest(z.inv(), &fin),
            }
        })
        .collect();
    Ok(ConjugateControl { order: tp.order, degree: tp.degree(), minpoly: tp.minpoly.to_string(), distances })
}

/// Outcome of the search for a `δ` with fraction `≥ target`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaSearch {
    pub start: f64,
    pub delta: f64,
    pub fraction: f64,
    pub fraction_at_start: f64,
    /// Halvings needed to reach a valid `δ`, then refinement steps.
    pub halvings: u32,
    pub refinements: u32,
}

/// Halves `δ` from `start` until the fraction reaches `target`, then bisects
/// between the last valid and first invalid value.
pub fn find_delta(c: &ConjugateControl, start: f64, target: f64, refinements: u32) -> Result<DeltaSearch> {
    if !(start > 0.0) {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    let fraction_at_start = c.fraction(start);
    let mut hi = start;
    let mut lo = start;
    let mut halvings = 0;
    while c.fraction(lo) < target {
        hi = lo;
        lo *= 0.5;
        halvings += 1;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::InternalConsistency("no positive δ reaches the target fraction".into()));
        }
    }
    let mut steps = 0;
    if hi > lo {
        for _ in 0..refinements {
            let mid = 0.5 * (lo + hi);
            if c.fraction(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
            steps += 1;
        }
    }
    Ok(DeltaSearch { start, delta: lo, fraction: c.fraction(lo), fraction_at_start, halvings, refinements: steps })
}
