use rayon::prelude::*;
use serde::Serialize;

use super::naive::mahler_height;
use super::HeightValue;
use crate::algebra::AlgebraicNumber;
use crate::error::Result;
use crate::weierstrass::{TorsionValueOrbit, WeierstrassFamily};

#[derive(Clone, Debug, Serialize)]
pub struct SurveyRow {
    pub order: u32,
    pub minpoly: String,
    pub height: f64,
    pub height_err: f64,
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightSurvey {
    pub rows: Vec<SurveyRow>,
    /// `(m, C(m))`: the largest height among torsion values of order ≤ m.
    pub running_max: Vec<(u32, f64)>,
}

impl HeightSurvey {
    pub fn max_height(&self) -> f64 {
        self.running_max.last().map_or(0.0, |r| r.1)
    }
}

/// Naive heights of all torsion values of order `1..=m_max` on smooth fibers.
pub fn torsion_height_survey(
    family: &WeierstrassFamily,
    m_max: u32,
    precision: f64,
) -> Result<HeightSurvey> {
    let per_order: Vec<Vec<TorsionValueOrbit>> = (1..=m_max)
        .into_par_iter()
        .map(|m| family.torsion_values(m, precision))
        .collect::<Result<_>>()?;
    Ok(survey_of_orbits(&per_order))
}

/// The survey of already computed torsion values; `per_order[k]` holds the
/// orbits of exact order `k + 1`.
pub fn survey_of_orbits(per_order: &[Vec<TorsionValueOrbit>]) -> HeightSurvey {
    let mut rows = Vec::new();
    let mut running_max = Vec::new();
    let mut c = 0.0f64;
    for (k, orbits) in per_order.iter().enumerate() {
        let m = k as u32 + 1;
        for o in orbits {
            let z: Vec<_> = o.conjugates.iter().map(AlgebraicNumber::approx).collect();
            let h: HeightValue = mahler_height(&o.minpoly, &z);
            c = c.max(h.value);
            rows.push(SurveyRow {
                order: m,
                minpoly: o.minpoly.to_string_var("t"),
                height: h.value,
                height_err: h.err,
                degree: o.conjugates.len(),
            });
        }
        running_max.push((m, c));
    }
    HeightSurvey { rows, running_max }
}
