use serde::Serialize;

use super::point::{DoubleFibration, FiberParam, SurfacePoint};
use crate::algebra::{ComplexApprox, Field};
use crate::betti::detect_rational;
use crate::error::{Error, Result};
use crate::surface::Axis;

/// Proof that `O(p)` is finite: `m = ord σ₂(f₂(p))` and the orders
/// `n_r = ord σ₁(f₁(p_r))` of the `m` columns through `p_r = t₂^r(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteOrbitCertificate {
    pub m: u32,
    pub orders: Vec<u32>,
    /// `Σ n_r`.
    pub bound: u32,
    /// Number of distinct points of `O(p)`.
    pub cardinality: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CertificateOutcome {
    Certified(FiniteOrbitCertificate),
    /// Some order exceeds its cap (or the point is not torsion at all);
    /// `column` is the offending `r`, or `None` for the `t₂` condition.
    Rejected {
        column: Option<u32>,
        reason: String,
    },
    /// The tests could not be completed reliably.
    Inconclusive {
        reason: String,
    },
    /// `p` lies where a translation is undefined.
    Undefined {
        reason: String,
    },
}

impl CertificateOutcome {
    pub fn certificate(&self) -> Option<&FiniteOrbitCertificate> {
        match self {
            CertificateOutcome::Certified(c) => Some(c),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CertificateOutcome::Certified(_) => "certified",
            CertificateOutcome::Rejected { .. } => "rejected",
            CertificateOutcome::Inconclusive { .. } => "inconclusive",
            CertificateOutcome::Undefined { .. } => "undefined",
        }
    }
}

fn bad_locus(e: &Error) -> bool {
    matches!(
        e,
        Error::UndefinedMap(_) | Error::SingularFiber(_) | Error::ChartDegenerate(_)
    )
}

/// Sorts an error into the outcome it implies, or passes it through.
fn classify(e: Error) -> Result<CertificateOutcome> {
    match e {
        e if bad_locus(&e) => Ok(CertificateOutcome::Undefined {
            reason: e.to_string(),
        }),
        e @ (Error::ZeroDivisor | Error::PrecisionExhausted { .. }) => {
            Ok(CertificateOutcome::Inconclusive {
                reason: e.to_string(),
            })
        }
        e => Err(e),
    }
}

/// Projective equality by cross-multiplication.
pub fn same_point_exact<F: Field>(a: &[F; 4], b: &[F; 4]) -> bool {
    (0..4).all(|i| {
        (i + 1..4).all(|j| (a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone()).is_zero())
    })
}

fn order_along<F: Field>(
    d: &DoubleFibration,
    p: &SurfacePoint<F>,
    axis: Axis,
    cap: u32,
) -> Result<Option<u32>> {
    let (model, _) = d.to_curve(p, axis)?;
    model.curve.torsion_order(&model.section, cap)
}

/// The exact finite-orbit criterion over an exact field containing the
/// coordinates of `p`.
///
/// Every test is an exact computation, so the answer holds for all
/// embeddings of that field at once.
pub fn finite_orbit_certificate<F: Field>(
    d: &DoubleFibration,
    p: &SurfacePoint<F>,
    m_max: u32,
    n_max: u32,
) -> Result<CertificateOutcome> {
    if !F::is_exact() {
        return Err(Error::UnsupportedDomain(
            "certificates need an exact coefficient domain".into(),
        ));
    }
    match certify(d, p, m_max, n_max) {
        Ok(o) => Ok(o),
        Err(e) => classify(e),
    }
}

fn certify<F: Field>(
    d: &DoubleFibration,
    p: &SurfacePoint<F>,
    m_max: u32,
    n_max: u32,
) -> Result<CertificateOutcome> {
    if !p.is_defined() {
        return Ok(CertificateOutcome::Undefined {
            reason: "point on an axis line or a singular fiber".into(),
        });
    }
    let Some(m) = order_along(d, p, Axis::L2, m_max)? else {
        return Ok(CertificateOutcome::Rejected {
            column: None,
            reason: format!("σ₂(f₂(p)) has no order ≤ {m_max}"),
        });
    };
    let mut columns = vec![p.clone()];
    for _ in 1..m {
        let next = d.translate(columns.last().unwrap(), Axis::L2)?;
        columns.push(next);
    }
    let back = d.translate(columns.last().unwrap(), Axis::L2)?;
    if !same_point_exact(&back.coords, &p.coords) {
        return Err(Error::InternalConsistency(format!(
            "t₂^{m}(p) ≠ p although σ₂(f₂(p)) has order {m}"
        )));
    }
    let mut orders = Vec::with_capacity(m as usize);
    for (r, pr) in columns.iter().enumerate() {
        match order_along(d, pr, Axis::L1, n_max)? {
            Some(n) => orders.push(n),
            None => {
                return Ok(CertificateOutcome::Rejected {
                    column: Some(r as u32),
                    reason: format!("σ₁(f₁(p_{r})) has no order ≤ {n_max}"),
                })
            }
        }
    }
    let mut seen: Vec<[F; 4]> = Vec::new();
    for (pr, &n) in columns.iter().zip(&orders) {
        for k in 0..n {
            let q = if k == 0 {
                pr.clone()
            } else {
                d.translate_by(pr, Axis::L1, k as i64)?
            };
            if !seen.iter().any(|s| same_point_exact(s, &q.coords)) {
                seen.push(q.coords);
            }
        }
    }
    let bound = orders.iter().sum();
    Ok(CertificateOutcome::Certified(FiniteOrbitCertificate {
        m,
        orders,
        bound,
        cardinality: seen.len(),
    }))
}

/// Walks `O(p)` one translation at a time, closing each ray when it
/// returns to its start, and counts the distinct points met. Fails when a
/// ray does not close within `cap` steps.
pub fn replay_orbit<F: Field>(d: &DoubleFibration, p: &SurfacePoint<F>, cap: u32) -> Result<usize> {
    let ray = |start: &SurfacePoint<F>, axis: Axis| -> Result<Vec<SurfacePoint<F>>> {
        let mut out = vec![start.clone()];
        for _ in 0..cap {
            let q = d.translate(out.last().unwrap(), axis)?;
            if same_point_exact(&q.coords, &start.coords) {
                return Ok(out);
            }
            out.push(q);
        }
        Err(Error::InternalConsistency(format!(
            "ray along {axis:?} did not close within {cap} steps"
        )))
    };
    let mut seen: Vec<[F; 4]> = Vec::new();
    for pr in ray(p, Axis::L2)? {
        for q in ray(&pr, Axis::L1)? {
            if !seen.iter().any(|s| same_point_exact(s, &q.coords)) {
                seen.push(q.coords);
            }
        }
    }
    Ok(seen.len())
}

/// Numeric order of `σ_i(t)` from its Betti coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "kebab-case")]
pub enum NumericOrder {
    /// Betti coordinates are `(p₁/q, p₂/q)` for this `q`.
    Torsion(u32),
    /// Every fraction with denominator ≤ the cap is farther than the error.
    AboveCap,
    Undecided,
}

/// Classifies the Betti coordinates of `σ_axis(t)` against denominators ≤ `qmax`.
pub fn numeric_order(
    d: &DoubleFibration,
    axis: Axis,
    t: &FiberParam<ComplexApprox>,
    qmax: u32,
) -> Result<NumericOrder> {
    let sb = d.section_betti(axis, t.chart)?;
    let s = sb.eval(t.value.value, None)?;
    if let Some(h) = detect_rational(&s.betti, qmax as u64) {
        return Ok(NumericOrder::Torsion(h.q as u32));
    }
    let dist = |x: f64| (x - x.round()).abs();
    let nearest = (1..=qmax)
        .map(|q| {
            let q = q as f64;
            dist(q * s.betti.b1).max(dist(q * s.betti.b2)) / q
        })
        .fold(f64::INFINITY, f64::min);
    Ok(if nearest > 4.0 * s.betti.err + 1e-9 {
        NumericOrder::AboveCap
    } else {
        NumericOrder::Undecided
    })
}

/// Result of the numeric pre-screen of the finite-orbit criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericScreen {
    pub m: NumericOrder,
    /// Numeric orders of the columns that were examined, in order.
    pub orders: Vec<NumericOrder>,
    pub verdict: ScreenVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum ScreenVerdict {
    /// All orders look torsion within their caps; exact confirmation may follow.
    Candidate,
    /// Some order is numerically above its cap.
    Rejected(String),
    Undecided(String),
}

/// Orders already known exactly, which the screen then does not recompute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KnownOrders {
    /// `ord σ₂(f₂(p))`.
    pub m: Option<u32>,
    /// `ord σ₁(f₁(p))`.
    pub n0: Option<u32>,
}

/// Cheap numeric version of the criterion: Betti orders of `σ₂(f₂(p))` and
/// of `σ₁(f₁(p_r))` along the `t₂`-ray. Never produces a certificate.
pub fn screen_numeric(
    d: &DoubleFibration,
    p: &SurfacePoint<ComplexApprox>,
    known: KnownOrders,
    m_max: u32,
    n_max: u32,
) -> NumericScreen {
    let undecided = |m, orders, why: String| NumericScreen {
        m,
        orders,
        verdict: ScreenVerdict::Undecided(why),
    };
    let order_at = |q: &SurfacePoint<ComplexApprox>,
                    axis: Axis,
                    cap: u32|
     -> std::result::Result<NumericOrder, String> {
        let fp = q
            .param(axis)
            .ok_or_else(|| format!("point on the axis line {axis:?}"))?;
        numeric_order(d, axis, fp, cap).map_err(|e| e.to_string())
    };
    let m = match known
        .m
        .map(NumericOrder::Torsion)
        .map_or_else(|| order_at(p, Axis::L2, m_max), Ok)
    {
        Ok(NumericOrder::Torsion(k)) if k > m_max => NumericOrder::AboveCap,
        Ok(o) => o,
        Err(e) => return undecided(NumericOrder::Undecided, vec![], e),
    };
    let mm = match m {
        NumericOrder::Torsion(k) => k,
        NumericOrder::AboveCap => {
            return NumericScreen {
                m,
                orders: vec![],
                verdict: ScreenVerdict::Rejected("σ₂ order above cap".into()),
            }
        }
        NumericOrder::Undecided => return undecided(m, vec![], "σ₂ order undecided".into()),
    };
    let mut orders = Vec::new();
    let mut cur = p.clone();
    for r in 0..mm {
        if r > 0 {
            cur = match d.translate(&cur, Axis::L2) {
                Ok(q) => q,
                Err(e) => return undecided(m, orders, format!("t₂ step {r}: {e}")),
            };
        }
        let o = match known
            .n0
            .filter(|_| r == 0)
            .map(NumericOrder::Torsion)
            .map_or_else(|| order_at(&cur, Axis::L1, n_max), Ok)
        {
            Ok(NumericOrder::Torsion(k)) if k > n_max => NumericOrder::AboveCap,
            Ok(o) => o,
            Err(e) => return undecided(m, orders, format!("column {r}: {e}")),
        };
        orders.push(o);
        match o {
            NumericOrder::Torsion(_) => {}
            NumericOrder::AboveCap => {
                return NumericScreen {
                    m,
                    orders,
                    verdict: ScreenVerdict::Rejected(format!("column {r} order above cap")),
                }
            }
            NumericOrder::Undecided => {
                return undecided(m, orders, format!("column {r} order undecided"))
            }
        }
    }
    NumericScreen {
        m,
        orders,
        verdict: ScreenVerdict::Candidate,
    }
}
