use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::certificate::{
    finite_orbit_certificate, replay_orbit, screen_numeric, CertificateOutcome,
    FiniteOrbitCertificate, KnownOrders, NumericScreen, ScreenVerdict,
};
use super::point::{intersection_quadratic, line_point, DoubleFibration, FiberParam, PointRecord};
use crate::algebra::upoly::sqrt_q;
use crate::algebra::{AlgebraicNumber, ComplexApprox, Ext, Field, MultiPoly, UPoly, Q};
use crate::error::{Error, Result};
use crate::surface::{Axis, Chart};

type L1 = Ext<Q>;
type L2 = Ext<L1>;
type L3 = Ext<L2>;

/// One Galois orbit of torsion values of a section, in one chart.
#[derive(Clone, Debug)]
pub struct TorsionParameter {
    pub axis: Axis,
    pub order: u32,
    pub chart: Chart,
    pub minpoly: UPoly<Q>,
    pub conjugates: Vec<AlgebraicNumber>,
}

impl TorsionParameter {
    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    fn sort_key(&self) -> (u32, usize, String, bool) {
        (
            self.order,
            self.degree(),
            self.minpoly.to_string(),
            self.chart == Chart::Infinity,
        )
    }
}

/// Torsion values of `σ_axis` of order ≤ `cap`: the roots of `T_m` in the
/// finite chart plus the parameter at infinity when it is one.
pub fn torsion_parameters(
    d: &DoubleFibration,
    axis: Axis,
    cap: u32,
    precision: f64,
) -> Result<Vec<TorsionParameter>> {
    let mut out = Vec::new();
    let fin = d.family(axis, Chart::Finite)?;
    let inf = d.family(axis, Chart::Infinity).ok();
    for m in 1..=cap {
        for orbit in fin.torsion_values(m, precision)? {
            out.push(TorsionParameter {
                axis,
                order: m,
                chart: Chart::Finite,
                minpoly: orbit.minpoly,
                conjugates: orbit.conjugates,
            });
        }
        if let Some(inf) = inf {
            let p = inf.exact_order_polynomial(m)?;
            if !p.is_zero() && !p.is_constant() && p.coeff(0).is_zero() {
                let x = UPoly::x();
                let zero = AlgebraicNumber::from_rational(&Q::zero());
                out.push(TorsionParameter {
                    axis,
                    order: m,
                    chart: Chart::Infinity,
                    minpoly: x,
                    conjugates: vec![zero],
                });
            }
        }
    }
    out.sort_by_key(|a| a.sort_key());
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    /// Order cap `N` for the torsion values of both sections.
    pub order_cap: u32,
    /// Cap on `ord σ₂(b)` inside certificates.
    pub m_max: u32,
    /// Cap on the column orders `n_r`.
    pub n_max: u32,
    /// Radius of the isolating discs of torsion values.
    pub precision: f64,
    /// Largest `[ℚ(p):ℚ]` for which exact confirmation is attempted.
    pub max_tower_degree: usize,
}

impl SearchOptions {
    pub fn new(order_cap: u32) -> Self {
        SearchOptions {
            order_cap,
            m_max: order_cap,
            n_max: order_cap,
            precision: 1e-14,
            max_tower_degree: 96,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamRecord {
    pub order: u32,
    pub chart: &'static str,
    pub minpoly: String,
    pub degree: usize,
    /// Designation index of the conjugate used for the numeric embedding.
    pub index: usize,
    pub center: (f64, f64),
    pub radius: f64,
}

fn param_record(p: &TorsionParameter, idx: usize) -> ParamRecord {
    let a = &p.conjugates[idx];
    ParamRecord {
        order: p.order,
        chart: chart_name(p.chart),
        minpoly: p.minpoly.to_string(),
        degree: p.degree(),
        index: a.index(),
        center: (a.root().re(), a.root().im()),
        radius: a.root().radius,
    }
}

pub fn chart_name(c: Chart) -> &'static str {
    match c {
        Chart::Finite => "finite",
        Chart::Infinity => "infinity",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub b: ParamRecord,
    pub t: ParamRecord,
    /// Which intersection point of the two fibers (`0`/`1`), or `"orbit"`
    /// when one exact computation covers all conjugate points.
    pub branch: String,
    /// Number of geometric points the entry stands for.
    pub covers: usize,
    pub status: &'static str,
    pub certificate: Option<FiniteOrbitCertificate>,
    pub reason: Option<String>,
    pub point: PointRecord,
    pub screen: NumericScreen,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Catalog {
    pub surface_id: String,
    pub options: SearchOptions,
    /// Numbers of torsion-value orbits enumerated for `σ₂` and `σ₁`.
    pub b_orbits: usize,
    pub t_orbits: usize,
    /// Intersection points examined (one per numeric embedding).
    pub examined: usize,
    /// Certified and inconclusive points, in canonical order.
    pub entries: Vec<CatalogEntry>,
    /// Rejected points by reason.
    pub rejected: BTreeMap<String, usize>,
    /// The realized orders `m` of certified points.
    pub orders: Vec<u32>,
    pub max_order: Option<u32>,
}

impl Catalog {
    pub fn certified(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.status == "certified")
    }

    /// Deterministic pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }
}

/// The field `ℚ(b, t)` as a tower, when the construction is known to give
/// a field: one of the degrees is 1 or they are coprime.
struct Tower {
    b: (L2, L2),
    t: (L2, L2),
    m1: Arc<UPoly<Q>>,
    m2: Arc<UPoly<L1>>,
}

fn projective_l2(p: &TorsionParameter, gen: L2) -> (L2, L2) {
    match p.chart {
        Chart::Finite => (gen, L2::one()),
        Chart::Infinity => (L2::one(), gen),
    }
}

fn tower(b: &TorsionParameter, t: &TorsionParameter) -> Option<Tower> {
    let (db, dt) = (b.degree(), t.degree());
    if db > 1 && dt > 1 && db.gcd(&dt) != 1 {
        return None;
    }
    let m1 = Arc::new(b.minpoly.monic());
    let bg = L1::generator(&m1);
    let m2 = Arc::new(UPoly::new(
        t.minpoly.monic().coeffs().iter().map(L1::from_q).collect(),
    ));
    let tg = L2::generator(&m2);
    Some(Tower {
        b: projective_l2(b, L2::from_base(bg)),
        t: projective_l2(t, tg),
        m1,
        m2,
    })
}

/// `N_{L₂/ℚ}(x)`.
fn norm_to_q(tw: &Tower, x: &L2) -> Result<Q> {
    let n1 = tw.m2.field_resultant(x.value())?;
    let n1 = L1::from_poly(&tw.m1, n1.value().clone());
    tw.m1.field_resultant(n1.value())
}

enum ExactPoints {
    /// Both intersection points, conjugate over `ℚ(b, t)`.
    Pair([L3; 4]),
    /// A single intersection point away from the axis lines, defined over `ℚ(b, t)`.
    Single([L3; 4]),
    /// The two fibers share a component or meet only on the axis lines.
    Degenerate(String),
    /// `ℚ(b, t)(√disc)` is not known to be a field.
    NotAField(String),
}

fn exact_points(f: &MultiPoly<Q>, tw: &Tower) -> Result<ExactPoints> {
    let (b, t) = (&tw.b, &tw.t);
    let [g0, g1, g2] = intersection_quadratic(f, (&b.0, &b.1), (&t.0, &t.1));
    let lift = |x: L2| L3::from_base(x);
    let single = |u: L2, v: L2| {
        ExactPoints::Single(line_point(
            (&lift(b.0.clone()), &lift(b.1.clone())),
            (&lift(t.0.clone()), &lift(t.1.clone())),
            &lift(u),
            &lift(v),
        ))
    };
    if g0.is_zero() && g1.is_zero() && g2.is_zero() {
        return Ok(ExactPoints::Degenerate(
            "the joining line lies on the surface".into(),
        ));
    }
    if g0.is_zero() || g2.is_zero() {
        return Ok(if g1.is_zero() {
            ExactPoints::Degenerate("the fibers meet only on the axis lines".into())
        } else if g0.is_zero() {
            single(-g2, g1)
        } else {
            single(-g1, g0)
        });
    }
    let disc = g1.square() - L2::from_i64(4) * g0.clone() * g2.clone();
    if disc.is_zero() {
        return Ok(single(-g1, L2::from_i64(2) * g0));
    }
    let n = norm_to_q(tw, &disc)?;
    if sqrt_q(&n).is_some() {
        return Ok(ExactPoints::NotAField(
            "the discriminant has a square norm".into(),
        ));
    }
    let inv = g0.inv().ok_or(Error::ZeroDivisor)?;
    let m3 = Arc::new(UPoly::new(vec![g2 * inv.clone(), g1 * inv, L2::one()]));
    let u = L3::generator(&m3);
    Ok(ExactPoints::Pair(line_point(
        (&lift(b.0.clone()), &lift(b.1.clone())),
        (&lift(t.0.clone()), &lift(t.1.clone())),
        &u,
        &L3::one(),
    )))
}

fn approx_projective(p: &TorsionParameter, idx: usize) -> (ComplexApprox, ComplexApprox) {
    let v = p.conjugates[idx].approx();
    FiberParam {
        chart: p.chart,
        value: v,
    }
    .projective()
}

/// Numeric intersection points of the two fibers away from the axis lines.
fn numeric_points(
    f: &MultiPoly<Q>,
    b: &TorsionParameter,
    bi: usize,
    t: &TorsionParameter,
    ti: usize,
) -> Vec<[ComplexApprox; 4]> {
    let (b0, b1) = approx_projective(b, bi);
    let (t0, t1) = approx_projective(t, ti);
    fiber_intersection(f, (&b0, &b1), (&t0, &t1))
}

/// The points where the fibers `f₂ = b₀/b₁` and `f₁ = t₀/t₁` meet away
/// from the two axis lines, in a fixed branch order.
pub fn fiber_intersection(
    f: &MultiPoly<Q>,
    b: (&ComplexApprox, &ComplexApprox),
    t: (&ComplexApprox, &ComplexApprox),
) -> Vec<[ComplexApprox; 4]> {
    let [g0, g1, g2] = intersection_quadratic(f, b, t);
    let sq = (g1.square() - ComplexApprox::from_i64(4) * g0.clone() * g2.clone()).sqrt();
    // solve in the better-conditioned variable
    let roots: Vec<(ComplexApprox, ComplexApprox)> = if g0.abs() >= g2.abs() {
        let two = ComplexApprox::from_i64(2) * g0.clone();
        [sq.clone(), -sq]
            .into_iter()
            .filter_map(|s| Some(((-g1.clone() + s) * two.inv()?, ComplexApprox::one())))
            .collect()
    } else {
        let two = ComplexApprox::from_i64(2) * g2.clone();
        [sq.clone(), -sq]
            .into_iter()
            .filter_map(|s| Some((ComplexApprox::one(), (-g1.clone() + s) * two.inv()?)))
            .collect()
    };
    roots
        .into_iter()
        .filter(|(u, v)| {
            let (u, v) = (u.abs(), v.abs());
            u.min(v) > 1e-10 * u.max(v)
        })
        .map(|(u, v)| line_point(b, t, &u, &v))
        .collect()
}

struct PairResult {
    entries: Vec<CatalogEntry>,
    rejected: Vec<String>,
    examined: usize,
}

fn examine_pair(
    d: &DoubleFibration,
    b: &TorsionParameter,
    t: &TorsionParameter,
    o: &SearchOptions,
) -> Result<PairResult> {
    let f = d.surface().form();
    let mut res = PairResult {
        entries: Vec::new(),
        rejected: Vec::new(),
        examined: 0,
    };
    let tw = tower(b, t);
    let exact = match &tw {
        Some(tw) => Some(exact_points(f, tw)?),
        None => None,
    };
    // with a field tower one embedding stands for the whole Galois orbit
    let t_indices: Vec<usize> = if tw.is_some() {
        vec![0]
    } else {
        (0..t.conjugates.len()).collect()
    };
    for ti in t_indices {
        let pts = numeric_points(f, b, 0, t, ti);
        let field_pair = matches!(exact, Some(ExactPoints::Pair(_)));
        let pts = if field_pair {
            pts.into_iter().take(1).collect()
        } else {
            pts
        };
        for (branch, coords) in pts.into_iter().enumerate() {
            res.examined += 1;
            let p = match d.point(coords) {
                Ok(p) => p,
                Err(e) => {
                    res.rejected
                        .push(format!("numeric point off the surface: {e}"));
                    continue;
                }
            };
            let known = KnownOrders {
                m: Some(b.order),
                n0: Some(t.order),
            };
            let screen = screen_numeric(d, &p, known, o.m_max, o.n_max);
            if let ScreenVerdict::Rejected(why) = &screen.verdict {
                res.rejected.push(format!("numeric: {}", strip_column(why)));
                continue;
            }
            let tower_degree = b.degree() * t.degree() * if field_pair { 2 } else { 1 };
            let covers = match (&exact, field_pair) {
                (Some(_), true) => tower_degree,
                (Some(ExactPoints::Single(_)), false) => tower_degree,
                _ => 1,
            };
            let outcome = match (&exact, &screen.verdict) {
                (_, ScreenVerdict::Undecided(why)) => CertificateOutcome::Inconclusive {
                    reason: format!("numeric screen: {why}"),
                },
                (None, _) => CertificateOutcome::Inconclusive {
                    reason: "ℚ(b, t) not known to be a field".into(),
                },
                (Some(ExactPoints::NotAField(why) | ExactPoints::Degenerate(why)), _) => {
                    CertificateOutcome::Inconclusive {
                        reason: why.clone(),
                    }
                }
                (Some(_), _) if tower_degree > o.max_tower_degree => {
                    CertificateOutcome::Inconclusive {
                        reason: format!("tower degree {tower_degree} above {}", o.max_tower_degree),
                    }
                }
                (Some(ExactPoints::Pair(c) | ExactPoints::Single(c)), _) => {
                    certify_checked(d, c.clone(), o)?
                }
            };
            let (status, certificate, reason) = match outcome {
                CertificateOutcome::Certified(c) => ("certified", Some(c), None),
                CertificateOutcome::Inconclusive { reason } => ("inconclusive", None, Some(reason)),
                CertificateOutcome::Rejected { reason, .. } => {
                    res.rejected
                        .push(format!("exact: {}", strip_column(&reason)));
                    continue;
                }
                CertificateOutcome::Undefined { reason } => {
                    res.rejected.push(format!("undefined: {reason}"));
                    continue;
                }
            };
            res.entries.push(CatalogEntry {
                b: param_record(b, 0),
                t: param_record(t, ti),
                branch: if field_pair {
                    "orbit".into()
                } else {
                    branch.to_string()
                },
                covers,
                status,
                certificate,
                reason,
                point: PointRecord::from(&p),
                screen,
            });
        }
    }
    Ok(res)
}

/// Reason text without point-specific indices, for the summary counts.
fn strip_column(s: &str) -> String {
    s.split(|c: char| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .join("#")
}

/// Exact certificate plus an independent replay of its cardinality.
fn certify_checked(
    d: &DoubleFibration,
    coords: [L3; 4],
    o: &SearchOptions,
) -> Result<CertificateOutcome> {
    let p = d.point(coords)?;
    let out = finite_orbit_certificate(d, &p, o.m_max, o.n_max)?;
    if let CertificateOutcome::Certified(c) = &out {
        let cap = o.m_max.max(o.n_max) + 1;
        let replayed = replay_orbit(d, &p, cap)?;
        if replayed != c.cardinality {
            return Err(Error::InternalConsistency(format!(
                "certificate cardinality {} but replay visits {replayed} points",
                c.cardinality
            )));
        }
    }
    Ok(out)
}

/// Intersects every `σ₂`-torsion fiber with every `σ₁`-torsion fiber (orders
/// ≤ `N`), screens each intersection point numerically and confirms the
/// survivors exactly. Output order is canonical and independent of the
/// number of worker threads.
pub fn finite_orbit_search(d: &DoubleFibration, o: &SearchOptions) -> Result<Catalog> {
    if o.order_cap == 0 || o.m_max == 0 || o.n_max == 0 {
        return Err(Error::InvalidArgument(
            "order caps must be at least 1".into(),
        ));
    }
    let bs = torsion_parameters(d, Axis::L2, o.order_cap, o.precision)?;
    let ts = torsion_parameters(d, Axis::L1, o.order_cap, o.precision)?;
    let pairs: Vec<(&TorsionParameter, &TorsionParameter)> = bs
        .iter()
        .flat_map(|b| ts.iter().map(move |t| (b, t)))
        .collect();
    let results: Vec<Result<PairResult>> = pairs
        .par_iter()
        .map(|(b, t)| examine_pair(d, b, t, o))
        .collect();
    let mut entries = Vec::new();
    let mut rejected = BTreeMap::new();
    let mut examined = 0;
    for r in results {
        let r = r?;
        examined += r.examined;
        entries.extend(r.entries);
        for why in r.rejected {
            *rejected.entry(why).or_insert(0) += 1;
        }
    }
    let orders: BTreeSet<u32> = entries
        .iter()
        .filter_map(|e| e.certificate.as_ref().map(|c| c.m))
        .collect();
    Ok(Catalog {
        surface_id: d.surface().id(),
        options: *o,
        b_orbits: bs.len(),
        t_orbits: ts.len(),
        examined,
        entries,
        rejected,
        max_order: orders.iter().max().copied(),
        orders: orders.into_iter().collect(),
    })
}

/// The exact point(s) over `ℚ(b, t)` where the two torsion fibers meet, for
/// callers that want to run the exact criterion themselves. `None` when the
/// tower is not known to be a field.
pub fn exact_intersection(
    d: &DoubleFibration,
    b: &TorsionParameter,
    t: &TorsionParameter,
) -> Result<Option<[Ext<Ext<Ext<Q>>>; 4]>> {
    let Some(tw) = tower(b, t) else {
        return Ok(None);
    };
    Ok(match exact_points(d.surface().form(), &tw)? {
        ExactPoints::Pair(c) | ExactPoints::Single(c) => Some(c),
        _ => None,
    })
}
