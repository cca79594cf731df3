use std::sync::OnceLock;

use serde::Serialize;

use crate::algebra::{Field, MultiPoly, Q};
use crate::betti::SectionBetti;
use crate::error::{Error, Result};
use crate::surface::{Axis, Chart, QuarticSurface};
use crate::weierstrass::{FiberModel, Point, WeierstrassFamily};

/// A fibration parameter in one of the two charts of the pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberParam<F> {
    pub chart: Chart,
    pub value: F,
}

impl<F: Field> FiberParam<F> {
    /// The parameter as a point `(t₀ : t₁)` of P¹ with `t = t₀/t₁`.
    pub fn projective(&self) -> (F, F) {
        match self.chart {
            Chart::Finite => (self.value.clone(), F::one()),
            Chart::Infinity => (F::one(), self.value.clone()),
        }
    }
}

/// Positions of (moved, anchor) coordinates for each pencil; the parameter
/// is `p[moved] / p[anchor]` in the finite chart.
fn ratio_slots(axis: Axis) -> (usize, usize) {
    match axis {
        Axis::L1 => (2, 3),
        Axis::L2 => (0, 1),
    }
}

/// A point of the surface with its cached fibration parameters.
#[derive(Clone, Debug)]
pub struct SurfacePoint<F: Field> {
    pub coords: [F; 4],
    /// `f₁(p)`, or `None` on `L1`.
    pub f1: Option<FiberParam<F>>,
    /// `f₂(p)`, or `None` on `L2`.
    pub f2: Option<FiberParam<F>>,
    /// Whether the fiber through `p` is singular, per fibration.
    pub on_singular: [bool; 2],
}

impl<F: Field> SurfacePoint<F> {
    pub fn param(&self, axis: Axis) -> Option<&FiberParam<F>> {
        match axis {
            Axis::L1 => self.f1.as_ref(),
            Axis::L2 => self.f2.as_ref(),
        }
    }

    /// Whether both translations may be attempted at `p`.
    pub fn is_defined(&self) -> bool {
        self.f1.is_some() && self.f2.is_some() && !self.on_singular.iter().any(|&s| s)
    }
}

/// The parameter of `p` under the pencil through `axis`, choosing the
/// finite chart unless its anchor vanishes or (for approximate domains)
/// is smaller than the other coordinate.
pub fn pencil_param<F: Field>(p: &[F; 4], axis: Axis) -> Option<FiberParam<F>> {
    let (moved, anchor) = ratio_slots(axis);
    let (m, a) = (&p[moved], &p[anchor]);
    if m.is_negligible() && a.is_negligible() {
        return None;
    }
    let finite = match (m.magnitude(), a.magnitude()) {
        (Some(mm), Some(aa)) => aa >= mm,
        _ => !a.is_negligible(),
    };
    if finite {
        Some(FiberParam {
            chart: Chart::Finite,
            value: m.clone() * a.inv()?,
        })
    } else {
        Some(FiberParam {
            chart: Chart::Infinity,
            value: a.clone() * m.inv()?,
        })
    }
}

/// Scales projective coordinates: by the largest coordinate for
/// approximate domains, by the last nonzero one otherwise.
pub fn normalize<F: Field>(p: &[F; 4]) -> [F; 4] {
    let pivot = if p.iter().all(|c| c.magnitude().is_some()) {
        (0..4).max_by(|&i, &j| {
            p[i].magnitude()
                .unwrap()
                .total_cmp(&p[j].magnitude().unwrap())
        })
    } else {
        (0..4).rev().find(|&i| !p[i].is_zero())
    };
    match pivot.and_then(|i| p[i].inv()) {
        Some(s) => p.clone().map(|c| c * s.clone()),
        None => p.clone(),
    }
}

/// The surface together with the Weierstrass families of both pencils in
/// both charts.
#[derive(Clone, Debug)]
pub struct DoubleFibration {
    surface: QuarticSurface,
    families: Vec<((Axis, Chart), std::result::Result<WeierstrassFamily, Error>)>,
    betti: [OnceLock<std::result::Result<SectionBetti, Error>>; 4],
}

fn slot(axis: Axis, chart: Chart) -> usize {
    2 * (axis.index() - 1) + usize::from(chart == Chart::Infinity)
}

/// Relative residual below which an approximate point counts as lying on
/// the surface.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

impl DoubleFibration {
    pub fn new(surface: QuarticSurface) -> Result<Self> {
        let mut families = Vec::new();
        for axis in [Axis::L1, Axis::L2] {
            for chart in [Chart::Finite, Chart::Infinity] {
                let fam = surface
                    .residual_cubic(axis, chart)
                    .and_then(|r| WeierstrassFamily::new(&r));
                families.push(((axis, chart), fam));
            }
        }
        for axis in [Axis::L1, Axis::L2] {
            if families.iter().all(|((a, _), f)| *a != axis || f.is_err()) {
                return Err(Error::DegenerateFamily(format!(
                    "no usable chart for the pencil through {axis:?}"
                )));
            }
        }
        Ok(DoubleFibration {
            surface,
            families,
            betti: Default::default(),
        })
    }

    pub fn surface(&self) -> &QuarticSurface {
        &self.surface
    }

    pub fn family(&self, axis: Axis, chart: Chart) -> Result<&WeierstrassFamily> {
        self.families
            .iter()
            .find(|(k, _)| *k == (axis, chart))
            .map(|(_, f)| f.as_ref().map_err(Clone::clone))
            .unwrap()
    }

    /// Numeric Betti evaluator of the section of one chart, built on first use.
    pub fn section_betti(&self, axis: Axis, chart: Chart) -> Result<&SectionBetti> {
        self.betti[slot(axis, chart)]
            .get_or_init(|| self.family(axis, chart).and_then(SectionBetti::from_family))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Distance from a parameter to the singular parameters of its chart.
    pub fn distance_to_singular(
        &self,
        axis: Axis,
        t: &FiberParam<crate::algebra::ComplexApprox>,
    ) -> Result<f64> {
        Ok(self
            .section_betti(axis, t.chart)?
            .distance_to_singular(t.value.value))
    }

    /// Wraps coordinates as a surface point, checking membership (exactly,
    /// or to [`MEMBERSHIP_TOL`] relative accuracy).
    pub fn point<F: Field>(&self, coords: [F; 4]) -> Result<SurfacePoint<F>> {
        let coords = normalize(&coords);
        if coords.iter().all(|c| c.is_negligible()) {
            return Err(Error::InvalidArgument("all coordinates vanish".into()));
        }
        let v = self.surface.form().eval_map(&coords, F::from_q);
        let on = if F::is_exact() {
            v.is_zero()
        } else {
            v.is_negligible()
                || v.magnitude().unwrap_or(f64::INFINITY) <= MEMBERSHIP_TOL * self.scale(&coords)
        };
        if !on {
            return Err(Error::InvalidPoint);
        }
        Ok(self.wrap(coords))
    }

    fn scale<F: Field>(&self, p: &[F; 4]) -> f64 {
        let m = p.iter().filter_map(|c| c.magnitude()).fold(0.0, f64::max);
        let c: f64 = self
            .surface
            .form()
            .terms()
            .map(|(_, c)| crate::algebra::field::q_to_f64(c).abs())
            .sum();
        c * m.powi(4)
    }

    fn wrap<F: Field>(&self, coords: [F; 4]) -> SurfacePoint<F> {
        let f1 = pencil_param(&coords, Axis::L1);
        let f2 = pencil_param(&coords, Axis::L2);
        let sing = |axis: Axis, p: &Option<FiberParam<F>>| match p {
            None => false,
            Some(fp) => match self.family(axis, fp.chart) {
                Ok(fam) => fam
                    .discriminant()
                    .eval_map(&fp.value, F::from_q)
                    .is_negligible(),
                Err(_) => false,
            },
        };
        let on_singular = [sing(Axis::L1, &f1), sing(Axis::L2, &f2)];
        SurfacePoint {
            coords,
            f1,
            f2,
            on_singular,
        }
    }

    /// `σ_i(t)` as a point of the surface (where `M` meets the plane).
    pub fn section_point<F: Field>(
        &self,
        axis: Axis,
        t: &FiberParam<F>,
    ) -> Result<SurfacePoint<F>> {
        let fam = self.family(axis, t.chart)?;
        let r = fam.residual();
        Ok(self.wrap(normalize(&r.to_space(&t.value, &r.section_point(&t.value)))))
    }

    /// The zero point of the fiber (where the other axis line meets the plane).
    pub fn zero_point<F: Field>(&self, axis: Axis, t: &FiberParam<F>) -> Result<SurfacePoint<F>> {
        let fam = self.family(axis, t.chart)?;
        let r = fam.residual();
        Ok(self.wrap(normalize(&r.to_space(&t.value, &r.zero_point()))))
    }

    /// The fiber model used to translate along `axis` at `p`, trying the
    /// other chart when the preferred one degenerates.
    fn fiber_at<F: Field>(
        &self,
        p: &SurfacePoint<F>,
        axis: Axis,
    ) -> Result<(Chart, F, [F; 3], FiberModel<F>)> {
        let fp = p
            .param(axis)
            .ok_or_else(|| Error::UndefinedMap(format!("point lies on the axis line {axis:?}")))?;
        let other = match fp.chart {
            Chart::Finite => Chart::Infinity,
            Chart::Infinity => Chart::Finite,
        };
        let mut last = None;
        for chart in [fp.chart, other] {
            let fam = match self.family(axis, chart) {
                Ok(f) => f,
                Err(e) => {
                    last = Some(e);
                    continue;
                }
            };
            let Some((t, q)) = fam.residual().from_space(&p.coords) else {
                continue;
            };
            match fam.fiber(&t) {
                Ok(model) => return Ok((chart, t, q, model)),
                Err(Error::SingularFiber(m)) => return Err(Error::SingularFiber(m)),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::UndefinedMap("no chart contains the point".into())))
    }

    /// Weierstrass model of the fiber through `p` and the image of `p` on it.
    pub fn to_curve<F: Field>(
        &self,
        p: &SurfacePoint<F>,
        axis: Axis,
    ) -> Result<(FiberModel<F>, Point<F>)> {
        let (_, _, q, model) = self.fiber_at(p, axis)?;
        let pt = model.to_curve(&q).map_err(undefined)?;
        Ok((model, pt))
    }

    /// The fiberwise translation `t_i : p ↦ p + σ_i(f_i(p))`.
    pub fn translate<F: Field>(&self, p: &SurfacePoint<F>, axis: Axis) -> Result<SurfacePoint<F>> {
        self.translate_by(p, axis, 1)
    }

    /// `t_i^k(p)` computed as `p + k·σ_i(f_i(p))` inside one fiber model.
    ///
    /// Over approximate domains the maps are evaluated on the center
    /// values, and the result carries an a-posteriori error: the input
    /// error plus the relative surface residual plus the drift of `f_i`
    /// (worst-case propagation through the reduction overestimates by many
    /// orders of magnitude after a few steps).
    pub fn translate_by<F: Field>(
        &self,
        p: &SurfacePoint<F>,
        axis: Axis,
        k: i64,
    ) -> Result<SurfacePoint<F>> {
        if p.on_singular[axis.index() - 1] {
            return Err(Error::SingularFiber(
                "translation along a singular fiber".into(),
            ));
        }
        if F::is_exact() {
            return self.translate_exact(p, axis, k);
        }
        let input_err = p.coords.iter().map(|c| c.error_bound()).fold(0.0, f64::max);
        let clean = self.wrap(p.coords.clone().map(|c| c.with_error_bound(0.0)));
        let out = self.translate_exact(&clean, axis, k)?;
        let residual = self.relative_residual(&out.coords);
        let drift = match (clean.param(axis), out.param(axis)) {
            (Some(a), Some(b)) if a.chart == b.chart => {
                let d = (a.value.clone() - b.value.clone())
                    .magnitude()
                    .unwrap_or(0.0);
                d / (1.0 + a.value.magnitude().unwrap_or(0.0))
            }
            _ => 0.0,
        };
        let e = input_err + residual + drift + 4.0 * f64::EPSILON;
        Ok(self.wrap(out.coords.map(|c| c.with_error_bound(e))))
    }

    /// `|F(p)| / (Σ|c|·‖p‖⁴)` for approximate points; zero when exact.
    pub fn relative_residual<F: Field>(&self, p: &[F; 4]) -> f64 {
        let v = self.surface.form().eval_map(p, F::from_q);
        match v.magnitude() {
            Some(m) => m / self.scale(p).max(f64::MIN_POSITIVE),
            None => 0.0,
        }
    }

    fn translate_exact<F: Field>(
        &self,
        p: &SurfacePoint<F>,
        axis: Axis,
        k: i64,
    ) -> Result<SurfacePoint<F>> {
        let (chart, t, q, model) = self.fiber_at(p, axis)?;
        let pt = model.to_curve(&q).map_err(undefined)?;
        let shift = model.curve.scalar_mul(k, &model.section)?;
        let moved = model.curve.add(&pt, &shift)?;
        let q2 = model.to_cubic(&moved).map_err(undefined)?;
        let r = self.family(axis, chart)?.residual();
        let out = self.wrap(normalize(&r.to_space(&t, &q2)));
        if out.coords.iter().all(|c| c.is_negligible()) {
            return Err(Error::UndefinedMap(
                "image collapses to zero coordinates".into(),
            ));
        }
        Ok(out)
    }
}

fn undefined(e: Error) -> Error {
    match e {
        Error::ChartDegenerate(m) => Error::UndefinedMap(m),
        e => e,
    }
}

/// `F(b₀u, b₁u, t₀v, t₁v) / (uv)` as the coefficients `[g₀, g₁, g₂]` of
/// `u², uv, v²`: the two points where the fibers `f₂ = (b₀:b₁)` and
/// `f₁ = (t₀:t₁)` meet away from the axis lines are its roots.
pub fn intersection_quadratic<F: Field>(f: &MultiPoly<Q>, b: (&F, &F), t: (&F, &F)) -> [F; 3] {
    let mut c: [F; 5] = std::array::from_fn(|_| F::zero());
    for (e, q) in f.terms() {
        let v = F::from_q(q) * b.0.pow(e[0]) * b.1.pow(e[1]) * t.0.pow(e[2]) * t.1.pow(e[3]);
        let k = (e[0] + e[1]) as usize;
        c[k] = c[k].clone() + v;
    }
    [c[3].clone(), c[2].clone(), c[1].clone()]
}

/// Surface point on the line `{(b₀u, b₁u, t₀v, t₁v)}` at `(u : v)`.
pub fn line_point<F: Field>(b: (&F, &F), t: (&F, &F), u: &F, v: &F) -> [F; 4] {
    [
        b.0.clone() * u.clone(),
        b.1.clone() * u.clone(),
        t.0.clone() * v.clone(),
        t.1.clone() * v.clone(),
    ]
}

/// Relative projective distance `min_λ ‖a − λb‖∞ / ‖a‖∞` for normalized
/// approximate points (both scaled by their largest coordinate).
pub fn projective_distance(
    a: &[crate::algebra::ComplexApprox; 4],
    b: &[crate::algebra::ComplexApprox; 4],
) -> f64 {
    let ia = (0..4)
        .max_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap();
    if b[ia].abs() == 0.0 {
        return f64::INFINITY;
    }
    let lambda = a[ia].value / b[ia].value;
    let na = a[ia].abs();
    (0..4)
        .map(|i| (a[i].value - lambda * b[i].value).norm())
        .fold(0.0, f64::max)
        / na
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PointRecord {
    pub coords: [(f64, f64); 4],
    pub t: Option<(f64, f64, bool)>,
    pub s: Option<(f64, f64, bool)>,
}

impl From<&SurfacePoint<crate::algebra::ComplexApprox>> for PointRecord {
    fn from(p: &SurfacePoint<crate::algebra::ComplexApprox>) -> Self {
        let par = |f: &Option<FiberParam<crate::algebra::ComplexApprox>>| {
            f.as_ref()
                .map(|f| (f.value.re(), f.value.im(), f.chart == Chart::Infinity))
        };
        PointRecord {
            coords: p.coords.map(|c| (c.re(), c.im())),
            t: par(&p.f1),
            s: par(&p.f2),
        }
    }
}
