//! Residual cubics of the pencils of planes through `L1` and `L2`.
//!
//! | axis | chart    | plane          | plane coords | zero point | section point |
//! |------|----------|----------------|--------------|------------|---------------|
//! | L1   | finite   | `z = t·w`      | `(x, y, w)`  | `(0,0,1)`  | `(t,1,1)`     |
//! | L1   | infinity | `w = t·z`      | `(x, y, z)`  | `(0,0,1)`  | `(1,t,1)`     |
//! | L2   | finite   | `x = t·y`      | `(y, z, w)`  | `(1,0,0)`  | `(1,t,1)`     |
//! | L2   | infinity | `y = t·x`      | `(x, z, w)`  | `(1,0,0)`  | `(1,1,t)`     |
//!
//! The zero point is where the other axis line meets the plane and the
//! section point is where `M` meets it. On `L1` the fibration is `t = z/w`;
//! on `L2` it is `t = x/y`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::QuarticSurface;
use crate::algebra::numeric::roots_c64;
use crate::algebra::{Field, MultiPoly, UPoly, Q};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    L1,
    L2,
}

impl Axis {
    /// Fibration index: 1 for `L1`, 2 for `L2`.
    pub fn index(self) -> usize {
        match self {
            Axis::L1 => 1,
            Axis::L2 => 2,
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::L1 => Axis::L2,
            Axis::L2 => Axis::L1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    Finite,
    Infinity,
}

/// Positions in `(x, y, z, w)`: (the coordinate replaced by `t·(anchor)`,
/// the anchor, the plane coordinates).
fn layout(axis: Axis, chart: Chart) -> (usize, usize, [usize; 3]) {
    match (axis, chart) {
        (Axis::L1, Chart::Finite) => (2, 3, [0, 1, 3]),
        (Axis::L1, Chart::Infinity) => (3, 2, [0, 1, 2]),
        (Axis::L2, Chart::Finite) => (0, 1, [1, 2, 3]),
        (Axis::L2, Chart::Infinity) => (1, 0, [0, 2, 3]),
    }
}

/// The plane cubics `C_t` residual to an axis line, in one chart of the
/// pencil parameter. Stored as a polynomial in `(p0, p1, p2, t)`.
#[derive(Clone, Debug)]
pub struct ResidualCubicFamily {
    pub axis: Axis,
    pub chart: Chart,
    cubic: MultiPoly<Q>,
}

impl ResidualCubicFamily {
    pub fn new(s: &QuarticSurface, axis: Axis, chart: Chart) -> Result<Self> {
        let (moved, anchor, plane) = layout(axis, chart);
        // target ring (p0, p1, p2, t)
        let var = |i| MultiPoly::<Q>::var(4, i);
        let mut subs = vec![MultiPoly::zero(4); 4];
        for (k, &pos) in plane.iter().enumerate() {
            subs[pos] = var(k);
        }
        let anchor_slot = plane.iter().position(|&p| p == anchor).unwrap();
        subs[moved] = &var(3) * &var(anchor_slot);
        let g = s.form().substitute(&subs);
        let cubic = g.div_var_power(anchor_slot, 1).map_err(|_| {
            Error::InternalConsistency("quartic does not vanish on the axis line".into())
        })?;
        let fam = ResidualCubicFamily { axis, chart, cubic };
        for (e, _) in fam.cubic.terms() {
            if e[0] + e[1] + e[2] != 3 {
                return Err(Error::InternalConsistency(
                    "residual curve is not a plane cubic".into(),
                ));
            }
        }
        Ok(fam)
    }

    /// `C` as a polynomial in `(p0, p1, p2, t)`.
    pub fn cubic(&self) -> &MultiPoly<Q> {
        &self.cubic
    }

    /// Coefficients of the plane monomials as polynomials in `t`.
    pub fn coefficient_polys(&self) -> BTreeMap<[u32; 3], UPoly<Q>> {
        let mut out: BTreeMap<[u32; 3], Vec<Q>> = BTreeMap::new();
        for (e, c) in self.cubic.terms() {
            let v = out.entry([e[0], e[1], e[2]]).or_default();
            let k = e[3] as usize;
            if v.len() <= k {
                v.resize(k + 1, <Q as Field>::zero());
            }
            v[k] = c.clone();
        }
        out.into_iter().map(|(k, v)| (k, UPoly::new(v))).collect()
    }

    /// `C_t` at a parameter value in any coefficient domain.
    pub fn at<F: Field>(&self, t: &F) -> MultiPoly<F> {
        let mut out = MultiPoly::zero(3);
        for (e, c) in self.cubic.terms() {
            out.add_term(vec![e[0], e[1], e[2]], F::from_q(c) * t.pow(e[3]));
        }
        out
    }

    /// `∂C/∂t` at a parameter value.
    pub fn t_derivative_at<F: Field>(&self, t: &F) -> MultiPoly<F> {
        let mut out = MultiPoly::zero(3);
        for (e, c) in self.cubic.terms() {
            if e[3] > 0 {
                out.add_term(
                    vec![e[0], e[1], e[2]],
                    F::from_q(c) * F::from_i64(e[3] as i64) * t.pow(e[3] - 1),
                );
            }
        }
        out
    }

    /// Plane coordinates of the marked zero point (the other axis line).
    pub fn zero_point<F: Field>(&self) -> [F; 3] {
        match self.axis {
            Axis::L1 => [F::zero(), F::zero(), F::one()],
            Axis::L2 => [F::one(), F::zero(), F::zero()],
        }
    }

    /// Plane coordinates of the point cut by `M`.
    pub fn section_point<F: Field>(&self, t: &F) -> [F; 3] {
        match (self.axis, self.chart) {
            (Axis::L1, Chart::Finite) => [t.clone(), F::one(), F::one()],
            (Axis::L1, Chart::Infinity) | (Axis::L2, Chart::Finite) => {
                [F::one(), t.clone(), F::one()]
            }
            (Axis::L2, Chart::Infinity) => [F::one(), F::one(), t.clone()],
        }
    }

    /// Index of the plane coordinate carrying the zero point; the marked
    /// point sits at the corresponding unit vector.
    pub fn zero_slot(&self) -> usize {
        match self.axis {
            Axis::L1 => 2,
            Axis::L2 => 0,
        }
    }

    /// Plane point to P³.
    pub fn to_space<F: Field>(&self, t: &F, p: &[F; 3]) -> [F; 4] {
        let (moved, anchor, plane) = layout(self.axis, self.chart);
        let mut out: [F; 4] = std::array::from_fn(|_| F::zero());
        for (k, &pos) in plane.iter().enumerate() {
            out[pos] = p[k].clone();
        }
        out[moved] = t.clone() * out[anchor].clone();
        out
    }

    /// P³ point to (parameter, plane point) in this chart; `None` when the
    /// point is not in the chart (its anchor coordinate vanishes).
    pub fn from_space<F: Field>(&self, p: &[F; 4]) -> Option<(F, [F; 3])> {
        let (moved, anchor, plane) = layout(self.axis, self.chart);
        if p[anchor].is_negligible() {
            return None;
        }
        let ia = p[anchor].inv()?;
        let t = p[moved].clone() * ia;
        Some((t, plane.map(|i| p[i].clone())))
    }

    /// The binary cubic `C_t` restricted to the axis line (the plane
    /// coordinates other than the anchor), coefficients of `u³, u²v, uv², v³`.
    pub fn axis_restriction<F: Field>(&self, t: &F) -> [F; 4] {
        let c = self.at(t);
        let (_, anchor, plane) = layout(self.axis, self.chart);
        let slot = plane.iter().position(|&p| p == anchor).unwrap();
        let others: Vec<usize> = (0..3).filter(|&i| i != slot).collect();
        std::array::from_fn(|k| {
            let mut e = [0u32; 3];
            e[others[0]] = 3 - k as u32;
            e[others[1]] = k as u32;
            c.coeff(&e)
        })
    }

    /// Intersection of `C_t` with the axis line.
    pub fn trisection_points(&self, t: &Q) -> Result<Trisection> {
        let form = self.axis_restriction(t);
        if form.iter().all(Field::is_zero) {
            return Err(Error::ReducibleFiber);
        }
        // roots of a u³ + b u²v + c uv² + d v³ in u/v; v = 0 counts separately
        let poly = UPoly::new(vec![
            form[3].clone(),
            form[2].clone(),
            form[1].clone(),
            form[0].clone(),
        ]);
        let deg = poly.degree().unwrap_or(0);
        let mut points = Vec::new();
        for (g, k) in poly.squarefree_decomposition() {
            let coeffs: Vec<Complex64> = g
                .coeffs()
                .iter()
                .map(|c| Complex64::new(crate::algebra::field::q_to_f64(c), 0.0))
                .collect();
            for r in roots_c64(&coeffs) {
                points.push(TrisectionPoint {
                    ratio: Some(r),
                    multiplicity: k,
                });
            }
        }
        if deg < 3 {
            points.push(TrisectionPoint {
                ratio: None,
                multiplicity: (3 - deg) as u32,
            });
        }
        let disc = binary_cubic_discriminant(&form);
        Ok(Trisection {
            form,
            points,
            discriminant: disc,
        })
    }
}

/// One point of `C_t ∩ axis`: `ratio` is `u/v` in the axis coordinates, or
/// `None` for `v = 0`.
#[derive(Clone, Debug)]
pub struct TrisectionPoint {
    pub ratio: Option<Complex64>,
    pub multiplicity: u32,
}

#[derive(Clone, Debug)]
pub struct Trisection {
    pub form: [Q; 4],
    pub points: Vec<TrisectionPoint>,
    pub discriminant: Q,
}

impl Trisection {
    pub fn total_multiplicity(&self) -> u32 {
        self.points.iter().map(|p| p.multiplicity).sum()
    }
}

/// Discriminant of `a u³ + b u²v + c uv² + d v³`.
pub fn binary_cubic_discriminant(f: &[Q; 4]) -> Q {
    let [a, b, c, d] = f;
    let k = |n: i64| Q::from_integer(n.into());
    b * b * c * c - k(4) * a * c * c * c - k(4) * b * b * b * d - k(27) * a * a * d * d
        + k(18) * a * b * c * d
}
