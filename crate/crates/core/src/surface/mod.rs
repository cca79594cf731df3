//! Quartic surfaces in P³ containing three pairwise skew lines, and the two
//! elliptic pencils cut out by the planes through the first two lines.
//!
//! Coordinates are `(x, y, z, w)`. The lines are fixed:
//! `L1 = {z = w = 0}`, `L2 = {x = y = 0}` and `M = {x = z, y = w}`.

mod pencil;
mod smooth;

use std::fmt::Write as _;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{linalg, qi, Field, MultiPoly, Q};
use crate::error::{Error, Result};

pub use pencil::{Axis, Chart, ResidualCubicFamily, Trisection, TrisectionPoint};
pub use smooth::{
    axis_forms, discriminant_polynomial, projected_quartic, quartic_invariants,
    zero_point_expansion, SmoothnessReport,
};

/// A line in P³ given by two linear forms and two spanning points.
#[derive(Clone, Debug, PartialEq)]
pub struct Line3 {
    pub name: String,
    pub forms: [[Q; 4]; 2],
    pub points: [[Q; 4]; 2],
}

fn ints4(v: [i64; 4]) -> [Q; 4] {
    v.map(qi)
}

fn dot(a: &[Q; 4], b: &[Q; 4]) -> Q {
    a.iter()
        .zip(b)
        .fold(<Q as Field>::zero(), |s, (x, y)| s + x * y)
}

impl Line3 {
    pub fn new(name: &str, forms: [[Q; 4]; 2], points: [[Q; 4]; 2]) -> Result<Self> {
        let l = Line3 {
            name: name.to_string(),
            forms,
            points,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn l1() -> Self {
        Line3 {
            name: "L1".into(),
            forms: [ints4([0, 0, 1, 0]), ints4([0, 0, 0, 1])],
            points: [ints4([1, 0, 0, 0]), ints4([0, 1, 0, 0])],
        }
    }

    pub fn l2() -> Self {
        Line3 {
            name: "L2".into(),
            forms: [ints4([1, 0, 0, 0]), ints4([0, 1, 0, 0])],
            points: [ints4([0, 0, 1, 0]), ints4([0, 0, 0, 1])],
        }
    }

    pub fn m() -> Self {
        Line3 {
            name: "M".into(),
            forms: [ints4([1, 0, -1, 0]), ints4([0, 1, 0, -1])],
            points: [ints4([1, 0, 1, 0]), ints4([0, 1, 0, 1])],
        }
    }

    fn validate(&self) -> Result<()> {
        let rows = |v: &[[Q; 4]; 2]| v.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
        if linalg::rank(&rows(&self.forms)) != 2 || linalg::rank(&rows(&self.points)) != 2 {
            return Err(Error::InvalidArgument(format!(
                "line {} is degenerate",
                self.name
            )));
        }
        if self
            .forms
            .iter()
            .any(|f| self.points.iter().any(|p| !Field::is_zero(&dot(f, p))))
        {
            return Err(Error::InvalidArgument(format!(
                "parameterization of {} does not satisfy its forms",
                self.name
            )));
        }
        Ok(())
    }

    /// The point `u·P + v·Q` of the parameterization.
    pub fn point(&self, u: &Q, v: &Q) -> [Q; 4] {
        std::array::from_fn(|i| u * &self.points[0][i] + v * &self.points[1][i])
    }

    /// Two lines are skew iff their four forms are independent.
    pub fn is_skew_to(&self, other: &Line3) -> bool {
        let m: Vec<Vec<Q>> = self
            .forms
            .iter()
            .chain(&other.forms)
            .map(|r| r.to_vec())
            .collect();
        linalg::rank(&m) == 4
    }

    /// `F(u·P + v·Q)` as the coefficients of `u^4, u^3v, …, v^4`.
    pub fn restrict(&self, f: &MultiPoly<Q>) -> [Q; 5] {
        let mut out: [Q; 5] = std::array::from_fn(|_| <Q as Field>::zero());
        let uv: Vec<MultiPoly<Q>> = (0..4)
            .map(|i| {
                MultiPoly::from_terms(
                    2,
                    [
                        (vec![1, 0], self.points[0][i].clone()),
                        (vec![0, 1], self.points[1][i].clone()),
                    ],
                )
            })
            .collect();
        let r = f.substitute(&uv);
        for (e, c) in r.terms() {
            out[e[1] as usize] = c.clone();
        }
        out
    }
}

/// Exponent vectors of the 35 quartic monomials in `x, y, z, w`, in
/// lexicographic order with `x > y > z > w` (so `x^4` first, `w^4` last).
pub fn quartic_monomials() -> Vec<[u32; 4]> {
    let mut v = Vec::with_capacity(35);
    for a in (0..=4u32).rev() {
        for b in (0..=4 - a).rev() {
            for c in (0..=4 - a - b).rev() {
                v.push([a, b, c, 4 - a - b - c]);
            }
        }
    }
    v
}

/// A smooth quartic surface together with the lines `L1`, `L2`, `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticSurface {
    f: MultiPoly<Q>,
    lines: [Line3; 3],
}

impl QuarticSurface {
    /// Wraps a quartic form, checking the line conditions (not smoothness;
    /// see [`QuarticSurface::smoothness`]).
    pub fn new(f: MultiPoly<Q>) -> Result<Self> {
        if f.nvars() != 4 || f.total_degree() != Some(4) || !f.is_homogeneous() {
            return Err(Error::InvalidArgument(
                "expected a quartic form in x, y, z, w".into(),
            ));
        }
        let s = QuarticSurface {
            f,
            lines: [Line3::l1(), Line3::l2(), Line3::m()],
        };
        for l in &s.lines {
            if s.lines_condition(l).iter().any(|c| !Field::is_zero(c)) {
                return Err(Error::InvalidArgument(format!(
                    "F does not vanish on {}",
                    l.name
                )));
            }
        }
        Ok(s)
    }

    fn lines_condition(&self, l: &Line3) -> [Q; 5] {
        l.restrict(&self.f)
    }

    pub fn form(&self) -> &MultiPoly<Q> {
        &self.f
    }

    pub fn lines(&self) -> &[Line3; 3] {
        &self.lines
    }

    /// The 35 coefficients in [`quartic_monomials`] order.
    pub fn coefficients(&self) -> Vec<Q> {
        quartic_monomials()
            .iter()
            .map(|e| self.f.coeff(e))
            .collect()
    }

    pub fn from_coefficients(c: &[Q]) -> Result<Self> {
        if c.len() != 35 {
            return Err(Error::InvalidArgument(format!(
                "expected 35 coefficients, got {}",
                c.len()
            )));
        }
        let f = MultiPoly::from_terms(
            4,
            quartic_monomials()
                .into_iter()
                .zip(c)
                .map(|(e, v)| (e.to_vec(), v.clone())),
        );
        Self::new(f)
    }

    pub fn contains(&self, p: &[Q; 4]) -> bool {
        Field::is_zero(&self.f.eval(p))
    }

    pub fn pairwise_skew(&self) -> bool {
        let [a, b, c] = &self.lines;
        a.is_skew_to(b) && a.is_skew_to(c) && b.is_skew_to(c)
    }

    pub fn residual_cubic(&self, axis: Axis, chart: Chart) -> Result<ResidualCubicFamily> {
        ResidualCubicFamily::new(self, axis, chart)
    }

    /// Exact smoothness test with a numeric cross-check; see the `smooth`
    /// module docs for the criterion.
    pub fn smoothness(&self) -> Result<SmoothnessReport> {
        smooth::check(self)
    }

    /// Stable short identifier derived from the text serialization.
    pub fn id(&self) -> String {
        // FNV-1a, 64 bit
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_text().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Text format: a header line, one `coeff` line per monomial in
    /// [`quartic_monomials`] order (exponents then value), and one `line`
    /// line per line (name, the two forms, the two spanning points).
    pub fn to_text(&self) -> String {
        let mut s = String::from("fiberlab-quartic 1\n");
        for (e, c) in quartic_monomials().iter().zip(self.coefficients()) {
            writeln!(s, "coeff {} {} {} {} {}", e[0], e[1], e[2], e[3], c).unwrap();
        }
        for l in &self.lines {
            let join = |v: &[Q; 4]| {
                v.iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(
                s,
                "line {} {} | {} | {} | {}",
                l.name,
                join(&l.forms[0]),
                join(&l.forms[1]),
                join(&l.points[0]),
                join(&l.points[1])
            )
            .unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("fiberlab-quartic 1") {
            return Err(Error::Parse("missing header `fiberlab-quartic 1`".into()));
        }
        let parse_q = |s: &str| {
            s.parse::<Q>()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))
        };
        let mut coeffs = Vec::new();
        let mut read_lines = Vec::new();
        for l in lines {
            let mut parts = l.split_whitespace();
            match parts.next() {
                Some("coeff") => {
                    let rest: Vec<&str> = parts.collect();
                    if rest.len() != 5 {
                        return Err(Error::Parse(format!("bad coefficient line `{l}`")));
                    }
                    let e: Vec<u32> = rest[..4]
                        .iter()
                        .map(|x| {
                            x.parse()
                                .map_err(|_| Error::Parse(format!("bad exponent in `{l}`")))
                        })
                        .collect::<Result<_>>()?;
                    let expect = quartic_monomials()
                        .get(coeffs.len())
                        .copied()
                        .ok_or_else(|| Error::Parse("too many coefficients".into()))?;
                    if e != expect {
                        return Err(Error::Parse(format!("monomial out of order in `{l}`")));
                    }
                    coeffs.push(parse_q(rest[4])?);
                }
                Some("line") => {
                    let name = parts
                        .next()
                        .ok_or_else(|| Error::Parse("line without a name".into()))?;
                    let rest: Vec<&str> = parts.collect();
                    let groups: Vec<&[&str]> = rest.split(|s| *s == "|").collect();
                    if groups.len() != 4 || groups.iter().any(|g| g.len() != 4) {
                        return Err(Error::Parse(format!("bad line record `{l}`")));
                    }
                    let vec4 = |g: &[&str]| -> Result<[Q; 4]> {
                        let v: Vec<Q> = g.iter().map(|s| parse_q(s)).collect::<Result<_>>()?;
                        Ok(v.try_into().unwrap())
                    };
                    read_lines.push(Line3::new(
                        name,
                        [vec4(groups[0])?, vec4(groups[1])?],
                        [vec4(groups[2])?, vec4(groups[3])?],
                    )?);
                }
                _ => return Err(Error::Parse(format!("unrecognized record `{l}`"))),
            }
        }
        let s = Self::from_coefficients(&coeffs)?;
        if read_lines.len() != 3 {
            return Err(Error::Parse("expected three line records".into()));
        }
        for (got, want) in read_lines.iter().zip(&s.lines) {
            if got != want {
                return Err(Error::UnsupportedDomain(format!(
                    "line {} differs from the fixed configuration",
                    got.name
                )));
            }
        }
        Ok(s)
    }
}

/// Integer basis of the quartics vanishing on `L1`, `L2`, `M`, as coefficient
/// vectors in [`quartic_monomials`] order, and the pivot structure used to
/// sample from it.
pub fn linear_system() -> Vec<Vec<Q>> {
    let mons = quartic_monomials();
    let mut rows = Vec::new();
    for l in [Line3::l1(), Line3::l2(), Line3::m()] {
        let per_mon: Vec<[Q; 5]> = mons
            .iter()
            .map(|e| l.restrict(&MultiPoly::monomial(e.to_vec(), qi(1))))
            .collect();
        for k in 0..5 {
            rows.push(per_mon.iter().map(|r| r[k].clone()).collect::<Vec<Q>>());
        }
    }
    linalg::kernel(&rows, mons.len())
}

/// Counts of failed checks while sampling surfaces.
#[derive(Clone, Debug, Default)]
pub struct BuildDiagnostics {
    pub attempts: usize,
    pub out_of_bound: usize,
    pub not_smooth_along_axis: usize,
    pub discriminant_degenerate: usize,
    pub numeric_disagreement: usize,
}

impl BuildDiagnostics {
    fn summary(&self) -> String {
        let mut v = [
            ("coefficient out of bound", self.out_of_bound),
            ("singular along an axis line", self.not_smooth_along_axis),
            (
                "discriminant not square-free of degree 24",
                self.discriminant_degenerate,
            ),
            ("numeric node check disagreed", self.numeric_disagreement),
        ];
        v.sort_by(|a, b| b.1.cmp(&a.1));
        let parts: Vec<String> = v
            .iter()
            .filter(|x| x.1 > 0)
            .map(|(n, c)| format!("{n}: {c}"))
            .collect();
        format!("{} attempts; {}", self.attempts, parts.join(", "))
    }
}

pub const DEFAULT_ATTEMPT_CAP: usize = 200;

/// Seed and coefficient bound of the sample surface used throughout the
/// tests and as the CLI default.
pub const SAMPLE_SEED: u64 = 1;
pub const SAMPLE_BOUND: u32 = 2;

pub fn sample_surface() -> Result<QuarticSurface> {
    build_three_line_quartic(SAMPLE_SEED, SAMPLE_BOUND)
}

/// Deterministically samples a smooth quartic through `L1`, `L2`, `M` whose
/// coefficients lie in `[−bound, bound]`.
///
/// Free coefficients of the linear system are drawn uniformly; the dependent
/// ones follow, and the draw is rejected if one leaves the range.
pub fn build_three_line_quartic(seed: u64, bound: u32) -> Result<QuarticSurface> {
    build_with_cap(seed, bound, DEFAULT_ATTEMPT_CAP)
}

pub fn build_with_cap(seed: u64, bound: u32, cap: usize) -> Result<QuarticSurface> {
    if bound == 0 {
        return Err(Error::InvalidArgument("bound must be at least 1".into()));
    }
    let basis = linear_system();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diag = BuildDiagnostics::default();
    let b = bound as i64;
    while diag.attempts < cap {
        diag.attempts += 1;
        let mut coeffs = vec![<Q as Field>::zero(); 35];
        let mut inside = true;
        for _ in 0..64 {
            coeffs = vec![<Q as Field>::zero(); 35];
            for v in &basis {
                let r = qi(rng.gen_range(-b..=b));
                for (c, x) in coeffs.iter_mut().zip(v) {
                    *c += &r * x;
                }
            }
            let bq = qi(b);
            inside =
                coeffs.iter().all(|c| c.abs() <= bq) && coeffs.iter().any(|c| !Field::is_zero(c));
            if inside {
                break;
            }
            diag.out_of_bound += 1;
        }
        if !inside {
            continue;
        }
        let s = QuarticSurface::from_coefficients(&coeffs)?;
        match s.smoothness() {
            Ok(rep) if rep.is_smooth() => return Ok(s),
            Ok(rep) => {
                if !rep.along_axes {
                    diag.not_smooth_along_axis += 1;
                } else if !rep.discriminants_ok {
                    diag.discriminant_degenerate += 1;
                } else {
                    diag.numeric_disagreement += 1;
                }
            }
            Err(Error::PrecisionExhausted { .. }) => diag.numeric_disagreement += 1,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ConstructionFailed {
        attempts: diag.attempts as u32,
        diagnostics: diag.summary(),
    })
}
