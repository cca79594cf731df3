use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fiberlab::algebra::{ComplexApprox, Field, Q};
use fiberlab::betti::{base_betti_scan, rational_betti_search, CoverOptions, Region, ScanOptions, SectionBetti};
use fiberlab::dynamics::{
    bezout_fiber_check, chart_name, conjugate_control_experiment, fiber_intersection, find_delta,
    finite_orbit_search as search, orbit_grid, torsion_parameters, DoubleFibration, OrbitDomain, OrbitGuards,
    OrbitRecord, SearchOptions, SurfacePoint,
};
use fiberlab::heights::{c_rem, remond_kappa, survey_of_orbits, torsion_order_bound, BoundConstants, BoundReport};
use fiberlab::surface::{build_three_line_quartic, quartic_monomials, Axis, Chart, QuarticSurface};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{CliError, CliResult, OutDir};

pub struct Context {
    pub config: RunConfig,
    pub surface_file: Option<PathBuf>,
    pub out: PathBuf,
}

impl Context {
    fn surface(&self) -> CliResult<QuarticSurface> {
        match &self.surface_file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                QuarticSurface::from_text(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))
            }
            None => Ok(build_three_line_quartic(self.config.surface.seed, self.config.surface.bound)?),
        }
    }

    fn fibration(&self) -> CliResult<DoubleFibration> {
        Ok(DoubleFibration::new(self.surface()?)?)
    }

    /// Opens the output directory and records the effective configuration.
    fn out_dir(&self, surface_id: Option<&str>) -> CliResult<OutDir> {
        let mut o = OutDir::create(&self.out, surface_id)?;
        let mut c = self.config.clone();
        // the directory itself is not part of the experiment
        c.run.out = None;
        o.text("run_config.toml", &c.to_toml())?;
        Ok(o)
    }

    fn tol(&self) -> &crate::config::ToleranceSection {
        &self.config.tolerances
    }
}

fn axis_of(n: u8) -> Axis {
    if n == 1 {
        Axis::L1
    } else {
        Axis::L2
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChartArg {
    Finite,
    Infinity,
}

impl From<ChartArg> for Chart {
    fn from(c: ChartArg) -> Chart {
        match c {
            ChartArg::Finite => Chart::Finite,
            ChartArg::Infinity => Chart::Infinity,
        }
    }
}

fn report(o: &OutDir) {
    for p in &o.written {
        println!("  wrote {}", p.display());
    }
}

fn complex_pair(z: &ComplexApprox) -> (f64, f64) {
    (z.re(), z.im())
}

// ---------------------------------------------------------------- build-surface

#[derive(Serialize)]
struct SurfaceOut {
    seed: Option<u64>,
    bound: Option<u32>,
    monomials: Vec<[u32; 4]>,
    coefficients: Vec<String>,
    lines: Vec<String>,
    smooth: bool,
    along_axes: bool,
    discriminants_ok: bool,
    numeric_ok: bool,
    singular_fiber_counts: [usize; 2],
    min_node_derivative: f64,
}

pub fn build_surface(ctx: &Context) -> CliResult<()> {
    let s = ctx.surface()?;
    let r = s.smoothness()?;
    let built = ctx.surface_file.is_none();
    let body = SurfaceOut {
        seed: built.then_some(ctx.config.surface.seed),
        bound: built.then_some(ctx.config.surface.bound),
        monomials: quartic_monomials(),
        coefficients: s.coefficients().iter().map(|c| c.to_string()).collect(),
        lines: s.lines().iter().map(|l| l.name.clone()).collect(),
        smooth: r.is_smooth(),
        along_axes: r.along_axes,
        discriminants_ok: r.discriminants_ok,
        numeric_ok: r.numeric_ok,
        singular_fiber_counts: r.singular_fiber_counts,
        min_node_derivative: r.min_node_derivative,
    };
    let id = s.id();
    let mut o = ctx.out_dir(Some(&id))?;
    o.text("surface.txt", &s.to_text())?;
    o.json("surface", &body)?;
    println!("surface {id}: {}", if body.smooth { "smooth" } else { "NOT smooth" });
    println!(
        "  singular fibers: {} (f1), {} (f2); min node derivative {:.3e}",
        r.singular_fiber_counts[0], r.singular_fiber_counts[1], r.min_node_derivative
    );
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- fibration-info

#[derive(Serialize)]
struct FamilyOut {
    axis: u8,
    chart: &'static str,
    error: Option<String>,
    a: Option<String>,
    b: Option<String>,
    kappa: Option<String>,
    discriminant: Option<String>,
    discriminant_degree: Option<usize>,
    section_x: Option<String>,
    section_y: Option<String>,
    singular: Vec<SingularOut>,
    singular_at_infinity: usize,
    singular_count: usize,
}

#[derive(Serialize)]
struct SingularOut {
    axis: u8,
    chart: &'static str,
    index: usize,
    t_real: f64,
    t_imag: f64,
    radius: f64,
}

pub fn fibration_info(ctx: &Context) -> CliResult<()> {
    let d = ctx.fibration()?;
    let mut families = Vec::new();
    for axis in [Axis::L1, Axis::L2] {
        for chart in [Chart::Finite, Chart::Infinity] {
            let ax = axis.index() as u8;
            let cn = chart_name(chart);
            let fam = match d.family(axis, chart) {
                Ok(f) => f,
                Err(e) => {
                    families.push(FamilyOut {
                        axis: ax,
                        chart: cn,
                        error: Some(e.to_string()),
                        a: None,
                        b: None,
                        kappa: None,
                        discriminant: None,
                        discriminant_degree: None,
                        section_x: None,
                        section_y: None,
                        singular: Vec::new(),
                        singular_at_infinity: 0,
                        singular_count: 0,
                    });
                    continue;
                }
            };
            let sing = fam.singular_fibers(ctx.tol().precision)?;
            let singular = sing
                .finite
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let (t_real, t_imag) = complex_pair(&r.approx());
                    SingularOut { axis: ax, chart: cn, index: i, t_real, t_imag, radius: r.root().radius }
                })
                .collect();
            families.push(FamilyOut {
                axis: ax,
                chart: cn,
                error: None,
                a: Some(fam.a().to_string_var("t")),
                b: Some(fam.b().to_string_var("t")),
                kappa: Some(fam.kappa().to_string()),
                discriminant: Some(fam.discriminant().to_string_var("t")),
                discriminant_degree: fam.discriminant().degree(),
                section_x: Some(fam.section_x().to_string()),
                section_y: Some(fam.section_y().to_string()),
                singular,
                singular_at_infinity: sing.at_infinity,
                singular_count: sing.count(),
            });
        }
    }
    let id = d.surface().id();
    let mut o = ctx.out_dir(Some(&id))?;
    let rows: Vec<&SingularOut> = families.iter().flat_map(|f| &f.singular).collect();
    o.csv("singular_fibers", &rows, &["axis", "chart", "index", "t_real", "t_imag", "radius"])?;
    o.json("fibration", &serde_json::json!({ "families": families }))?;
    println!("surface {id}");
    for f in &families {
        match &f.error {
            Some(e) => println!("  f{} {:8}: unavailable ({e})", f.axis, f.chart),
            None => println!(
                "  f{} {:8}: deg Δ = {}, #Sing = {}",
                f.axis,
                f.chart,
                f.discriminant_degree.unwrap_or(0),
                f.singular_count
            ),
        }
    }
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- torsion-values

#[derive(Args, Debug)]
pub struct TorsionArgs {
    /// Largest torsion order.
    #[arg(long, default_value_t = 4)]
    pub m: u32,
    /// Section `σ₁` or `σ₂`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub axis: u8,
}

#[derive(Serialize)]
struct TorsionRow {
    order: u32,
    orbit: usize,
    degree: usize,
    minpoly: String,
    t_real: f64,
    t_imag: f64,
    radius: f64,
}

pub fn torsion_values(ctx: &Context, a: &TorsionArgs) -> CliResult<()> {
    if a.m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    let d = ctx.fibration()?;
    let fam = d.family(axis_of(a.axis), Chart::Finite)?;
    let prec = ctx.tol().precision;
    let per_order: Vec<_> = (1..=a.m)
        .into_par_iter()
        .map(|m| fam.torsion_values(m, prec))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for orbits in &per_order {
        for (k, orb) in orbits.iter().enumerate() {
            let minpoly = orb.minpoly.to_string_var("t");
            for c in &orb.conjugates {
                let (t_real, t_imag) = complex_pair(&c.approx());
                rows.push(TorsionRow {
                    order: orb.order,
                    orbit: k,
                    degree: orb.conjugates.len(),
                    minpoly: minpoly.clone(),
                    t_real,
                    t_imag,
                    radius: c.root().radius,
                });
            }
        }
    }
    let survey = survey_of_orbits(&per_order);
    let id = d.surface().id();
    let mut o = ctx.out_dir(Some(&id))?;
    o.csv("torsion_values", &rows, &["order", "orbit", "degree", "minpoly", "t_real", "t_imag", "radius"])?;
    o.csv("heights", &survey.rows, &["order", "minpoly", "height", "height_err", "degree"])?;
    o.json(
        "torsion_values",
        &serde_json::json!({ "axis": a.axis, "m": a.m, "values": rows, "survey": survey }),
    )?;
    println!("surface {id}, section σ{}", a.axis);
    for (orbits, (m, c)) in per_order.iter().zip(&survey.running_max) {
        let n: usize = orbits.iter().map(|o| o.conjugates.len()).sum();
        println!("  order {m}: {n} values in {} orbits; max height so far {c:.6}", orbits.len());
    }
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- betti-scan

#[derive(Args, Debug)]
pub struct BettiArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub axis: u8,
    #[arg(long, value_enum, default_value = "finite")]
    pub chart: ChartArg,
    /// Center of the square search region.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub center: Complex64,
    /// Half side of the square search region.
    #[arg(long, default_value_t = 1.0)]
    pub half: f64,
    #[arg(long)]
    pub qmax: Option<u64>,
    /// Scan the straight path between two parameters instead of searching.
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"], allow_hyphen_values = true)]
    pub path: Option<Vec<Complex64>>,
    /// Number of path samples.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Serialize)]
struct BettiRow {
    t_real: f64,
    t_imag: f64,
    beta1: Option<f64>,
    beta2: Option<f64>,
    q: Option<u64>,
    height: Option<u64>,
    flags: String,
}

pub fn betti_scan(ctx: &Context, a: &BettiArgs) -> CliResult<()> {
    let qmax = a.qmax.unwrap_or(ctx.config.caps.qmax);
    if qmax == 0 || !(a.half > 0.0) || a.samples < 2 {
        return Err(CliError::Usage("need qmax ≥ 1, half > 0 and at least 2 samples".into()));
    }
    let d = ctx.fibration()?;
    let mut sb = SectionBetti::from_family(d.family(axis_of(a.axis), a.chart.into())?)?;
    sb.margin = ctx.tol().sing_margin;
    sb.disc_margin = ctx.tol().disc_margin;
    let (mode, rows): (&str, Vec<BettiRow>) = match &a.path {
        Some(p) => {
            let (from, to) = (p[0], p[1]);
            let n = a.samples;
            let path: Vec<Complex64> = (0..n).map(|k| from + (to - from) * (k as f64 / (n - 1) as f64)).collect();
            let rows = base_betti_scan(&sb, &path, ScanOptions { qmax, ..ScanOptions::default() })?
                .into_iter()
                .map(|s| BettiRow {
                    t_real: s.t_re,
                    t_imag: s.t_im,
                    beta1: s.betti.map(|b| b.b1),
                    beta2: s.betti.map(|b| b.b2),
                    q: s.hit.as_ref().map(|h| h.q),
                    height: s.hit.as_ref().map(|h| h.height),
                    flags: s.flags,
                })
                .collect();
            ("path", rows)
        }
        None => {
            let hits = rational_betti_search(&sb, Region::square(a.center, a.half), qmax, CoverOptions::default());
            let rows = hits
                .into_iter()
                .map(|h| BettiRow {
                    t_real: h.t_re,
                    t_imag: h.t_im,
                    beta1: Some(h.betti.b1),
                    beta2: Some(h.betti.b2),
                    q: Some(h.hit.q),
                    height: Some(h.hit.height),
                    flags: "hit".into(),
                })
                .collect();
            ("region", rows)
        }
    };
    let mut by_q: BTreeMap<u64, usize> = BTreeMap::new();
    for r in &rows {
        if let Some(q) = r.q {
            *by_q.entry(q).or_default() += 1;
        }
    }
    let near = rows.iter().filter(|r| r.flags == "near-singular").count();
    let id = d.surface().id();
    let mut o = ctx.out_dir(Some(&id))?;
    o.csv("betti_scan", &rows, &["t_real", "t_imag", "β1", "β2", "q", "H", "flags"])?;
    o.json(
        "betti_scan",
        &serde_json::json!({
            "axis": a.axis,
            "chart": chart_name(a.chart.into()),
            "mode": mode,
            "center": [a.center.re, a.center.im],
            "half": a.half,
            "path": a.path.as_ref().map(|p| p.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
            "qmax": qmax,
            "sing_margin": sb.margin,
            "disc_margin": sb.disc_margin,
            "rows": rows.len(),
            "near_singular": near,
            "hits_by_q": by_q,
        }),
    )?;
    println!("surface {id}, section σ{} ({mode} scan, qmax {qmax})", a.axis);
    for (q, n) in &by_q {
        println!("  q = {q}: {n} rational Betti values");
    }
    if near > 0 {
        println!("  {near} samples near singular fibers");
    }
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- orbit

#[derive(Args, Debug)]
pub struct OrbitArgs {
    /// Projective coordinates `x,y,z,w` (complex numbers like `1-2i`, or
    /// fractions with `--exact`).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "params", required_unless_present = "params")]
    pub point: Option<String>,
    /// `t,s,branch`: the point with `f₁ = t`, `f₂ = s` on intersection branch 0 or 1.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Exact rational arithmetic (requires `--point` with fractions).
    #[arg(long, conflicts_with = "params")]
    pub exact: bool,
    #[arg(long, default_value_t = 4)]
    pub r1max: u32,
    #[arg(long, default_value_t = 4)]
    pub r2max: u32,
    #[arg(long)]
    pub height_cap: Option<f64>,
}

#[derive(Serialize)]
struct OrbitRow {
    r1: u32,
    r2: u32,
    x_re: f64,
    x_im: f64,
    y_re: f64,
    y_im: f64,
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
    height: f64,
    error: f64,
}

fn parse_list<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> CliResult<Vec<T>> {
    let v: Vec<T> = s
        .split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("cannot parse {what} `{s}`")))?;
    if v.len() != n {
        return Err(CliError::Usage(format!("{what} needs {n} comma-separated values")));
    }
    Ok(v)
}

fn run_orbit<F: OrbitDomain>(ctx: &Context, d: &DoubleFibration, p: &SurfacePoint<F>, a: &OrbitArgs) -> OrbitRecord {
    let mut g = OrbitGuards { same_tol: ctx.tol().tol, bad_margin: ctx.tol().sing_margin, ..OrbitGuards::default() };
    if let Some(h) = a.height_cap {
        g.height_cap = h;
    }
    orbit_grid(d, p, a.r1max, a.r2max, &g)
}

pub fn orbit(ctx: &Context, a: &OrbitArgs) -> CliResult<()> {
    let d = ctx.fibration()?;
    let rec = if a.exact {
        let s = a.point.as_deref().unwrap_or_default();
        let v: Vec<Q> = parse_list(s, 4, "point")?;
        let p = d.point([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])?;
        run_orbit(ctx, &d, &p, a)
    } else {
        let coords: [ComplexApprox; 4] = match (&a.point, &a.params) {
            (Some(s), _) => {
                let v: Vec<Complex64> = parse_list(s, 4, "point")?;
                std::array::from_fn(|i| ComplexApprox::new(v[i].re, v[i].im, 0.0))
            }
            (None, Some(s)) => {
                let v: Vec<String> = parse_list(s, 3, "params")?;
                let z = |x: &str| x.parse::<Complex64>().map_err(|_| CliError::Usage(format!("bad parameter `{x}`")));
                let (t, s) = (z(&v[0])?, z(&v[1])?);
                let branch: usize = v[2].parse().map_err(|_| CliError::Usage("branch must be 0 or 1".into()))?;
                let one = ComplexApprox::one();
                let sc = ComplexApprox::new(s.re, s.im, 0.0);
                let tc = ComplexApprox::new(t.re, t.im, 0.0);
                let pts = fiber_intersection(d.surface().form(), (&sc, &one), (&tc, &one));
                pts.get(branch).cloned().ok_or_else(|| {
                    CliError::Usage(format!("the fibers meet in {} points off the axes; branch {branch} is missing", pts.len()))
                })?
            }
            (None, None) => return Err(CliError::Usage("give --point or --params".into())),
        };
        let p = d.point(coords)?;
        run_orbit(ctx, &d, &p, a)
    };
    let rows: Vec<OrbitRow> = rec
        .entries
        .iter()
        .map(|e| {
            let c = e.point.coords;
            OrbitRow {
                r1: e.r1,
                r2: e.r2,
                x_re: c[0].0,
                x_im: c[0].1,
                y_re: c[1].0,
                y_im: c[1].1,
                z_re: c[2].0,
                z_im: c[2].1,
                w_re: c[3].0,
                w_im: c[3].1,
                height: e.height,
                error: e.error,
            }
        })
        .collect();
    let id = d.surface().id();
    let mut o = ctx.out_dir(Some(&id))?;
    o.csv(
        "orbit",
        &rows,
        &["r1", "r2", "x_re", "x_im", "y_re", "y_im", "z_re", "z_im", "w_re", "w_im", "height", "error"],
    )?;
    o.json(
        "orbit",
        &serde_json::json!({ "exact": a.exact, "r1max": a.r1max, "r2max": a.r2max, "record": rec }),
    )?;
    println!("surface {id}: orbit status {}", rec.status.as_str());
    println!("  {} grid points, {} distinct", rec.entries.len(), rec.distinct);
    if let Some(m) = rec.t2_period {
        println!("  t2 period {m}");
    }
    if let Some(g) = &rec.guard {
        println!("  stopped: {g}");
    }
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- finite-orbit-search

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Torsion order cap `N`.
    #[arg(long)]
    pub order_cap: Option<u32>,
    #[arg(long)]
    pub m_max: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
}

pub fn finite_orbit_search(ctx: &Context, a: &SearchArgs) -> CliResult<()> {
    let caps = &ctx.config.caps;
    let mut opts = SearchOptions::new(a.order_cap.unwrap_or(caps.order_cap));
    opts.m_max = a.m_max.unwrap_or(caps.m_max);
    opts.n_max = a.n_max.unwrap_or(caps.n_max);
    opts.precision = ctx.tol().precision;
    if opts.order_cap == 0 || opts.m_max == 0 || opts.n_max == 0 {
        return Err(CliError::Usage("caps must be at least 1".into()));
    }
    let d = ctx.fibration()?;
    let cat = search(&d, &opts)?;
    let mut o = ctx.out_dir(None)?;
    o.json("catalog", &cat)?;
    println!("surface {}: finite-orbit search with N = {}", cat.surface_id, opts.order_cap);
    println!(
        "  {} σ2 orbits × {} σ1 orbits, {} points examined",
        cat.b_orbits, cat.t_orbits, cat.examined
    );
    println!("  certified {}, listed {}", cat.certified().count(), cat.entries.len());
    for (reason, n) in &cat.rejected {
        println!("  rejected {n}: {reason}");
    }
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- bounds

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1)]
    pub g: u32,
    /// Degree of the field of definition.
    #[arg(long, default_value_t = 1)]
    pub d: u64,
    /// Height of the abelian variety.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub h: f64,
    /// Constants `c`, `C` of the height term `c·h + C`.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long = "cc", default_value_t = 0.0, allow_hyphen_values = true)]
    pub cc: f64,
    /// Include the exact decimal values in the JSON.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Serialize)]
struct BoundRow {
    quantity: &'static str,
    g: u32,
    d: u64,
    h: f64,
    max_term: f64,
    exponent: u64,
    log10: f64,
    digits: Option<usize>,
    leading_digits: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

fn bound_row(quantity: &'static str, r: &BoundReport, exact: bool) -> BoundRow {
    let s = r.exact.as_ref().map(|n| n.to_string());
    BoundRow {
        quantity,
        g: r.g,
        d: r.d,
        h: r.h,
        max_term: r.max_term,
        exponent: r.exponent,
        log10: r.log10,
        digits: s.as_ref().map(|s| s.len()),
        leading_digits: s.as_ref().map(|s| s.chars().take(20).collect()),
        exact: if exact { s } else { None },
    }
}

pub fn bounds(ctx: &Context, a: &BoundsArgs) -> CliResult<()> {
    if a.g == 0 || a.d == 0 || !a.h.is_finite() {
        return Err(CliError::Usage("need g ≥ 1, d ≥ 1 and a finite h".into()));
    }
    let t = torsion_order_bound(a.g, a.d, a.h, BoundConstants { c: a.c, cc: a.cc });
    let r = remond_kappa(a.g, a.d, a.h);
    let rows = vec![
        bound_row("torsion_order_bound", &t, a.exact),
        bound_row("remond_kappa", &r.kappa, a.exact),
        bound_row("remond_exponent_bound", &r.exponent_bound, a.exact),
        bound_row("remond_cardinality_bound", &r.cardinality_bound, a.exact),
    ];
    let mut o = ctx.out_dir(None)?;
    let header = ["quantity", "g", "d", "h", "max_term", "exponent", "log10", "digits", "leading_digits"];
    let csv_rows: Vec<_> = rows
        .iter()
        .map(|r| (r.quantity, r.g, r.d, r.h, r.max_term, r.exponent, r.log10, r.digits, r.leading_digits.clone()))
        .collect();
    o.csv("bounds", &csv_rows, &header)?;
    o.json("bounds", &serde_json::json!({ "c": a.c, "cc": a.cc, "c_rem": c_rem(a.g), "rows": rows }))?;
    println!("bounds for g = {}, d = {}, h = {}", a.g, a.d, a.h);
    println!("  {:<26} {:>12} {:>16}", "quantity", "exponent", "log10");
    for r in &rows {
        println!("  {:<26} {:>12} {:>16.1}", r.quantity, r.exponent, r.log10);
    }
    println!("  C_Rém({}) = {}", a.g, c_rem(a.g));
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- conjugate-control

#[derive(Args, Debug)]
pub struct ConjugateArgs {
    #[arg(long)]
    pub order_cap: Option<u32>,
    /// Restrict to one section; both by default.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub axis: Option<u8>,
    #[arg(long, default_value_t = 8)]
    pub min_degree: usize,
    /// Starting δ (default: the configured one).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Required share of conjugates at distance ≥ δ.
    #[arg(long, default_value_t = 0.75)]
    pub target: f64,
    #[arg(long, default_value_t = 30)]
    pub refinements: u32,
    /// Extra points of the bad locus, in the finite chart.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub exclude: Vec<Complex64>,
}

#[derive(Serialize)]
struct ConjugateRow {
    axis: u8,
    order: u32,
    chart: &'static str,
    degree: usize,
    minpoly: String,
    delta: f64,
    fraction: f64,
    fraction_at_start: f64,
    halvings: u32,
    min_distance: f64,
    reached: bool,
}

pub fn conjugate_control(ctx: &Context, a: &ConjugateArgs) -> CliResult<()> {
    let cap = a.order_cap.unwrap_or(ctx.config.caps.order_cap);
    let start = a.delta.unwrap_or(ctx.tol().delta);
    if cap == 0 || !(start > 0.0) || !(a.target > 0.0 && a.target <= 1.0) {
        return Err(CliError::Usage("need order cap ≥ 1, δ > 0 and 0 < target ≤ 1".into()));
    }
    let d = ctx.fibration()?;
    let axes: Vec<u8> = a.axis.map_or(vec![1, 2], |x| vec![x]);
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for ax in axes {
        for tp in torsion_parameters(&d, axis_of(ax), cap, ctx.tol().precision)? {
            if tp.degree() < a.min_degree {
                continue;
            }
            let c = conjugate_control_experiment(&d, &tp, &a.exclude)?;
            let s = find_delta(&c, start, a.target, a.refinements)?;
            rows.push(ConjugateRow {
                axis: ax,
                order: c.order,
                chart: chart_name(tp.chart),
                degree: c.degree,
                minpoly: c.minpoly.clone(),
                delta: s.delta,
                fraction: s.fraction,
                fraction_at_start: s.fraction_at_start,
                halvings: s.halvings,
                min_distance: c.distances.iter().cloned().fold(f64::INFINITY, f64::min),
                reached: s.fraction >= a.target,
            });
            details.push(serde_json::json!({ "control": c, "search": s }));
        }
    }
    let id = d.surface().id();
    let mut o = ctx.out_dir(Some(&id))?;
    let header = [
        "axis", "order", "chart", "degree", "minpoly", "delta", "fraction", "fraction_at_start", "halvings",
        "min_distance", "reached",
    ];
    o.csv("conjugate_control", &rows, &header)?;
    o.json(
        "conjugate_control",
        &serde_json::json!({
            "order_cap": cap, "min_degree": a.min_degree, "start_delta": start, "target": a.target,
            "excluded": a.exclude.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "rows": rows, "details": details,
        }),
    )?;
    let reached = rows.iter().filter(|r| r.reached).count();
    println!(
        "surface {id}: {} torsion values of degree ≥ {} up to order {cap}, {reached} with fraction ≥ {}",
        rows.len(),
        a.min_degree,
        a.target
    );
    for r in &rows {
        println!(
            "  σ{} order {} degree {:>3} ({}): δ = {:.4e}, fraction {:.3}",
            r.axis, r.order, r.degree, r.chart, r.delta, r.fraction
        );
    }
    report(&o);
    Ok(())
}

// ---------------------------------------------------------------- bezout-check

#[derive(Args, Debug)]
pub struct BezoutArgs {
    /// Number of random fibers.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Bound on numerator and denominator of the random parameters.
    #[arg(long, default_value_t = 20)]
    pub height: i64,
}

/// `count` distinct random parameters `p/q` with `|p|, q ≤ height`, avoiding
/// singular `f₂`-fibers.
pub fn random_parameters(d: &DoubleFibration, seed: u64, count: usize, height: i64) -> CliResult<Vec<Q>> {
    let disc = d.family(Axis::L2, Chart::Finite)?.discriminant();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 100 * count + 100 {
            return Err(CliError::Usage(format!("cannot draw {count} distinct parameters of height ≤ {height}")));
        }
        let p = rng.gen_range(-height..=height);
        let q = rng.gen_range(1..=height);
        let s = Q::new(p.into(), q.into());
        if disc.eval(&s).is_zero() || !seen.insert(s.clone()) {
            continue;
        }
        out.push(s);
    }
    Ok(out)
}

pub fn bezout_check(ctx: &Context, a: &BezoutArgs) -> CliResult<()> {
    if a.count == 0 || a.height < 1 {
        return Err(CliError::Usage("need count ≥ 1 and height ≥ 1".into()));
    }
    let d = ctx.fibration()?;
    let params = random_parameters(&d, ctx.config.surface.seed, a.count, a.height)?;
    let reports: Vec<_> =
        params.par_iter().map(|s| bezout_fiber_check(&d, s)).collect::<Result<_, _>>()?;
    let id = d.surface().id();
    let mut o = ctx.out_dir(Some(&id))?;
    let header = [
        "s", "n_singular", "count", "bound", "pass", "elimination_degree", "at_infinity", "distinct",
        "numeric_verified",
    ];
    o.csv("bezout", &reports, &header)?;
    o.json("bezout", &serde_json::json!({ "seed": ctx.config.surface.seed, "height": a.height, "fibers": reports }))?;
    println!("surface {id}: {} random f2 fibers", reports.len());
    for r in &reports {
        println!(
            "  s = {:>8}: {} ≤ {} ({}), {} verified numerically",
            r.s,
            r.count,
            r.bound,
            if r.pass { "ok" } else { "FAIL" },
            r.numeric_verified
        );
    }
    report(&o);
    if let Some(r) = reports.iter().find(|r| !r.pass) {
        return Err(CliError::Lib(fiberlab::Error::InternalConsistency(format!(
            "intersection count {} exceeds 9·#Sing = {} over s = {}",
            r.count, r.bound, r.s
        ))));
    }
    Ok(())
}
