//! Certified isolation of the complex roots of rational polynomials.
//!
//! Approximations come from Aberth–Ehrlich iteration in [`MpC`]. They are
//! certified with the inclusion discs `D(z_i, n·|W_i|)`, where
//! `W_i = f(z_i) / (lc · ∏_{j≠i} (z_i − z_j))`: when those discs are pairwise
//! disjoint each contains exactly one root. `f(z_i)` and the differences are
//! evaluated exactly on dyadic centers; only the final magnitudes pass
//! through `f64` logarithms, which is absorbed by a relative safety margin.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;

use super::complex_approx::ComplexApprox;
use super::field::Q;
use super::mp::{Mp, MpC, EXACT};
use super::numeric::roots_c64;
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// Relative inflation applied to certified radii.
const SAFETY: f64 = 1e-8;

/// Default cap on the working precision in bits.
pub const DEFAULT_PREC_CAP: u64 = 16_384;

/// A root of a polynomial, certified to lie alone (among the roots of its
/// square-free part) in the disc `D(center, radius)`.
#[derive(Clone, Debug)]
pub struct IsolatedRoot {
    pub center: MpC,
    pub radius: f64,
    pub multiplicity: u32,
    /// Certified real (the isolating disc is symmetric about ℝ).
    pub real: bool,
}

impl IsolatedRoot {
    pub fn approx(&self) -> ComplexApprox {
        let (re, im) = self.center.to_f64();
        let rounding = f64::EPSILON * (re.abs() + im.abs());
        ComplexApprox::new(re, if self.real { 0.0 } else { im }, self.radius + rounding)
    }

    pub fn re(&self) -> f64 {
        self.center.re.to_f64()
    }

    pub fn im(&self) -> f64 {
        if self.real {
            0.0
        } else {
            self.center.im.to_f64()
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Target radius for every isolating disc.
    pub precision: f64,
    /// Working precision cap in bits.
    pub prec_cap: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            precision: 1e-12,
            prec_cap: DEFAULT_PREC_CAP,
        }
    }
}

/// All complex roots of `f` with multiplicities (summing to `deg f`), each in
/// a certified disc of radius ≤ `precision`.
pub fn isolate_roots(f: &UPoly<Q>, precision: f64) -> Result<Vec<IsolatedRoot>> {
    isolate_roots_with(
        f,
        RootOptions {
            precision,
            ..Default::default()
        },
    )
}

pub fn isolate_roots_with(f: &UPoly<Q>, opts: RootOptions) -> Result<Vec<IsolatedRoot>> {
    if !(opts.precision > 0.0) {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    if f.is_zero() {
        return Err(Error::InvalidArgument(
            "cannot isolate roots of the zero polynomial".into(),
        ));
    }
    let mut out = Vec::new();
    for (g, k) in f.squarefree_decomposition() {
        for mut r in isolate_squarefree(&g, opts)? {
            r.multiplicity = k;
            out.push(r);
        }
    }
    sort_roots(&mut out);
    Ok(out)
}

/// Sorts lexicographically by (real part, imaginary part) of the centers.
pub fn sort_roots(v: &mut [IsolatedRoot]) {
    v.sort_by(|a, b| {
        a.re()
            .partial_cmp(&b.re())
            .unwrap()
            .then(a.im().partial_cmp(&b.im()).unwrap())
    });
}

/// Roots of a square-free polynomial (multiplicity field set to 1).
pub fn isolate_squarefree(f: &UPoly<Q>, opts: RootOptions) -> Result<Vec<IsolatedRoot>> {
    let ints = f.primitive_int();
    let n = ints.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        let root = Q::new(-ints[0].clone(), ints[1].clone());
        let c = Mp::from_q(&root, 256.max(bits_for(opts.precision)));
        let err = (Mp::from_parts(BigInt::from(1), c.log2_floor() - 250))
            .to_f64()
            .abs();
        let exact = c.to_q() == root;
        return Ok(vec![IsolatedRoot {
            center: MpC::new(c, Mp::zero()),
            radius: if exact { 0.0 } else { err },
            multiplicity: 1,
            real: true,
        }]);
    }
    let mut prec = 64u64.max(bits_for(opts.precision));
    let mut z = initial_guesses(f, n);
    loop {
        z = aberth(&ints, z, prec);
        if let Some(cert) = certify(&ints, &z) {
            if cert.iter().all(|r| r.radius <= opts.precision) {
                return Ok(cert);
            }
        }
        if prec >= opts.prec_cap {
            return Err(Error::PrecisionExhausted {
                bits: prec as u32,
                context: format!("root isolation of a degree-{n} polynomial"),
            });
        }
        prec = (prec * 2).min(opts.prec_cap);
        z = z.into_iter().map(|c| c.round(prec)).collect();
    }
}

fn bits_for(precision: f64) -> u64 {
    (-precision.log2()).max(0.0).ceil() as u64 + 16
}

/// Starting points from a double-precision Aberth run on the coefficients
/// normalized by the largest one; falls back to a circle when that fails.
fn initial_guesses(f: &UPoly<Q>, n: usize) -> Vec<MpC> {
    let ints = f.primitive_int();
    let logs: Vec<f64> = ints
        .iter()
        .map(|a| Mp::from_parts(a.clone(), 0).ln_abs())
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let normalized: Vec<Complex64> = ints
        .iter()
        .zip(&logs)
        .map(|(a, l)| {
            let s = if a.sign() == Sign::Minus { -1.0 } else { 1.0 };
            Complex64::new(
                if *l == f64::NEG_INFINITY {
                    0.0
                } else {
                    s * (l - top).exp()
                },
                0.0,
            )
        })
        .collect();
    let z = roots_c64(&normalized);
    if z.len() == n && z.iter().all(|w| w.is_finite()) {
        return z.into_iter().map(|w| MpC::from_f64(w.re, w.im)).collect();
    }
    circle_guesses(f, n)
}

fn circle_guesses(f: &UPoly<Q>, n: usize) -> Vec<MpC> {
    let r = f.root_bound().max(1e-3);
    let r = if r.is_finite() { r } else { 1e300 };
    (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            let rr = r * (0.5 + 0.5 * ((k * 7 % 13) as f64) / 13.0);
            MpC::from_f64(rr * th.cos(), rr * th.sin())
        })
        .collect()
}

/// Horner evaluation of `f` and `f'` at `z`.
fn eval_with_derivative(c: &[Mp], z: &MpC, prec: u64) -> (MpC, MpC) {
    let mut p = MpC::new(c[c.len() - 1].clone(), Mp::zero());
    let mut d = MpC::zero();
    for a in c.iter().rev().skip(1) {
        d = d.mul(z, prec).add(&p, prec);
        p = p.mul(z, prec).add(&MpC::new(a.clone(), Mp::zero()), prec);
    }
    (p, d)
}

/// Exact value of the integer polynomial at a dyadic point.
fn eval_exact(c: &[BigInt], z: &MpC) -> MpC {
    let mut p = MpC::new(Mp::from_parts(c[c.len() - 1].clone(), 0), Mp::zero());
    for a in c.iter().rev().skip(1) {
        p = p
            .mul(z, EXACT)
            .add(&MpC::new(Mp::from_parts(a.clone(), 0), Mp::zero()), EXACT);
    }
    p
}

fn aberth(ints: &[BigInt], mut z: Vec<MpC>, prec: u64) -> Vec<MpC> {
    let coeffs: Vec<Mp> = ints
        .iter()
        .map(|a| Mp::from_parts(a.clone(), 0).round(prec + 32))
        .collect();
    let n = z.len();
    let one = MpC::from_f64(1.0, 0.0);
    let tol = -(prec as f64) + 8.0;
    let mut done = vec![false; n];
    let mut last_step = vec![f64::INFINITY; n];
    let mut stalls = vec![0u32; n];
    for _iter in 0..(100 + n) {
        let mut moved = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, d) = eval_with_derivative(&coeffs, &z[i], prec);
            if p.is_zero() {
                done[i] = true;
                continue;
            }
            if d.is_zero() {
                // nudge off a critical point
                z[i] = z[i].add(&MpC::from_f64(1e-3, 1e-3), prec);
                moved = true;
                continue;
            }
            let ratio = p.div(&d, prec);
            let mut s = MpC::zero();
            for j in 0..n {
                if j != i {
                    let diff = z[i].sub(&z[j], prec);
                    if diff.is_zero() {
                        continue;
                    }
                    s = s.add(&one.div(&diff, prec), prec);
                }
            }
            let denom = one.sub(&ratio.mul(&s, prec), prec);
            let w = if denom.is_zero() {
                ratio.clone()
            } else {
                ratio.div(&denom, prec)
            };
            z[i] = z[i].sub(&w, prec);
            let scale = z[i].ln_abs().max(-700.0 * std::f64::consts::LN_2);
            let rel = w.ln_abs() - scale;
            // converged, or stalled at the rounding floor (certification
            // then decides whether more bits are needed)
            if rel > last_step[i] - std::f64::consts::LN_2
                && rel < 0.5 * tol * std::f64::consts::LN_2
            {
                stalls[i] += 1;
            } else {
                stalls[i] = 0;
            }
            if rel < tol * std::f64::consts::LN_2 || stalls[i] >= 4 {
                done[i] = true;
            } else {
                moved = true;
            }
            last_step[i] = rel;
        }
        if !moved {
            break;
        }
    }
    z
}

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Certifies approximations; `None` if the discs are not disjoint.
fn certify(ints: &[BigInt], z: &[MpC]) -> Option<Vec<IsolatedRoot>> {
    let n = z.len();
    let ln_lc = Mp::from_parts(ints[n].clone(), 0).ln_abs();
    let mut lnd = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = z[i].sub(&z[j], EXACT).ln_abs();
            if d == f64::NEG_INFINITY {
                return None;
            }
            lnd[i][j] = d;
            lnd[j][i] = d;
        }
    }
    let ln_n = (n as f64).ln();
    let mut ln_r = vec![0.0; n];
    for i in 0..n {
        let v = eval_exact(ints, &z[i]).ln_abs();
        let sum: f64 = (0..n).filter(|&j| j != i).map(|j| lnd[i][j]).sum();
        ln_r[i] = if v == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            v - ln_lc - sum + ln_n + SAFETY
        };
    }
    let disjoint = |ln_r: &[f64], i: usize, j: usize, lnd_ij: f64| {
        logaddexp(ln_r[i], ln_r[j]) + SAFETY < lnd_ij
    };
    for i in 0..n {
        for j in (i + 1)..n {
            if !disjoint(&ln_r, i, j, lnd[i][j]) {
                return None;
            }
        }
    }
    let mut out: Vec<IsolatedRoot> = (0..n)
        .map(|i| IsolatedRoot {
            center: z[i].clone(),
            radius: ln_r[i].exp(),
            multiplicity: 1,
            real: false,
        })
        .collect();
    // Realness: widen a disc that meets ℝ to one centered on ℝ; if it stays
    // disjoint from the others its unique root equals its own conjugate.
    {
        for i in 0..n {
            let im = out[i].center.im.to_f64().abs();
            if im <= out[i].radius {
                let new_r = out[i].radius + im + f64::EPSILON * im;
                let re_c = MpC::new(out[i].center.re.clone(), Mp::zero());
                let ok = (0..n).filter(|&j| j != i).all(|j| {
                    let d = re_c.sub(&out[j].center, EXACT).ln_abs();
                    logaddexp(new_r.ln(), out[j].radius.ln()) + SAFETY < d
                });
                if ok {
                    out[i].center = re_c;
                    out[i].radius = new_r;
                    out[i].real = true;
                }
            }
        }
    }
    Some(out)
}

/// Evaluates `|f|` bounds on a disc by the centered form: returns
/// `(|f(c)|, Σ_{k≥1} |f^{(k)}(c)|/k! · r^k)`; the disc image contains 0 only if
/// the first does not exceed the second.
pub fn disc_image_bounds(f: &UPoly<Q>, c: &MpC, r: f64) -> (f64, f64) {
    let prec = 256;
    // Taylor shift: coefficients of f(c + h)
    let mut coeffs: Vec<MpC> = f.coeffs().iter().map(|q| MpC::from_q(q, prec)).collect();
    let n = coeffs.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = coeffs[j + 1].mul(c, prec);
            coeffs[j] = coeffs[j].add(&t, prec);
        }
    }
    let f0 = coeffs[0].ln_abs().exp();
    let mut tail = 0.0;
    for (k, a) in coeffs.iter().enumerate().skip(1) {
        tail += (a.ln_abs() + k as f64 * r.ln()).exp();
    }
    (f0, tail * (1.0 + 1e-10) + 1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UPoly<Q> {
        UPoly::from_ints(c)
    }

    #[test]
    fn i_and_minus_i() {
        let r = isolate_roots(&p(&[1, 0, 1]), 1e-10).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].im() + 1.0).abs() < 1e-10 && r[0].re().abs() < 1e-10);
        assert!((r[1].im() - 1.0).abs() < 1e-10);
        assert!(r.iter().all(|x| x.radius <= 1e-10 && !x.real));
    }

    #[test]
    fn triple_root() {
        let r = isolate_roots(&p(&[-1, 3, -3, 1]), 1e-6).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert!((r[0].re() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plastic_number() {
        // bisection oracle on x³ − x − 1 over [1, 2]
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * mid - mid - 1.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let r = isolate_roots(&p(&[-1, -1, 0, 1]), 1e-12).unwrap();
        let reals: Vec<_> = r.iter().filter(|x| x.real).collect();
        assert_eq!(reals.len(), 1);
        assert!((reals[0].re() - lo).abs() < 1e-12);
        assert!((reals[0].re() - 1.3247179572).abs() < 1e-10);
    }

    #[test]
    fn invalid_precision() {
        assert!(isolate_roots(&p(&[1, 1]), 0.0).is_err());
        assert!(isolate_roots(&p(&[1, 1]), -1.0).is_err());
    }

    #[test]
    fn clustered_roots_need_more_bits() {
        // (x − 1)(x − 1 − 2^-80)
        let e = Q::new(BigInt::from(1), BigInt::from(1) << 80u32);
        let one = Q::from_integer(BigInt::from(1));
        let f = &UPoly::new(vec![-one.clone(), one.clone()])
            * &UPoly::new(vec![-(one.clone() + e), one]);
        let r = isolate_roots(&f, 1e-30).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.real));
    }
}
