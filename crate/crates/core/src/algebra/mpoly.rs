//! Sparse multivariate polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, Q};
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// Sparse polynomial in `nvars` variables; exponent vectors map to nonzero
/// coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<F = Q> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, F>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, F::one())
    }

    pub fn monomial(exps: Vec<u32>, c: F) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, F)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> F {
        self.terms.get(exps).cloned().unwrap_or_else(F::zero)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: F) {
        assert_eq!(exps.len(), self.nvars, "exponent arity");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    /// Total degree, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut d = None;
        for e in self.terms.keys() {
            let s: u32 = e.iter().sum();
            if *d.get_or_insert(s) != s {
                return false;
            }
        }
        true
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|(e, v)| (e.clone(), v.clone() * c.clone())),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, F::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                p.add_term(e2, c.clone() * F::from_i64(e[i] as i64));
            }
        }
        p
    }

    pub fn eval(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.nvars);
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m = m * xi.pow(k);
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Evaluates in another domain after mapping the coefficients.
    pub fn eval_map<G: Field>(&self, x: &[G], f: impl Fn(&F) -> G) -> G {
        assert_eq!(x.len(), self.nvars);
        let mut acc = G::zero();
        for (e, c) in &self.terms {
            let mut m = f(c);
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m = m * xi.pow(k);
                }
            }
            acc = acc + m;
        }
        acc
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> MultiPoly<G> {
        MultiPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| (e.clone(), f(c))),
        )
    }

    /// Substitutes polynomials (in a common ring of arity `m`) for every variable.
    pub fn substitute(&self, subs: &[MultiPoly<F>]) -> MultiPoly<F> {
        assert_eq!(subs.len(), self.nvars);
        let m = subs.first().map_or(0, |s| s.nvars);
        let mut cache: Vec<Vec<MultiPoly<F>>> = subs
            .iter()
            .map(|s| vec![MultiPoly::constant(m, F::one()), s.clone()])
            .collect();
        let mut acc = MultiPoly::zero(m);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap() * &subs[i];
                    cache[i].push(next);
                }
                if k > 0 {
                    term = &term * &cache[i][k as usize];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Divides exactly by `x_i^k`; errors when some term has a lower power.
    pub fn div_var_power(&self, i: usize, k: u32) -> Result<Self> {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] < k {
                return Err(Error::InternalConsistency(format!(
                    "polynomial not divisible by x{i}^{k}"
                )));
            }
            let mut e2 = e.clone();
            e2[i] -= k;
            p.add_term(e2, c.clone());
        }
        Ok(p)
    }

    /// Views the polynomial as univariate in `x_i` with coefficients in the
    /// remaining variables (arity unchanged, `x_i` exponent zero).
    pub fn coefficients_in(&self, i: usize) -> Vec<MultiPoly<F>> {
        let d = self.degree_in(i).unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[i] as usize;
            e2[i] = 0;
            out[k].add_term(e2, c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    /// Converts to a univariate polynomial in `x_i`, requiring every other
    /// exponent to vanish.
    pub fn to_univariate(&self, i: usize) -> Result<UPoly<F>> {
        let d = self.degree_in(i).unwrap_or(0) as usize;
        let mut v = vec![F::zero(); d + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(j, &k)| j != i && k != 0) {
                return Err(Error::InvalidArgument(
                    "polynomial is not univariate".into(),
                ));
            }
            v[e[i] as usize] = c.clone();
        }
        Ok(UPoly::new(v))
    }

    pub fn from_univariate(p: &UPoly<F>, nvars: usize, i: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[i] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }
}

impl<F: Field> Add for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn add(self, o: &MultiPoly<F>) -> MultiPoly<F> {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<F: Field> Sub for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn sub(self, o: &MultiPoly<F>) -> MultiPoly<F> {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl<F: Field> Mul for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn mul(self, o: &MultiPoly<F>) -> MultiPoly<F> {
        assert_eq!(self.nvars, o.nvars, "arity mismatch");
        let mut p = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1.clone() * c2.clone());
            }
        }
        p
    }
}

impl<F: Field> Neg for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn neg(self) -> MultiPoly<F> {
        self.scale(&-F::one())
    }
}

impl MultiPoly<Q> {
    pub fn to_string_vars(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| {
                    if *k == 1 {
                        n.to_string()
                    } else {
                        format!("{n}^{k}")
                    }
                })
                .collect();
            let mono = mono.join("*");
            parts.push(if mono.is_empty() {
                format!("{c}")
            } else if Field::is_one(c) {
                mono
            } else {
                format!("{c}*{mono}")
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for MultiPoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.to_string_vars(&refs))
    }
}
