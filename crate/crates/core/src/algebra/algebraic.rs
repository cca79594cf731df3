//! Algebraic numbers: an irreducible minimal polynomial plus a certified
//! isolating disc designating one of its roots.

use std::fmt;
use std::sync::Arc;

use super::complex_approx::ComplexApprox;
use super::ext::Ext;
use super::factor::irreducible_factors;
use super::field::{q_to_f64, Q};
use super::roots::{isolate_squarefree, sort_roots, IsolatedRoot, RootOptions};
use super::upoly::UPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    minpoly: UPoly<Q>,
    root: IsolatedRoot,
    /// Position among the roots of `minpoly` in lexicographic
    /// (real, imaginary) order, fixed at creation.
    index: usize,
}

impl AlgebraicNumber {
    pub fn from_rational(q: &Q) -> Self {
        let mp = UPoly::new(vec![-q.clone(), Q::from_integer(1.into())]).primitive();
        let roots = isolate_squarefree(&mp, RootOptions::default()).expect("linear root");
        AlgebraicNumber {
            minpoly: mp,
            root: roots[0].clone(),
            index: 0,
        }
    }

    /// All roots of an irreducible polynomial, in designation order.
    pub fn conjugates_of(minpoly: &UPoly<Q>, precision: f64) -> Result<Vec<AlgebraicNumber>> {
        let mp = minpoly.primitive();
        if mp.is_constant() {
            return Err(Error::InvalidArgument("constant minimal polynomial".into()));
        }
        let mut roots = isolate_squarefree(
            &mp,
            RootOptions {
                precision,
                ..Default::default()
            },
        )?;
        sort_roots(&mut roots);
        Ok(roots
            .into_iter()
            .enumerate()
            .map(|(index, root)| AlgebraicNumber {
                minpoly: mp.clone(),
                root,
                index,
            })
            .collect())
    }

    /// All distinct roots of an arbitrary nonzero polynomial, grouped by
    /// irreducible factor.
    pub fn roots_of(f: &UPoly<Q>, precision: f64) -> Result<Vec<AlgebraicNumber>> {
        let mut out = Vec::new();
        for g in irreducible_factors(f)? {
            out.extend(Self::conjugates_of(&g, precision)?);
        }
        Ok(out)
    }

    pub fn minpoly(&self) -> &UPoly<Q> {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn root(&self) -> &IsolatedRoot {
        &self.root
    }

    pub fn is_real(&self) -> bool {
        self.root.real
    }

    pub fn approx(&self) -> ComplexApprox {
        match self.as_rational() {
            Some(q) => {
                let v = q_to_f64(&q);
                ComplexApprox::new(v, 0.0, f64::EPSILON * v.abs())
            }
            None => self.root.approx(),
        }
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.degree() == 1 {
            let c = self.minpoly.coeffs();
            Some(-c[0].clone() / c[1].clone())
        } else {
            None
        }
    }

    /// Shrinks the isolating disc to radius ≤ `precision` without changing
    /// which root is designated.
    pub fn refine(&self, precision: f64) -> Result<AlgebraicNumber> {
        if self.root.radius <= precision {
            return Ok(self.clone());
        }
        let roots = isolate_squarefree(
            &self.minpoly,
            RootOptions {
                precision,
                ..Default::default()
            },
        )?;
        let (c0, r0) = (self.root.approx().value, self.root.radius);
        let found = roots
            .into_iter()
            .find(|r| (r.approx().value - c0).norm() <= r0 + r.radius)
            .ok_or_else(|| {
                Error::InternalConsistency("refined root left its isolating disc".into())
            })?;
        Ok(AlgebraicNumber {
            minpoly: self.minpoly.clone(),
            root: found,
            index: self.index,
        })
    }

    /// The exact field ℚ(α) generated by this number, with α itself.
    pub fn field_generator(&self) -> Ext<Q> {
        Ext::generator(&Arc::new(self.minpoly.monic()))
    }

    /// Naive absolute logarithmic height: log of the Mahler measure over the degree.
    pub fn height(&self) -> f64 {
        let c = self.minpoly.primitive_int();
        let lc = super::field::ln_abs_int(c.last().unwrap());
        let mut m = lc;
        // all conjugates: reuse the isolation of the full minimal polynomial
        if let Ok(all) = isolate_squarefree(
            &self.minpoly,
            RootOptions {
                precision: 1e-12,
                ..Default::default()
            },
        ) {
            for r in all {
                let a = r.approx().abs();
                if a > 1.0 {
                    m += a.ln();
                }
            }
        }
        m / self.degree() as f64
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.minpoly == o.minpoly && self.index == o.index
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        write!(
            f,
            "root #{} of {} ≈ {}",
            self.index,
            self.minpoly.to_string_var("t"),
            self.approx()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::qi;

    #[test]
    fn designation_is_stable() {
        let f = UPoly::from_ints(&[-2, 0, 1]);
        let r = AlgebraicNumber::conjugates_of(&f, 1e-6).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].approx().re() < 0.0);
        let fine = r[1].refine(1e-30).unwrap();
        assert_eq!(fine.index(), 1);
        assert!((fine.approx().re() - 2f64.sqrt()).abs() < 1e-15);
        assert!((r[1].height() - 0.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rational_roots() {
        let f = &UPoly::from_ints(&[-3, 1]) * &UPoly::from_ints(&[1, 0, 1]);
        let r = AlgebraicNumber::roots_of(&f, 1e-10).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0].as_rational(), Some(qi(3)));
    }
}
