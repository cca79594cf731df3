//! Floating complex numbers with a conservatively propagated absolute error.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::field::{q_to_f64, Field, Q};

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug)]
pub struct ComplexApprox {
    pub value: Complex64,
    /// Upper bound on the distance to the true value.
    pub err: f64,
}

impl ComplexApprox {
    pub fn new(re: f64, im: f64, err: f64) -> Self {
        debug_assert!(err >= 0.0);
        ComplexApprox {
            value: Complex64::new(re, im),
            err,
        }
    }

    pub fn exact(z: Complex64) -> Self {
        ComplexApprox { value: z, err: 0.0 }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    pub fn abs(&self) -> f64 {
        self.value.norm()
    }

    /// True when zero lies within the error disc.
    pub fn contains_zero(&self) -> bool {
        self.value.norm() <= self.err
    }

    pub fn conj(&self) -> Self {
        ComplexApprox {
            value: self.value.conj(),
            err: self.err,
        }
    }

    pub fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        // |√a − √b| ≤ |a − b| / (|√a| + |√b|), and ≤ √|a − b| always
        let err = if r.norm() > 0.0 {
            (self.err / r.norm()).min(self.err.sqrt())
        } else {
            self.err.sqrt()
        };
        ComplexApprox {
            value: r,
            err: err + ulp(r.norm()),
        }
    }

    pub fn with_err(mut self, err: f64) -> Self {
        self.err = err;
        self
    }

    pub fn scale(&self, k: f64) -> Self {
        ComplexApprox {
            value: self.value * k,
            err: self.err * k.abs() + ulp(self.value.norm() * k.abs()),
        }
    }
}

fn ulp(mag: f64) -> f64 {
    2.0 * EPS * mag
}

impl PartialEq for ComplexApprox {
    fn eq(&self, o: &Self) -> bool {
        self.value == o.value
    }
}

impl Add for ComplexApprox {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let v = self.value + o.value;
        ComplexApprox {
            value: v,
            err: self.err + o.err + ulp(v.norm()),
        }
    }
}

impl Sub for ComplexApprox {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let v = self.value - o.value;
        ComplexApprox {
            value: v,
            err: self.err + o.err + ulp(v.norm()),
        }
    }
}

impl Mul for ComplexApprox {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let v = self.value * o.value;
        let err = self.value.norm() * o.err + o.value.norm() * self.err + self.err * o.err;
        ComplexApprox {
            value: v,
            err: err + 2.0 * ulp(self.value.norm() * o.value.norm()),
        }
    }
}

impl Neg for ComplexApprox {
    type Output = Self;
    fn neg(self) -> Self {
        ComplexApprox {
            value: -self.value,
            err: self.err,
        }
    }
}

impl Field for ComplexApprox {
    fn zero() -> Self {
        Self::exact(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Self::exact(Complex64::new(1.0, 0.0))
    }
    fn from_q(q: &Q) -> Self {
        let v = q_to_f64(q);
        ComplexApprox {
            value: Complex64::new(v, 0.0),
            err: ulp(v.abs()) / 2.0,
        }
    }
    fn is_zero(&self) -> bool {
        self.value.re == 0.0 && self.value.im == 0.0
    }
    fn is_exact() -> bool {
        false
    }
    fn is_negligible(&self) -> bool {
        self.contains_zero()
    }
    fn magnitude(&self) -> Option<f64> {
        Some(self.value.norm())
    }
    fn error_bound(&self) -> f64 {
        self.err
    }
    fn with_error_bound(&self, err: f64) -> Self {
        ComplexApprox {
            value: self.value,
            err,
        }
    }
    fn inv(&self) -> Option<Self> {
        let n = self.value.norm();
        if n == 0.0 {
            return None;
        }
        let v = self.value.inv();
        let err = if self.err < n {
            self.err / (n * (n - self.err))
        } else {
            f64::INFINITY
        };
        Some(ComplexApprox {
            value: v,
            err: err + 2.0 * ulp(v.norm()),
        })
    }
}

impl fmt::Display for ComplexApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{:+}i ± {:.1e}",
            self.value.re, self.value.im, self.err
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_grows_conservatively() {
        let a = ComplexApprox::new(1.0, 0.0, 1e-10);
        let b = ComplexApprox::new(0.0, 2.0, 1e-10);
        let p = a * b;
        assert!(p.err >= 3e-10);
        let i = b.inv().unwrap();
        assert!((i.value - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!(i.err > 0.0);
        assert!(ComplexApprox::new(1e-12, 0.0, 1e-11).contains_zero());
    }
}
