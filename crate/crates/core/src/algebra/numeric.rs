//! Uncertified double-precision helpers used for cross-checks and orbit
//! arithmetic. Nothing here is used to decide an exact statement on its own.

use num_complex::Complex64;

/// Evaluates `Σ c_k z^k` (coefficients low to high).
pub fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of `Σ c_k z^k` by Aberth–Ehrlich iteration; trailing
/// zero coefficients are dropped first. Multiple roots come out as clusters.
pub fn roots_c64(c: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = c.to_vec();
    while c.last().is_some_and(|a| a.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lc = c[n];
    let c: Vec<Complex64> = c.iter().map(|a| a / lc).collect();
    // Cauchy-type bound for the starting circle
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let r0 = radius.min(
        c[..n]
            .iter()
            .enumerate()
            .map(|(k, a)| 2.0 * a.norm().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-3),
    );
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                r0,
                2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner_with_derivative(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots() {
        // (z − 1)(z + 2)(z − i)
        let i = Complex64::new(0.0, 1.0);
        let expect = [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), i];
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for r in expect {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (k, a) in poly.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            poly = next;
        }
        let z = roots_c64(&poly);
        for r in expect {
            assert!(z.iter().any(|w| (w - r).norm() < 1e-12));
        }
    }
}
