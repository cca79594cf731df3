//! Factorization of rational polynomials into irreducibles (Zassenhaus:
//! modular factorization, Hensel lifting, recombination).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::Q;
use super::upoly::{int_primitive, int_trim, UPoly};
use crate::error::{Error, Result};

/// Largest number of recombination subsets tried before giving up.
const MAX_SUBSETS: usize = 2_000_000;

// ---------------------------------------------------------------------------
// Arithmetic in F_p[x] (coefficients low → high, p < 2^31)
// ---------------------------------------------------------------------------

type Pp = Vec<u64>;

fn pp_trim(a: &mut Pp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pp_mul(a: &Pp, b: &Pp, p: u64) -> Pp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            v[i + j] = (v[i + j] + x * y) % p;
        }
    }
    pp_trim(&mut v);
    v
}

fn pp_sub(a: &Pp, b: &Pp, p: u64) -> Pp {
    let n = a.len().max(b.len());
    let mut v: Pp = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    pp_trim(&mut v);
    v
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn pp_divrem(a: &Pp, b: &Pp, p: u64) -> (Pp, Pp) {
    let mut r = a.clone();
    pp_trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db] * inv % p;
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + p - c * bj % p) % p;
            }
        }
    }
    r.truncate(db);
    pp_trim(&mut r);
    pp_trim(&mut q);
    (q, r)
}

fn pp_rem(a: &Pp, b: &Pp, p: u64) -> Pp {
    pp_divrem(a, b, p).1
}

fn pp_monic(a: &Pp, p: u64) -> Pp {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = inv_mod(l, p);
            a.iter().map(|&c| c * inv % p).collect()
        }
    }
}

fn pp_gcd(a: &Pp, b: &Pp, p: u64) -> Pp {
    let (mut x, mut y) = (a.clone(), b.clone());
    pp_trim(&mut x);
    pp_trim(&mut y);
    while !y.is_empty() {
        let r = pp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    pp_monic(&x, p)
}

/// `(s, t)` with `s·a + t·b = 1` for coprime `a`, `b`.
fn pp_ext_gcd(a: &Pp, b: &Pp, p: u64) -> (Pp, Pp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (Pp, Pp) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Pp, Pp) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = pp_divrem(&r0, &r1, p);
        let s2 = pp_sub(&s0, &pp_mul(&q, &s1, p), p);
        let t2 = pp_sub(&t0, &pp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    let inv = inv_mod(r0[0], p);
    (
        s0.iter().map(|&c| c * inv % p).collect(),
        t0.iter().map(|&c| c * inv % p).collect(),
    )
}

fn pp_powmod(base: &Pp, mut e: u64, m: &Pp, p: u64) -> Pp {
    let mut r: Pp = vec![1];
    let mut b = pp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = pp_rem(&pp_mul(&r, &b, p), m, p);
        }
        b = pp_rem(&pp_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

fn pp_derivative(a: &Pp, p: u64) -> Pp {
    let mut v: Pp = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| (i as u64 % p) * c % p)
        .collect();
    pp_trim(&mut v);
    v
}

fn reduce_mod_p(f: &[BigInt], p: u64) -> Pp {
    let pb = BigInt::from(p);
    let mut v: Pp = f
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    pp_trim(&mut v);
    v
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn ddf(f: &Pp, p: u64) -> Vec<(Pp, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x: Pp = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while f.len() > 1 {
        d += 1;
        if 2 * d > f.len() - 1 {
            let deg = f.len() - 1;
            out.push((f.clone(), deg));
            break;
        }
        h = pp_powmod(&h, p, &f, p);
        let g = pp_gcd(&pp_sub(&h, &x, p), &f, p);
        if g.len() > 1 {
            f = pp_divrem(&f, &g, p).0;
            h = pp_rem(&h, &f, p);
            out.push((g, d));
        }
    }
    out
}

/// Equal-degree splitting (Cantor–Zassenhaus, odd p).
fn edf(f: &Pp, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Pp> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.clone()];
    }
    loop {
        let mut a: Pp = (0..n).map(|_| rng.gen_range(0..p)).collect();
        pp_trim(&mut a);
        if a.len() < 2 {
            continue;
        }
        let e = (num_bigint::BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
        let b = pp_powmod_big(&a, &e, f, p);
        let g = pp_gcd(&pp_sub(&b, &vec![1], p), f, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = pp_divrem(f, &g, p).0;
            let mut out = edf(&g, d, p, rng);
            out.extend(edf(&pp_monic(&h, p), d, p, rng));
            return out;
        }
    }
}

fn pp_powmod_big(base: &Pp, e: &num_bigint::BigUint, m: &Pp, p: u64) -> Pp {
    let mut r: Pp = vec![1];
    let b = pp_rem(base, m, p);
    for i in (0..e.bits()).rev() {
        r = pp_rem(&pp_mul(&r, &r, p), m, p);
        if e.bit(i) {
            r = pp_rem(&pp_mul(&r, &b, p), m, p);
        }
    }
    r
}

/// Monic irreducible factors of `f mod p` (f square-free mod p).
fn factor_mod_p(f: &Pp, p: u64, rng: &mut ChaCha8Rng) -> Vec<Pp> {
    let fm = pp_monic(f, p);
    let mut out = Vec::new();
    for (g, d) in ddf(&fm, p) {
        out.extend(edf(&g, d, p, rng));
    }
    out.sort();
    out
}

fn degree_pattern(f: &Pp, p: u64) -> Vec<usize> {
    let fm = pp_monic(f, p);
    let mut pat = Vec::new();
    for (g, d) in ddf(&fm, p) {
        for _ in 0..((g.len() - 1) / d) {
            pat.push(d);
        }
    }
    pat
}

/// Subset sums of a degree pattern.
fn achievable(pat: &[usize], n: usize) -> Vec<bool> {
    let mut ok = vec![false; n + 1];
    ok[0] = true;
    for &d in pat {
        for s in (d..=n).rev() {
            if ok[s - d] {
                ok[s] = true;
            }
        }
    }
    ok
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Hensel lifting over Z/p^k
// ---------------------------------------------------------------------------

type Zp = Vec<BigInt>;

fn zp_reduce(a: &[BigInt], m: &BigInt) -> Zp {
    let mut v: Zp = a.iter().map(|c| c.mod_floor(m)).collect();
    int_trim(&mut v);
    v
}

fn zp_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Zp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    zp_reduce(&v, m)
}

fn zp_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Zp {
    let n = a.len().max(b.len());
    let v: Zp = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    zp_reduce(&v, m)
}

fn zp_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Zp {
    let n = a.len().max(b.len());
    let v: Zp = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    zp_reduce(&v, m)
}

/// Division by a monic polynomial modulo m.
fn zp_divrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Zp, Zp) {
    let mut r = zp_reduce(a, m);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].mod_floor(m);
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    (zp_reduce(&q, m), zp_reduce(&r, m))
}

fn to_zp(a: &Pp) -> Zp {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts `f ≡ g·h (mod p)` (h monic, g·h coprime) to modulus `p^k`.
fn hensel_pair(f: &[BigInt], g: &Pp, h: &Pp, p: u64, pk: &BigInt) -> (Zp, Zp) {
    let (s, t) = pp_ext_gcd(g, h, p);
    let mut m = BigInt::from(p);
    let (mut g, mut h, mut s, mut t) = (to_zp(g), to_zp(h), to_zp(&s), to_zp(&t));
    while &m < pk {
        let m2 = (&m * &m).min(pk.clone());
        let e = zp_sub(&zp_reduce(f, &m2), &zp_mul(&g, &h, &m2), &m2);
        let (q, r) = zp_divrem_monic(&zp_mul(&s, &e, &m2), &h, &m2);
        let g2 = zp_add(
            &zp_add(&g, &zp_mul(&t, &e, &m2), &m2),
            &zp_mul(&q, &g, &m2),
            &m2,
        );
        let h2 = zp_add(&h, &r, &m2);
        let b = zp_sub(
            &zp_add(&zp_mul(&s, &g2, &m2), &zp_mul(&t, &h2, &m2), &m2),
            &[BigInt::one()],
            &m2,
        );
        let (c, d) = zp_divrem_monic(&zp_mul(&s, &b, &m2), &h2, &m2);
        s = zp_sub(&s, &d, &m2);
        t = zp_sub(
            &zp_sub(&t, &zp_mul(&t, &b, &m2), &m2),
            &zp_mul(&c, &g2, &m2),
            &m2,
        );
        g = g2;
        h = h2;
        m = m2;
    }
    (g, h)
}

/// Lifts the monic factorization `f ≡ lc·∏ fs (mod p)` to monic factors mod p^k.
fn hensel_multi(f: &[BigInt], fs: &[Pp], p: u64, pk: &BigInt) -> Vec<Zp> {
    if fs.len() == 1 {
        let lc = f.last().unwrap().mod_floor(pk);
        let inv = lc.extended_gcd(pk).x.mod_floor(pk);
        return vec![zp_reduce(
            &f.iter().map(|c| c * &inv).collect::<Vec<_>>(),
            pk,
        )];
    }
    let half = fs.len() / 2;
    let lc = f
        .last()
        .unwrap()
        .mod_floor(&BigInt::from(p))
        .to_u64()
        .unwrap();
    let mut g: Pp = vec![lc];
    for a in &fs[..half] {
        g = pp_mul(&g, a, p);
    }
    let mut h: Pp = vec![1];
    for a in &fs[half..] {
        h = pp_mul(&h, a, p);
    }
    let (gl, hl) = hensel_pair(f, &g, &h, p, pk);
    let mut out = hensel_multi(&gl, &fs[..half], p, pk);
    out.extend(hensel_multi(&hl, &fs[half..], p, pk));
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m >> 1;
    a.iter()
        .map(|c| {
            let c = c.mod_floor(m);
            if c > half {
                c - m
            } else {
                c
            }
        })
        .collect()
}

/// Exact quotient over ℤ, or `None` when `d` does not divide `a`.
fn int_div_exact(a: &[BigInt], d: &[BigInt]) -> Option<Vec<BigInt>> {
    if d.len() > a.len() {
        return None;
    }
    let mut r = a.to_vec();
    let dd = d.len() - 1;
    let lc = &d[dd];
    let mut q = vec![BigInt::zero(); a.len() - dd];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + dd].div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, dj) in d.iter().enumerate() {
                r[i + j] -= &c * dj;
            }
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(q)
}

// ---------------------------------------------------------------------------
// Public interface
// ---------------------------------------------------------------------------

/// Irreducible factors of a square-free primitive integer polynomial of degree ≥ 1.
fn factor_squarefree_int(f: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
    let n = f.len() - 1;
    if n <= 1 {
        return Ok(vec![f.to_vec()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // collect a few good primes, keep the one with fewest modular factors
    let mut primes = Vec::new();
    let mut poss = vec![true; n + 1];
    let mut cand = 1009u64;
    let mut tried = 0;
    while primes.len() < 6 && tried < 400 {
        cand += 2;
        if !is_prime(cand) {
            continue;
        }
        tried += 1;
        let fp = reduce_mod_p(f, cand);
        if fp.len() != n + 1 {
            continue;
        }
        if pp_gcd(&fp, &pp_derivative(&fp, cand), cand).len() > 1 {
            continue;
        }
        let pat = degree_pattern(&fp, cand);
        let ach = achievable(&pat, n);
        for d in 0..=n {
            poss[d] &= ach[d];
        }
        primes.push((pat.len(), cand));
    }
    if primes.is_empty() {
        return Err(Error::InternalConsistency(
            "no suitable prime for factorization".into(),
        ));
    }
    if (1..n).all(|d| !poss[d]) {
        return Ok(vec![f.to_vec()]);
    }
    primes.sort();
    let p = primes[0].1;
    let fp = reduce_mod_p(f, p);
    let mut fs = factor_mod_p(&fp, p, &mut rng);
    // Mignotte-type bound on factor coefficients (times the leading coefficient)
    let norm: BigInt = f
        .iter()
        .map(|c| c * c)
        .fold(BigInt::zero(), |a, b| a + b)
        .sqrt()
        + 1;
    let bound: BigInt = (BigInt::one() << n) * norm * f[n].abs();
    let limit = bound * 2;
    let pb = BigInt::from(p);
    let mut pk = pb.clone();
    while pk <= limit {
        pk *= &pb;
    }
    let mut lifted = hensel_multi(f, &fs, p, &pk);
    let mut cur = f.to_vec();
    let mut out = Vec::new();
    let mut s = 1;
    let mut tried = 0usize;
    'outer: while 2 * s <= lifted.len() {
        let r = lifted.len();
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            tried += 1;
            if tried > MAX_SUBSETS {
                return Err(Error::PrecisionExhausted {
                    bits: 0,
                    context: "factor recombination exceeded its subset budget".into(),
                });
            }
            let lc = cur.last().unwrap().clone();
            let mut g: Zp = vec![lc.mod_floor(&pk)];
            for &i in &idx {
                g = zp_mul(&g, &lifted[i], &pk);
            }
            let g = int_primitive(&symmetric(&g, &pk));
            if let Some(q) = int_div_exact(&cur, &g) {
                out.push(g);
                cur = int_primitive(&q);
                for &i in idx.iter().rev() {
                    lifted.remove(i);
                    fs.remove(i);
                }
                continue 'outer;
            }
            // next combination
            let mut k = s;
            loop {
                if k == 0 {
                    s += 1;
                    continue 'outer;
                }
                k -= 1;
                if idx[k] < r - s + k {
                    idx[k] += 1;
                    for j in (k + 1)..s {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
    out.push(cur);
    Ok(out)
}

/// Factors `f` over ℚ: returns primitive irreducible factors with
/// multiplicities, sorted by degree then coefficients.
pub fn factor(f: &UPoly<Q>) -> Result<Vec<(UPoly<Q>, u32)>> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("cannot factor zero".into()));
    }
    let mut out = Vec::new();
    for (g, k) in f.squarefree_decomposition() {
        for h in factor_squarefree_int(&g.primitive_int())? {
            out.push((UPoly::from_bigints(&h), k));
        }
    }
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.primitive_int().cmp(&b.0.primitive_int()))
    });
    Ok(out)
}

/// Irreducible factors of the square-free part of `f`.
pub fn irreducible_factors(f: &UPoly<Q>) -> Result<Vec<UPoly<Q>>> {
    Ok(factor(f)?.into_iter().map(|(g, _)| g).collect())
}

pub fn is_irreducible(f: &UPoly<Q>) -> Result<bool> {
    let fs = factor(f)?;
    Ok(fs.len() == 1 && fs[0].1 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UPoly<Q> {
        UPoly::from_ints(c)
    }

    #[test]
    fn small_factorizations() {
        let f = &(&p(&[-2, 0, 1]) * &p(&[1, 1, 1])) * &p(&[3, 2]);
        let fs = factor(&f).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[0].0, p(&[3, 2]));
        assert!(is_irreducible(&p(&[-1, -1, 0, 1])).unwrap());
        // x^4 + 1 is irreducible but splits modulo every prime
        assert!(is_irreducible(&p(&[1, 0, 0, 0, 1])).unwrap());
        // x^4 − 10x² + 1 likewise
        assert!(is_irreducible(&p(&[1, 0, -10, 0, 1])).unwrap());
    }

    #[test]
    fn repeated_and_cyclotomic() {
        // x^12 − 1 = ∏_{d | 12} Φ_d
        let mut c = vec![0i64; 13];
        c[0] = -1;
        c[12] = 1;
        let fs = factor(&p(&c)).unwrap();
        assert_eq!(fs.len(), 6);
        let f = &p(&[1, 1]).pow(2) * &p(&[5, 0, 0, 1]);
        let fs = factor(&f).unwrap();
        assert_eq!(fs.iter().map(|x| x.1).collect::<Vec<_>>(), vec![2, 1]);
    }

    #[test]
    fn product_roundtrip() {
        let a = p(&[7, -3, 0, 2, 1]);
        let b = p(&[-5, 4, 9]);
        let c = p(&[1, 0, 0, 0, 0, 0, -3]);
        let fs = factor(&(&(&a * &b) * &c)).unwrap();
        let mut prod = UPoly::<Q>::one();
        for (g, k) in &fs {
            prod = &prod * &g.pow(*k);
        }
        assert_eq!(prod.primitive(), (&(&a * &b) * &c).primitive());
    }
}
