//! Finite fields GF(p^r) with precomputed addition and multiplication tables.
//!
//! Element `i` is the polynomial whose base-`p` digits (constant term first)
//! spell `i`, so indices `0..p` are the constants of the prime subfield, index
//! 0 is zero and index 1 is one. The reduction polynomial is the
//! lexicographically smallest monic irreducible of degree `r`, comparing
//! coefficient lists constant term first.

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 2048;

#[derive(Clone, Debug)]
pub struct FieldSpec {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
}

impl FieldSpec {
    /// Builds GF(p^r).
    pub fn new(p: u32, r: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 {
            return Err(Error::ZeroDegree);
        }
        let too_large = || Error::FieldTooLarge { p: p as u64, r, max: MAX_FIELD_ORDER };
        let q = (p as u64).checked_pow(r).ok_or_else(too_large)?;
        if q > MAX_FIELD_ORDER {
            return Err(too_large());
        }
        let q = q as u32;
        let modulus = smallest_irreducible(p, r);

        let digits: Vec<Vec<u32>> = (0..q).map(|i| to_digits(i, p, r)).collect();
        let qs = q as usize;

        let mut add = vec![0u16; qs * qs];
        let mut buf = vec![0u32; r as usize];
        for a in 0..qs {
            for b in a..qs {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = (digits[a][k] + digits[b][k]) % p;
                }
                let s = from_digits(&buf, p) as u16;
                add[a * qs + b] = s;
                add[b * qs + a] = s;
            }
        }

        // Multiplication through discrete logs of a primitive element.
        let (exp, log) = exp_log_tables(&digits, &modulus, p, q);
        let order = (q - 1) as usize;
        let mut mul = vec![0u16; qs * qs];
        for a in 1..qs {
            for b in 1..qs {
                mul[a * qs + b] = exp[(log[a] + log[b]) % order] as u16;
            }
        }

        Ok(Self { p, r, q, modulus, add, mul })
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Self> {
        match is_prime_power(q)? {
            Some((p, r)) => {
                let p = u32::try_from(p).map_err(|_| Error::FieldTooLarge {
                    p,
                    r,
                    max: MAX_FIELD_ORDER,
                })?;
                Self::new(p, r)
            }
            None => Err(Error::NotPrimePower(q)),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Reduction polynomial coefficients, constant term first, leading 1 last.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> Result<u32> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a as usize, b as usize) as u32)
    }

    pub fn mul(&self, a: u32, b: u32) -> Result<u32> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a as usize, b as usize) as u32)
    }

    #[inline]
    pub(crate) fn add_unchecked(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q as usize + b] as usize
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q as usize + b] as usize
    }

    fn check(&self, a: u32) -> Result<()> {
        if a < self.q {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange { index: a, order: self.q })
        }
    }
}

fn to_digits(mut i: u32, p: u32, r: u32) -> Vec<u32> {
    (0..r)
        .map(|_| {
            let d = i % p;
            i /= p;
            d
        })
        .collect()
}

fn from_digits(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two residues (digit vectors of length r) modulo the monic `modulus`.
fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let r = a.len();
    let mut prod = vec![0u32; 2 * r];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for top in (r..2 * r).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        // subtract c * x^(top-r) * modulus
        for (k, &m) in modulus.iter().enumerate() {
            let idx = top - r + k;
            prod[idx] = (prod[idx] + (p - c) * m % p) % p;
        }
    }
    prod.truncate(r);
    prod
}

fn exp_log_tables(digits: &[Vec<u32>], modulus: &[u32], p: u32, q: u32) -> (Vec<u32>, Vec<usize>) {
    let order = (q - 1) as usize;
    for g in 1..q {
        let mut exp = Vec::with_capacity(order);
        let mut cur = 1u32;
        let mut primitive = true;
        for k in 0..order {
            if k > 0 && cur == 1 {
                primitive = false;
                break;
            }
            exp.push(cur);
            cur = from_digits(&mul_mod(&digits[cur as usize], &digits[g as usize], modulus, p), p);
        }
        if primitive && cur == 1 {
            let mut log = vec![0usize; q as usize];
            for (k, &e) in exp.iter().enumerate() {
                log[e as usize] = k;
            }
            return (exp, log);
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

/// Remainder of `num` divided by the monic polynomial `den` over GF(p).
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().expect("nonempty");
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            for (k, &c) in den.iter().enumerate() {
                rem[shift + k] = (rem[shift + k] + (p - lead) * c % p) % p;
            }
        }
        rem.pop();
    }
    rem
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for dd in 1..=deg / 2 {
        let count = (p as u64).pow(dd as u32);
        for n in 0..count {
            let mut den = to_digits(n as u32, p, dd as u32);
            den.push(1);
            if poly_rem(poly, &den, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    let count = p.pow(r);
    for n in 0..count {
        // c0 is the most significant digit of n, so n increases lexicographically.
        let mut poly: Vec<u32> = to_digits(n, p, r).into_iter().rev().collect();
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Returns `(p, r)` with `n = p^r`, or `None` when `n` is not a prime power.
pub fn is_prime_power(n: u64) -> Result<Option<(u64, u32)>> {
    if n < 2 {
        return Err(Error::invalid(format!("prime-power test needs n >= 2, got {n}")));
    }
    let mut p = n;
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            p = f;
            break;
        }
        f += if f == 2 { 1 } else { 2 };
    }
    let mut rest = n;
    let mut r = 0u32;
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    Ok((rest == 1).then_some((p, r)))
}

/// Smallest prime power that is at least `n`.
pub fn next_prime_power(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid(format!("next prime power needs n >= 2, got {n}")));
    }
    let mut m = n;
    loop {
        if is_prime_power(m)?.is_some() {
            return Ok(m);
        }
        m = m.checked_add(1).ok_or_else(|| Error::Overflow("next prime power".into()))?;
    }
}
