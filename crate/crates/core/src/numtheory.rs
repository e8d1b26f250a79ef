//! Integer and modular arithmetic: factorization, gcd/lcm, the order of
//! `SL(2,Z_N)` and per-prime grouping of dimension lists.

use crate::{Error, Result};
use serde::Serialize;

/// Prime factorization with strictly ascending primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeFactorization {
    pub factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

/// The `p`-parts of a list of dimensions for a single prime `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorBlock {
    pub prime: u64,
    /// One prime power per input dimension divisible by `prime`, in input order.
    pub local_dims: Vec<u64>,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// `(a * b) mod n` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

#[inline]
pub fn neg_mod(a: u64, n: u64) -> u64 {
    let a = a % n;
    if a == 0 {
        0
    } else {
        n - a
    }
}

/// Reduces a signed integer into `[0, n)`.
#[inline]
pub fn reduce(x: i128, n: u64) -> u64 {
    x.rem_euclid(n as i128) as u64
}

/// Trial-division factorization. `factorize(1)` is the empty product.
pub fn factorize(n: u64) -> Result<PrimeFactorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factorize 0".into()));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(PrimeFactorization { factors })
}

/// `|SL(2,Z_N)| = N^3 * prod (1 - 1/p^2)`, evaluated in exact integer arithmetic.
pub fn sl2_order(n: u64) -> Result<u128> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("SL(2,Z_N) needs N >= 2, got {n}")));
    }
    let fac = factorize(n)?;
    let n = n as u128;
    let mut num = n * n * n;
    let mut den: u128 = 1;
    for p in fac.primes() {
        let p = p as u128;
        num *= p * p - 1;
        den *= p * p;
    }
    debug_assert_eq!(num % den, 0);
    Ok(num / den)
}

/// Groups the prime-power parts of `dims` by prime, primes ascending.
pub fn elementary_divisor_blocks(dims: &[u64]) -> Result<Vec<DivisorBlock>> {
    if dims.is_empty() {
        return Err(Error::InvalidInput("empty dimension list".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidInput(format!("dimension {d} < 2")));
    }
    let mut blocks: Vec<DivisorBlock> = Vec::new();
    for &d in dims {
        for (p, e) in factorize(d)?.factors {
            let pk = p.pow(e);
            match blocks.iter_mut().find(|b| b.prime == p) {
                Some(b) => b.local_dims.push(pk),
                None => blocks.push(DivisorBlock {
                    prime: p,
                    local_dims: vec![pk],
                }),
            }
        }
    }
    blocks.sort_by_key(|b| b.prime);
    Ok(blocks)
}
