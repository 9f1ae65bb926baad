//! Integer utilities: primality, factorization, Legendre and Hilbert symbols.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{MwkError, Result};

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = (x as i128 - y as i128).unsigned_abs() as u64;
            d = d.gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

pub fn factor_u64(n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13] {
        while m % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            m /= p;
        }
    }
    factor_u64_into(m, &mut out);
    out
}

/// Prime factorization of |n|; capability error past the supported size.
pub fn factor_bigint(n: &BigInt) -> Result<BTreeMap<BigUint, u32>> {
    let mut m = n.magnitude().clone();
    if m.is_zero() {
        return Err(MwkError::domain("cannot factor zero"));
    }
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut p = 2u64;
    while m.bits() > 63 {
        if p > 2_000_000 {
            return Err(MwkError::capability("integer too large to factor"));
        }
        let bp = BigUint::from(p);
        while (&m % &bp).is_zero() {
            *out.entry(bp.clone()).or_insert(0) += 1;
            m /= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let small = m.to_u64().unwrap();
    for (q, e) in factor_u64(small) {
        *out.entry(BigUint::from(q)).or_insert(0) += e;
    }
    Ok(out)
}

/// Squarefree integer in the square class of a nonzero rational `a/b`.
pub fn squarefree_class(num: &BigInt, den: &BigInt) -> Result<BigInt> {
    let prod = num * den;
    let sign = prod.sign();
    let fac = factor_bigint(&prod)?;
    let mut r = BigInt::one();
    for (p, e) in fac {
        if e % 2 == 1 {
            r *= BigInt::from_biguint(Sign::Plus, p);
        }
    }
    if sign == Sign::Minus {
        r = -r;
    }
    Ok(r)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    let mut m = n.abs();
    let bp = BigInt::from(p);
    let mut v = 0;
    while !m.is_zero() && (&m % &bp).is_zero() {
        m /= &bp;
        v += 1;
    }
    v
}

/// Legendre symbol (a/p) for odd prime p, with a not divisible by p.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    if powmod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Hilbert symbol (a, b)_p for nonzero integers and a prime p (including 2).
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, p: u64) -> i32 {
    let alpha = valuation(a, p);
    let beta = valuation(b, p);
    let bp = BigInt::from(p);
    let u = a / bp.pow(alpha);
    let v = b / bp.pow(beta);
    if p == 2 {
        let eps = |x: &BigInt| -> i64 { ((x.mod_floor(&BigInt::from(4)).to_i64().unwrap() - 1) / 2) % 2 };
        let omega = |x: &BigInt| -> i64 {
            let r = x.mod_floor(&BigInt::from(8)).to_i64().unwrap();
            ((r * r - 1) / 8) % 2
        };
        let e = eps(&u) * eps(&v) + (alpha as i64) * omega(&v) + (beta as i64) * omega(&u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s = if (alpha as u64 * beta as u64) % 2 == 1 && (p - 1) / 2 % 2 == 1 { -1 } else { 1 };
        if beta % 2 == 1 {
            s *= legendre(&u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(&v, p);
        }
        s
    }
}

/// Real Hilbert symbol.
pub fn hilbert_real(a: &BigInt, b: &BigInt) -> i32 {
    if a.is_negative() && b.is_negative() {
        -1
    } else {
        1
    }
}

/// Positive divisors of |n| (n nonzero).
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let fac = factor_bigint(n)?;
    let mut ds = vec![BigInt::one()];
    for (p, e) in fac {
        let p = BigInt::from_biguint(Sign::Plus, p);
        let mut next = Vec::new();
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        ds = next;
    }
    ds.sort();
    Ok(ds)
}

/// Prime divisors of a nonzero integer as machine words.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    factor_bigint(n)?
        .keys()
        .map(|p| p.to_u64().ok_or_else(|| MwkError::capability("prime divisor exceeds 64 bits")))
        .collect()
}
