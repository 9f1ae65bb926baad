//! Polynomial factorization.
//!
//! Finite fields use squarefree decomposition, distinct-degree splitting and
//! Cantor-Zassenhaus equal-degree splitting driven by a seeded ChaCha stream.
//! Over the rationals, rational roots are peeled off and the rest is split
//! by Kronecker's interpolation search up to degree 8. Over rational function fields a handful of
//! certificates decide irreducibility of small stage polynomials.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field, Poly};
use crate::exact::integer::{divisors, is_prime_u64};

pub const DEFAULT_SEED: u64 = 0x6d77_6b00;

/// Seed for randomized splitting: `MWK_SEED` if set, else the default.
pub fn factor_seed() -> u64 {
    std::env::var("MWK_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elem,
    /// Monic irreducible factors with multiplicities, sorted.
    pub factors: Vec<(Poly, usize)>,
}

impl Factorization {
    pub fn expand(&self, k: &Field) -> Poly {
        let mut r = k.pconst(self.unit.clone());
        for (f, e) in &self.factors {
            r = k.pmul(&r, &k.ppow(f, *e as u64));
        }
        r
    }
}

/// Factor a nonzero univariate polynomial over a supported field.
pub fn factor(k: &Field, f: &Poly) -> Result<Factorization> {
    factor_with_seed(k, f, factor_seed())
}

pub fn factor_with_seed(k: &Field, f: &Poly, seed: u64) -> Result<Factorization> {
    let lead = f.lead().ok_or_else(|| MwkError::domain("cannot factor the zero polynomial"))?.clone();
    let g = k.pmonic(f);
    let mut factors = if k.is_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        factor_fq(k, &g, &mut rng)
    } else {
        match k {
            Field::Q => factor_q(&g)?,
            Field::Rat(_) => factor_rat(k, &g)?,
            _ => {
                if g.deg() == Some(0) {
                    Vec::new()
                } else if g.deg() == Some(1) {
                    vec![(g.clone(), 1)]
                } else {
                    return Err(MwkError::capability(format!("factorization over {k} is not supported")));
                }
            }
        }
    };
    factors.sort();
    let mut merged: Vec<(Poly, usize)> = Vec::new();
    for (p, e) in factors {
        match merged.last_mut() {
            Some((q, m)) if *q == p => *m += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(Factorization { unit: lead, factors: merged })
}

/// p-th root in a finite field of characteristic p.
pub fn fq_pth_root(k: &Field, a: &Elem) -> Elem {
    let q = k.size().unwrap();
    let p = BigUint::from(k.char());
    k.pow_big(a, &(q / p))
}

/// Squarefree decomposition over a perfect field: pairs (squarefree g_i, i).
pub fn squarefree_fq(k: &Field, f: &Poly) -> Vec<(Poly, usize)> {
    let f = k.pmonic(f);
    if f.deg().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let p = k.char() as usize;
    let mut out = Vec::new();
    let df = k.pderiv(&f);
    if df.is_zero() {
        let root = pth_root_poly(k, &f);
        for (g, e) in squarefree_fq(k, &root) {
            out.push((g, e * p));
        }
        return out;
    }
    let mut c = k.pgcd(&f, &df);
    let mut w = k.pdiv_exact(&f, &c);
    let mut i = 1;
    while w.deg().unwrap_or(0) > 0 {
        let y = k.pgcd(&w, &c);
        let z = k.pdiv_exact(&w, &y);
        if z.deg().unwrap_or(0) > 0 {
            out.push((k.pmonic(&z), i));
        }
        i += 1;
        w = y;
        c = k.pdiv_exact(&c, &w);
    }
    if c.deg().unwrap_or(0) > 0 {
        let root = pth_root_poly(k, &c);
        for (g, e) in squarefree_fq(k, &root) {
            out.push((g, e * p));
        }
    }
    out
}

fn pth_root_poly(k: &Field, f: &Poly) -> Poly {
    let p = k.char() as usize;
    let c = f.c.iter().step_by(p).map(|a| fq_pth_root(k, a)).collect();
    Poly::from_coeffs(c)
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn ddf(k: &Field, f: &Poly) -> Vec<(Poly, usize)> {
    let q = k.size().unwrap();
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = k.px();
    let mut h = k.prem(&x, &f);
    let mut d = 0;
    while f.deg().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = k.ppow_mod(&h, &q, &f);
        let g = k.pgcd(&k.psub(&h, &x), &f);
        if g.deg().unwrap_or(0) > 0 {
            out.push((g.clone(), d));
            f = k.pdiv_exact(&f, &g);
            h = k.prem(&h, &f);
        }
    }
    if f.deg().unwrap_or(0) > 0 {
        let n = f.deg().unwrap();
        out.push((f, n));
    }
    out
}

fn random_poly(k: &Field, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    Poly::from_coeffs((0..=deg).map(|_| random_fq(k, rng)).collect())
}

/// Uniform random element of a finite field.
pub fn random_fq(k: &Field, rng: &mut impl Rng) -> Elem {
    match k {
        Field::Fp(p) => Elem::Fp(rng.gen_range(0..*p)),
        Field::Ext(e) => Elem::Ext((0..e.modulus.deg().unwrap()).map(|_| random_fq(&e.base, rng)).collect()),
        _ => panic!("not a finite field"),
    }
}

/// Equal-degree splitting into irreducible factors of degree `d`.
fn edf(k: &Field, f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.deg().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let q = k.size().unwrap();
    loop {
        let a = random_poly(k, n - 1, rng);
        if a.deg().unwrap_or(0) == 0 {
            continue;
        }
        let b = if k.char() == 2 {
            // Trace map a + a^2 + ... + a^(2^(e d - 1)).
            let m = k.abs_degree().unwrap() as usize * d;
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..m {
                t = k.pmulmod(&t, &t, f);
                acc = k.padd(&acc, &t);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let t = k.ppow_mod(&a, &e, f);
            k.psub(&t, &k.pconst(k.one()))
        };
        let g = k.pgcd(&b, f);
        let dg = g.deg().unwrap_or(0);
        if dg > 0 && dg < n {
            let h = k.pdiv_exact(f, &g);
            let mut out = edf(k, &g, d, rng);
            out.extend(edf(k, &k.pmonic(&h), d, rng));
            return out;
        }
    }
}

fn factor_fq(k: &Field, f: &Poly, rng: &mut ChaCha8Rng) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    for (g, e) in squarefree_fq(k, f) {
        for (h, d) in ddf(k, &g) {
            for irr in edf(k, &k.pmonic(&h), d, rng) {
                out.push((k.pmonic(&irr), e));
            }
        }
    }
    out
}

/// Irreducibility over a finite field (Rabin's test).
pub fn is_irreducible_fq(k: &Field, f: &Poly) -> bool {
    let n = match f.deg() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let f = k.pmonic(f);
    let q = k.size().unwrap();
    let x = k.px();
    let frob = |times: usize| {
        let mut h = k.prem(&x, &f);
        for _ in 0..times {
            h = k.ppow_mod(&h, &q, &f);
        }
        h
    };
    if k.psub(&frob(n), &k.prem(&x, &f)).c.iter().any(|c| !c.is_zero()) {
        return false;
    }
    let mut m = n;
    let mut primes = Vec::new();
    let mut r = 2;
    while r * r <= m {
        if m % r == 0 {
            primes.push(r);
            while m % r == 0 {
                m /= r;
            }
        }
        r += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    primes.into_iter().all(|r| {
        let g = k.pgcd(&k.psub(&frob(n / r), &x), &f);
        g.deg() == Some(0)
    })
}

/// Lowest-lexicographic monic irreducible of degree `e` over `F_p`
/// (coefficients compared from `x^{e-1}` down to the constant term).
pub fn conway_free_modulus(p: u64, e: usize) -> Result<Poly> {
    let k = Field::fp(p)?;
    let total = (p as u128).checked_pow(e as u32).ok_or_else(|| MwkError::capability("field too large"))?;
    for idx in 0..total {
        let mut digits = vec![0u64; e];
        let mut v = idx;
        for i in 0..e {
            digits[e - 1 - i] = (v % p as u128) as u64;
            v /= p as u128;
        }
        // digits[0] is the coefficient of x^{e-1}.
        let mut c: Vec<Elem> = digits.iter().rev().map(|&d| Elem::Fp(d)).collect();
        c.push(k.one());
        let f = Poly::from_coeffs(c);
        if is_irreducible_fq(&k, &f) {
            return Ok(f);
        }
    }
    Err(MwkError::domain("no irreducible polynomial found"))
}

/// The finite field `F_{p^e}` with its deterministic defining polynomial.
pub fn gf(p: u64, e: usize, var: &str) -> Result<Field> {
    let base = Field::fp(p)?;
    if e == 1 {
        return Ok(base);
    }
    Field::ext_unchecked(&base, conway_free_modulus(p, e)?, var)
}

/// Roots of a polynomial in a finite field (without multiplicity, sorted).
pub fn roots_fq(k: &Field, f: &Poly) -> Vec<Elem> {
    let fac = factor(k, f).expect("nonzero polynomial");
    let mut r: Vec<Elem> = fac
        .factors
        .iter()
        .filter(|(g, _)| g.deg() == Some(1))
        .map(|(g, _)| k.neg(&g.c[0]))
        .collect();
    r.sort();
    r
}

fn rat_int(q: &BigRational) -> BigInt {
    debug_assert!(q.is_integer());
    q.numer().clone()
}

/// Primitive integer polynomial with positive leading coefficient
/// proportional to a rational polynomial.
pub fn primitive_part_q(f: &Poly) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in &f.c {
        den = den.lcm(c.as_rational().unwrap().denom());
    }
    let ints: Vec<BigInt> = f.c.iter().map(|c| rat_int(&(c.as_rational().unwrap() * BigRational::from_integer(den.clone())))).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    ints.into_iter().map(|c| c / &g * &sign).collect()
}

fn irreducible_mod_p_certificate(ints: &[BigInt]) -> bool {
    let n = ints.len() - 1;
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let k = Field::Fp(p);
        let fp = Poly::from_coeffs(ints.iter().map(|c| k.from_bigint(c)).collect());
        if fp.deg() != Some(n) {
            continue;
        }
        if k.pgcd(&fp, &k.pderiv(&fp)).deg() != Some(0) {
            continue;
        }
        if is_irreducible_fq(&k, &fp) {
            return true;
        }
    }
    false
}

fn eisenstein_certificate(ints: &[BigInt]) -> Result<bool> {
    let c0 = &ints[0];
    if c0.is_zero() {
        return Ok(false);
    }
    let lead = ints.last().unwrap();
    for p in crate::exact::integer::prime_divisors(c0)? {
        let bp = BigInt::from(p);
        if (lead % &bp).is_zero() {
            continue;
        }
        if ints[..ints.len() - 1].iter().all(|c| (c % &bp).is_zero()) && !(c0 % (&bp * &bp)).is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Certified irreducibility of a primitive integer polynomial without
/// rational roots. `None` when no certificate applies.
fn certify_q(ints: &[BigInt]) -> Result<Option<bool>> {
    let n = ints.len() - 1;
    if n <= 1 {
        return Ok(Some(true));
    }
    if n <= 3 {
        // No rational roots was established by the caller.
        return Ok(Some(true));
    }
    if eisenstein_certificate(ints)? || irreducible_mod_p_certificate(ints) {
        return Ok(Some(true));
    }
    Ok(None)
}

fn factor_q(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let k = Field::Q;
    let mut out = Vec::new();
    let mut rest = f.clone();
    if rest.deg().unwrap_or(0) == 0 {
        return Ok(out);
    }
    // Peel off rational roots.
    loop {
        let ints = primitive_part_q(&rest);
        if ints.len() <= 1 {
            break;
        }
        if ints[0].is_zero() {
            let x = k.px();
            rest = k.pdiv_exact(&rest, &x);
            out.push((x, 1));
            continue;
        }
        let mut found = None;
        'search: for num in divisors(&ints[0])? {
            for den in divisors(ints.last().unwrap())? {
                for sgn in [1i32, -1] {
                    let r = BigRational::new(&num * BigInt::from(sgn), den.clone());
                    if k.peval(&rest, &Elem::Q(r.clone())).is_zero() {
                        found = Some(r);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                let lin = k.plinear(&Elem::Q(r));
                rest = k.pdiv_exact(&rest, &lin);
                out.push((lin, 1));
            }
            None => break,
        }
    }
    if rest.deg().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let rest = k.pmonic(&rest);
    // Repeated factors of the remaining part.
    let g = k.pgcd(&rest, &k.pderiv(&rest));
    if g.deg().unwrap_or(0) > 0 {
        let inner = factor_q(&g)?;
        let mut cur = rest.clone();
        for (h, _) in &inner {
            let (m, cof) = k.pvaluation(&cur, h)?;
            cur = cof;
            out.push((h.clone(), m));
        }
        if cur.deg().unwrap_or(0) > 0 {
            out.extend(factor_q(&cur)?);
        }
        return Ok(out);
    }
    let ints = primitive_part_q(&rest);
    if certify_q(&ints)? == Some(true) {
        out.push((rest, 1));
        return Ok(out);
    }
    match kronecker_factor(&ints)? {
        Some(g) => {
            let cof = k.pdiv_exact(&rest, &g);
            out.extend(factor_q(&g)?);
            out.extend(factor_q(&cof)?);
        }
        None => out.push((rest, 1)),
    }
    Ok(out)
}

const KRONECKER_MAX_DEGREE: usize = 8;
const KRONECKER_MAX_CANDIDATES: u128 = 4_000_000;

/// Monic factor of degree `2..=n/2` of a primitive integer polynomial found
/// by Kronecker's interpolation search; `None` proves irreducibility given
/// that rational roots were already removed.
fn kronecker_factor(ints: &[BigInt]) -> Result<Option<Poly>> {
    let k = Field::Q;
    let n = ints.len() - 1;
    let too_big = || {
        MwkError::capability(
            "factorization over QQ of this size is not supported; supply the input pre-factored",
        )
    };
    if n > KRONECKER_MAX_DEGREE {
        return Err(too_big());
    }
    let f = Poly::from_coeffs(ints.iter().map(|c| k.from_bigint(c)).collect());
    let eval = |x: i64| -> BigInt {
        ints.iter().rev().fold(BigInt::zero(), |acc, c| acc * BigInt::from(x) + c)
    };
    let mut points: Vec<(i64, BigInt)> = (-8i64..=8).map(|x| (x, eval(x))).filter(|(_, v)| !v.is_zero()).collect();
    points.sort_by(|a, b| a.1.abs().cmp(&b.1.abs()).then(a.0.cmp(&b.0)));
    for d in 2..=n / 2 {
        let chosen = &points[..=d];
        let mut choices: Vec<Vec<BigInt>> = Vec::new();
        for (i, (_, v)) in chosen.iter().enumerate() {
            let pos = divisors(&v.abs())?;
            if i == 0 {
                choices.push(pos);
            } else {
                choices.push(pos.iter().flat_map(|q| [q.clone(), -q]).collect());
            }
        }
        let total = choices.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
        if total > KRONECKER_MAX_CANDIDATES {
            return Err(too_big());
        }
        let xs: Vec<Elem> = chosen.iter().map(|(x, _)| k.from_i64(*x)).collect();
        let basis = lagrange_basis(&k, &xs)?;
        let mut idx = vec![0usize; d + 1];
        loop {
            let mut g = Poly::zero();
            for (j, b) in basis.iter().enumerate() {
                g = k.padd(&g, &k.pscale(b, &k.from_bigint(&choices[j][idx[j]])));
            }
            if g.deg() == Some(d) {
                let (_, r) = k.pdivrem(&f, &g);
                if r.is_zero() {
                    return Ok(Some(k.pmonic(&g)));
                }
            }
            let mut j = 0;
            loop {
                if j > d {
                    break;
                }
                idx[j] += 1;
                if idx[j] < choices[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j > d {
                break;
            }
        }
    }
    Ok(None)
}

/// Lagrange basis polynomials for distinct nodes.
fn lagrange_basis(k: &Field, xs: &[Elem]) -> Result<Vec<Poly>> {
    let mut out = Vec::new();
    for (i, xi) in xs.iter().enumerate() {
        let mut num = k.pconst(k.one());
        let mut den = k.one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                num = k.pmul(&num, &k.plinear(xj));
                den = k.mul(&den, &k.sub(xi, xj));
            }
        }
        out.push(k.pscale(&num, &k.inv(&den)?));
    }
    Ok(out)
}

/// Irreducibility over QQ with a certificate; capability error if undecided.
pub fn is_irreducible_q(f: &Poly) -> Result<bool> {
    let fac = factor(&Field::Q, f)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

/// Whether `a` is a p-th power in `k(s)` for `k` finite of characteristic p.
pub fn rat_is_pth_power(k: &Field, a: &Elem) -> bool {
    let (n, d) = k.rat_parts(a);
    let base = k.base().unwrap();
    let p = k.char() as usize;
    let m = base.pmul(n, &base.ppow(d, p as u64 - 1));
    m.c.iter().enumerate().all(|(i, c)| c.is_zero() || i % p == 0)
}

fn factor_rat(k: &Field, f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let n = f.deg().unwrap_or(0);
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![(f.clone(), 1)]);
    }
    let base = k.base().unwrap();
    let p = k.char() as usize;
    // x^p - c in characteristic p.
    if p != 0 && n == p && f.c[1..p].iter().all(|c| c.is_zero()) && base.is_finite() {
        let c = k.neg(&f.c[0]);
        if !rat_is_pth_power(k, &c) {
            return Ok(vec![(f.clone(), 1)]);
        }
    }
    if n == 2 && p != 2 {
        let disc = k.sub(&k.mul(&f.c[1], &f.c[1]), &k.mul(&k.from_i64(4), &f.c[0]));
        return match crate::fields::is_square(k, &disc)? {
            false => Ok(vec![(f.clone(), 1)]),
            true => {
                let r = crate::fields::sqrt(k, &disc)?;
                let half = k.inv(&k.from_i64(2))?;
                let r1 = k.mul(&half, &k.sub(&r, &f.c[1]));
                let r2 = k.mul(&half, &k.sub(&k.neg(&r), &f.c[1]));
                Ok(vec![(k.plinear(&r1), 1), (k.plinear(&r2), 1)])
            }
        };
    }
    if eisenstein_rat(k, f)? {
        return Ok(vec![(f.clone(), 1)]);
    }
    Err(MwkError::capability(format!("cannot decide factorization of a degree-{n} polynomial over {k}")))
}

/// Eisenstein criterion at some irreducible factor of the constant term's
/// numerator, for monic polynomials with coefficients in k[s].
fn eisenstein_rat(k: &Field, f: &Poly) -> Result<bool> {
    let base = k.base().unwrap();
    if !base.is_finite() && *base != Field::Q {
        return Ok(false);
    }
    if f.c.iter().any(|c| k.rat_parts(c).1.deg() != Some(0)) {
        return Ok(false);
    }
    let c0 = k.rat_parts(&f.c[0]).0.clone();
    if c0.is_zero() {
        return Ok(false);
    }
    let cands = match factor(base, &c0) {
        Ok(fac) => fac.factors,
        Err(_) => return Ok(false),
    };
    let n = f.deg().unwrap();
    for (pi, _) in cands {
        let ok_mid = f.c[..n].iter().all(|c| base.prem(k.rat_parts(c).0, &pi).is_zero());
        let sq = base.pmul(&pi, &pi);
        if ok_mid && !base.prem(&c0, &sq).is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Integer of a prime field element, for printing and tests.
pub fn fp_value(a: &Elem) -> u64 {
    match a {
        Elem::Fp(x) => *x,
        _ => panic!("not a prime-field element"),
    }
}

pub fn small_prime(p: u64) -> bool {
    is_prime_u64(p) && p.to_u32().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_poly(k: &Field, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| k.from_i64(x)).collect())
    }

    #[test]
    fn difference_of_squares_over_f5() {
        let k = Field::fp(5).unwrap();
        let f = fp_poly(&k, &[-1, 0, 1]);
        let fac = factor(&k, &f).unwrap();
        assert_eq!(fac.factors, vec![(fp_poly(&k, &[1, 1]), 1), (fp_poly(&k, &[4, 1]), 1)]);
        assert_eq!(fac.expand(&k), f);
    }

    #[test]
    fn two_is_not_a_square_mod_five() {
        let k = Field::fp(5).unwrap();
        // Oracle: no root among the five residues.
        assert!((0..5).all(|x| (x * x) % 5 != 2));
        let f = fp_poly(&k, &[-2, 0, 1]);
        assert_eq!(factor(&k, &f).unwrap().factors, vec![(f.clone(), 1)]);
    }

    #[test]
    fn t4_plus_t_over_f2() {
        let k = Field::fp(2).unwrap();
        let f = fp_poly(&k, &[0, 1, 0, 0, 1]);
        let fac = factor(&k, &f).unwrap();
        let mut expect =
            vec![(fp_poly(&k, &[0, 1]), 1), (fp_poly(&k, &[1, 1]), 1), (fp_poly(&k, &[1, 1, 1]), 1)];
        expect.sort();
        assert_eq!(fac.factors, expect);
    }

    #[test]
    fn inseparable_parts_over_f3() {
        let k = Field::fp(3).unwrap();
        // (x+1)^3 (x^2+1)^2
        let a = k.ppow(&fp_poly(&k, &[1, 1]), 3);
        let b = k.ppow(&fp_poly(&k, &[1, 0, 1]), 2);
        let f = k.pmul(&a, &b);
        let fac = factor(&k, &f).unwrap();
        assert_eq!(fac.expand(&k), f);
        assert_eq!(fac.factors.len(), 2);
    }

    #[test]
    fn default_models_of_small_fields() {
        let k3 = Field::fp(3).unwrap();
        assert_eq!(conway_free_modulus(3, 2).unwrap(), fp_poly(&k3, &[1, 0, 1]));
        let k2 = Field::fp(2).unwrap();
        assert_eq!(conway_free_modulus(2, 2).unwrap(), fp_poly(&k2, &[1, 1, 1]));
        assert_eq!(conway_free_modulus(2, 3).unwrap(), fp_poly(&k2, &[1, 1, 0, 1]));
    }

    #[test]
    fn factoring_over_f9_splits_x2_plus_1() {
        let k = gf(3, 2, "a").unwrap();
        let f = Poly::from_coeffs(vec![k.one(), k.zero(), k.one()]);
        let fac = factor(&k, &f).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(&k), f);
    }

    #[test]
    fn rational_roots_and_certificates() {
        let k = Field::Q;
        let q = |n: i64| Elem::Q(BigRational::from_integer(BigInt::from(n)));
        // (2x - 1)(x^2 - 2)
        let f = Poly::from_coeffs(vec![q(2), q(-4), q(-1), q(2)]);
        let fac = factor(&k, &f).unwrap();
        assert_eq!(fac.expand(&k), f);
        assert_eq!(fac.factors.len(), 2);
        // x^4 + 1 is reducible mod every prime; the interpolation search
        // certifies it.
        let g = Poly::from_coeffs(vec![q(1), q(0), q(0), q(0), q(1)]);
        assert!(is_irreducible_q(&g).unwrap());
        // (x^2 - x - 1)(x^2 + 5)
        let g = Poly::from_coeffs(vec![q(-5), q(-5), q(4), q(-1), q(1)]);
        let fac = factor(&k, &g).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(&k), g);
        // x^10 + 1 is past the search bound.
        let mut c = vec![q(0); 11];
        c[0] = q(1);
        c[10] = q(1);
        assert!(matches!(factor(&k, &Poly::from_coeffs(c)), Err(MwkError::Capability(_))));
        // x^4 - 2 is Eisenstein at 2.
        let h = Poly::from_coeffs(vec![q(-2), q(0), q(0), q(0), q(1)]);
        assert!(is_irreducible_q(&h).unwrap());
    }
}
