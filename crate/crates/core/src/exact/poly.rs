//! Univariate polynomial arithmetic over any [`Field`].

use num_bigint::BigUint;

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field, Poly};

impl Field {
    pub fn pconst(&self, a: Elem) -> Poly {
        Poly::from_coeffs(vec![a])
    }

    /// The polynomial `x`.
    pub fn px(&self) -> Poly {
        Poly { c: vec![self.zero(), self.one()] }
    }

    /// `x - a`.
    pub fn plinear(&self, a: &Elem) -> Poly {
        Poly { c: vec![self.neg(a), self.one()] }
    }

    pub fn padd(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.c.len().max(b.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            match (a.c.get(i), b.c.get(i)) {
                (Some(x), Some(y)) => c.push(self.add(x, y)),
                (Some(x), None) => c.push(x.clone()),
                (None, Some(y)) => c.push(y.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn pneg(&self, a: &Poly) -> Poly {
        Poly { c: a.c.iter().map(|x| self.neg(x)).collect() }
    }

    pub fn psub(&self, a: &Poly, b: &Poly) -> Poly {
        self.padd(a, &self.pneg(b))
    }

    pub fn pscale(&self, a: &Poly, s: &Elem) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(a.c.iter().map(|x| self.mul(x, s)).collect())
    }

    pub fn pmul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![self.zero(); a.c.len() + b.c.len() - 1];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                c[i + j] = self.add(&c[i + j], &self.mul(x, y));
            }
        }
        Poly::from_coeffs(c)
    }

    /// Multiply by `x^k`.
    pub fn pshift(&self, a: &Poly, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![self.zero(); k];
        c.extend(a.c.iter().cloned());
        Poly { c }
    }

    /// Euclidean division; `b` must be nonzero.
    pub fn pdivrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = b.deg().expect("division by zero polynomial");
        let inv_lead = self.inv(b.lead().unwrap()).expect("nonzero leading coefficient");
        let mut r = a.c.clone();
        if a.c.len() <= db {
            return (Poly::zero(), a.clone());
        }
        let mut q = vec![self.zero(); a.c.len() - db];
        for i in (db..a.c.len()).rev() {
            let coef = r[i].clone();
            if coef.is_zero() {
                continue;
            }
            let f = self.mul(&coef, &inv_lead);
            for (j, bj) in b.c.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                r[i - db + j] = self.sub(&r[i - db + j], &self.mul(&f, bj));
            }
            q[i - db] = f;
        }
        r.truncate(db);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn prem(&self, a: &Poly, b: &Poly) -> Poly {
        self.pdivrem(a, b).1
    }

    /// Exact division; panics in debug builds when a remainder is left.
    pub fn pdiv_exact(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.pdivrem(a, b);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn pmonic(&self, a: &Poly) -> Poly {
        match a.lead() {
            None => Poly::zero(),
            Some(l) => self.pscale(a, &self.inv(l).unwrap()),
        }
    }

    pub fn is_monic(&self, a: &Poly) -> bool {
        a.lead().map_or(false, |l| self.is_one(l))
    }

    /// Monic gcd (zero if both inputs vanish).
    pub fn pgcd(&self, a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.prem(&x, &y);
            x = y;
            y = r;
        }
        self.pmonic(&x)
    }

    /// Extended gcd: returns `(g, s, t)` with `s a + t b = g`, `g` not normalized.
    pub fn pxgcd(&self, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.pconst(self.one()), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), self.pconst(self.one()));
        while !r1.is_zero() {
            let (q, r) = self.pdivrem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = self.psub(&s0, &self.pmul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.psub(&t0, &self.pmul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        (r0, s0, t0)
    }

    pub fn pderiv(&self, a: &Poly) -> Poly {
        if a.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            a.c.iter().enumerate().skip(1).map(|(i, x)| self.mul(&self.from_i64(i as i64), x)).collect(),
        )
    }

    /// Horner evaluation at an element of the same field.
    pub fn peval(&self, a: &Poly, x: &Elem) -> Elem {
        let mut r = self.zero();
        for c in a.c.iter().rev() {
            r = self.add(&self.mul(&r, x), c);
        }
        r
    }

    /// Evaluate a polynomial with coefficients in `self` at an element of a
    /// field `big` that contains `self` in its tower.
    pub fn peval_in(&self, a: &Poly, big: &Field, x: &Elem) -> Result<Elem> {
        let mut r = big.zero();
        for c in a.c.iter().rev() {
            r = big.add(&big.mul(&r, x), &big.embed_from(self, c)?);
        }
        Ok(r)
    }

    pub fn ppow(&self, a: &Poly, e: u64) -> Poly {
        let mut r = self.pconst(self.one());
        for _ in 0..e {
            r = self.pmul(&r, a);
        }
        r
    }

    pub fn pmulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.prem(&self.pmul(a, b), m)
    }

    pub fn ppow_mod(&self, a: &Poly, e: &BigUint, m: &Poly) -> Poly {
        let mut r = self.prem(&self.pconst(self.one()), m);
        let base = self.prem(a, m);
        for i in (0..e.bits()).rev() {
            r = self.pmulmod(&r, &r, m);
            if e.bit(i) {
                r = self.pmulmod(&r, &base, m);
            }
        }
        r
    }

    /// Substitute `x -> g(x)`.
    pub fn pcompose(&self, a: &Poly, g: &Poly) -> Poly {
        let mut r = Poly::zero();
        for c in a.c.iter().rev() {
            r = self.padd(&self.pmul(&r, g), &self.pconst(c.clone()));
        }
        r
    }

    /// Map coefficients through a function into another field.
    pub fn pmap(&self, a: &Poly, f: impl Fn(&Elem) -> Result<Elem>) -> Result<Poly> {
        Ok(Poly::from_coeffs(a.c.iter().map(f).collect::<Result<Vec<_>>>()?))
    }

    /// Multiplicity of the irreducible `pi` in `a` and the cofactor.
    pub fn pvaluation(&self, a: &Poly, pi: &Poly) -> Result<(usize, Poly)> {
        if a.is_zero() {
            return Err(MwkError::domain("valuation of zero"));
        }
        let mut m = 0;
        let mut cur = a.clone();
        loop {
            let (q, r) = self.pdivrem(&cur, pi);
            if !r.is_zero() {
                return Ok((m, cur));
            }
            m += 1;
            cur = q;
        }
    }
}
