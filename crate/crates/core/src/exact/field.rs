//! Exact fields and their elements.
//!
//! A [`Field`] is an immutable, cheaply clonable description of one of:
//! the rationals, a prime field, a rational function field over another
//! field, or a simple algebraic extension `base[x]/(m(x))` with `m` monic.
//! Triangular towers are nested simple extensions.
//!
//! Elements are stored in normal form so that structural equality is field
//! equality: rationals in lowest terms, prime-field residues in `0..p`,
//! rational functions with monic coprime denominators, extension elements as
//! full-length coefficient vectors.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{MwkError, Result};
use crate::exact::integer::is_prime_u64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Q(BigRational),
    Fp(u64),
    /// Numerator and denominator over the base of a rational function field.
    Rat(Box<Poly>, Box<Poly>),
    /// Coefficients on `1, x, ..., x^{d-1}`, always of length `d`.
    Ext(Vec<Elem>),
}

/// Dense univariate polynomial, low degree first, without trailing zeros.
/// The coefficient field is supplied by the caller.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    pub c: Vec<Elem>,
}

#[derive(Debug)]
pub struct RatFnField {
    pub base: Field,
    pub var: String,
}

#[derive(Debug)]
pub struct ExtField {
    pub base: Field,
    pub modulus: Poly,
    pub var: String,
}

#[derive(Clone, Debug)]
pub enum Field {
    Q,
    Fp(u64),
    Rat(Arc<RatFnField>),
    Ext(Arc<ExtField>),
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Field::Q, Field::Q) => true,
            (Field::Fp(p), Field::Fp(q)) => p == q,
            (Field::Rat(a), Field::Rat(b)) => {
                Arc::ptr_eq(a, b) || (a.var == b.var && a.base == b.base)
            }
            (Field::Ext(a), Field::Ext(b)) => {
                Arc::ptr_eq(a, b) || (a.var == b.var && a.modulus == b.modulus && a.base == b.base)
            }
            _ => false,
        }
    }
}
impl Eq for Field {}

impl Elem {
    /// Structural zero test; valid because every representation is normalized.
    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Q(r) => r.is_zero(),
            Elem::Fp(a) => *a == 0,
            Elem::Rat(n, _) => n.c.is_empty(),
            Elem::Ext(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Elem::Q(r) => Some(r),
            _ => None,
        }
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lead(&self) -> Option<&Elem> {
        self.c.last()
    }

    pub fn trim(mut self) -> Self {
        while matches!(self.c.last(), Some(e) if e.is_zero()) {
            self.c.pop();
        }
        self
    }

    pub fn from_coeffs(c: Vec<Elem>) -> Self {
        Poly { c }.trim()
    }
}

fn modp(a: i128, p: u64) -> u64 {
    a.rem_euclid(p as i128) as u64
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

impl Field {
    pub fn fp(p: u64) -> Result<Field> {
        if p < 2 || p >= (1u64 << 62) || !is_prime_u64(p) {
            return Err(MwkError::domain(format!("{p} is not a supported prime")));
        }
        Ok(Field::Fp(p))
    }

    pub fn rat(base: &Field, var: &str) -> Field {
        Field::Rat(Arc::new(RatFnField { base: base.clone(), var: var.to_string() }))
    }

    /// Simple extension by a monic polynomial of positive degree.
    /// Irreducibility is the caller's responsibility; see `fields::make_extension`.
    pub fn ext_unchecked(base: &Field, modulus: Poly, var: &str) -> Result<Field> {
        let d = modulus.deg().ok_or_else(|| MwkError::domain("zero modulus"))?;
        if d == 0 {
            return Err(MwkError::domain("constant modulus"));
        }
        if !base.is_one(modulus.lead().unwrap()) {
            return Err(MwkError::domain("extension modulus must be monic"));
        }
        Ok(Field::Ext(Arc::new(ExtField { base: base.clone(), modulus, var: var.to_string() })))
    }

    pub fn base(&self) -> Option<&Field> {
        match self {
            Field::Rat(r) => Some(&r.base),
            Field::Ext(e) => Some(&e.base),
            _ => None,
        }
    }

    pub fn var(&self) -> Option<&str> {
        match self {
            Field::Rat(r) => Some(&r.var),
            Field::Ext(e) => Some(&e.var),
            _ => None,
        }
    }

    /// Characteristic (0 for fields over Q).
    pub fn char(&self) -> u64 {
        match self {
            Field::Q => 0,
            Field::Fp(p) => *p,
            Field::Rat(r) => r.base.char(),
            Field::Ext(e) => e.base.char(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Field::Q | Field::Rat(_) => false,
            Field::Fp(_) => true,
            Field::Ext(e) => e.base.is_finite(),
        }
    }

    /// Degree over the prime field, for finite fields.
    pub fn abs_degree(&self) -> Option<u64> {
        match self {
            Field::Fp(_) => Some(1),
            Field::Ext(e) => Some(e.base.abs_degree()? * e.modulus.deg().unwrap() as u64),
            _ => None,
        }
    }

    /// Number of elements of a finite field.
    pub fn size(&self) -> Option<BigUint> {
        let d = self.abs_degree()?;
        Some(BigUint::from(self.char()).pow(d as u32))
    }

    /// Degree of a simple extension over its immediate base.
    pub fn ext_degree(&self) -> usize {
        match self {
            Field::Ext(e) => e.modulus.deg().unwrap(),
            _ => 1,
        }
    }

    pub fn zero(&self) -> Elem {
        match self {
            Field::Q => Elem::Q(BigRational::zero()),
            Field::Fp(_) => Elem::Fp(0),
            Field::Rat(r) => Elem::Rat(Box::new(Poly::zero()), Box::new(Poly { c: vec![r.base.one()] })),
            Field::Ext(e) => Elem::Ext(vec![e.base.zero(); e.modulus.deg().unwrap()]),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self {
            Field::Q => Elem::Q(BigRational::from_integer(n.clone())),
            Field::Fp(p) => {
                let r = n.mod_floor(&BigInt::from(*p));
                Elem::Fp(r.to_u64().unwrap())
            }
            Field::Rat(r) => {
                let c = r.base.from_bigint(n);
                self.rat_from_parts(Poly::from_coeffs(vec![c]), Poly { c: vec![r.base.one()] })
                    .expect("nonzero denominator")
            }
            Field::Ext(e) => {
                let mut v = vec![e.base.zero(); e.modulus.deg().unwrap()];
                v[0] = e.base.from_bigint(n);
                Elem::Ext(v)
            }
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<Elem> {
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        self.div(&n, &d)
    }

    /// Embed an element of the immediate base.
    pub fn embed_base(&self, a: &Elem) -> Elem {
        match self {
            Field::Rat(r) => self
                .rat_from_parts(Poly::from_coeffs(vec![a.clone()]), Poly { c: vec![r.base.one()] })
                .expect("unit denominator"),
            Field::Ext(e) => {
                let mut v = vec![e.base.zero(); e.modulus.deg().unwrap()];
                v[0] = a.clone();
                Elem::Ext(v)
            }
            _ => a.clone(),
        }
    }

    /// Embed an element of any field in the base chain of `self`.
    pub fn embed_from(&self, src: &Field, a: &Elem) -> Result<Elem> {
        if src == self {
            return Ok(a.clone());
        }
        match self.base() {
            Some(b) => {
                let inner = b.embed_from(src, a)?;
                Ok(self.embed_base(&inner))
            }
            None => Err(MwkError::domain("field is not a subfield in the tower")),
        }
    }

    /// The adjoined generator of an extension or the variable of k(t).
    pub fn gen(&self) -> Result<Elem> {
        match self {
            Field::Ext(e) => {
                let d = e.modulus.deg().unwrap();
                let mut v = vec![e.base.zero(); d];
                if d == 1 {
                    v[0] = e.base.neg(&e.modulus.c[0]);
                } else {
                    v[1] = e.base.one();
                }
                Ok(Elem::Ext(v))
            }
            Field::Rat(r) => Ok(Elem::Rat(
                Box::new(Poly { c: vec![r.base.zero(), r.base.one()] }),
                Box::new(Poly { c: vec![r.base.one()] }),
            )),
            _ => Err(MwkError::domain("prime field has no generator")),
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.is_zero()
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Q, Elem::Q(x), Elem::Q(y)) => Elem::Q(x + y),
            (Field::Fp(p), Elem::Fp(x), Elem::Fp(y)) => Elem::Fp(((*x as u128 + *y as u128) % *p as u128) as u64),
            (Field::Rat(r), Elem::Rat(n1, d1), Elem::Rat(n2, d2)) => {
                let k = &r.base;
                if d1 == d2 {
                    let n = k.padd(n1, n2);
                    return self.rat_from_parts(n, (**d1).clone()).unwrap();
                }
                let n = k.padd(&k.pmul(n1, d2), &k.pmul(n2, d1));
                let d = k.pmul(d1, d2);
                self.rat_from_parts(n, d).unwrap()
            }
            (Field::Ext(e), Elem::Ext(x), Elem::Ext(y)) => {
                Elem::Ext(x.iter().zip(y).map(|(u, v)| e.base.add(u, v)).collect())
            }
            _ => panic!("element does not belong to field {self}"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Field::Q, Elem::Q(x)) => Elem::Q(-x),
            (Field::Fp(p), Elem::Fp(x)) => Elem::Fp(if *x == 0 { 0 } else { p - x }),
            (Field::Rat(r), Elem::Rat(n, d)) => Elem::Rat(Box::new(r.base.pneg(n)), d.clone()),
            (Field::Ext(e), Elem::Ext(x)) => Elem::Ext(x.iter().map(|u| e.base.neg(u)).collect()),
            _ => panic!("element does not belong to field {self}"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Q, Elem::Q(x), Elem::Q(y)) => Elem::Q(x * y),
            (Field::Fp(p), Elem::Fp(x), Elem::Fp(y)) => Elem::Fp(mulmod(*x, *y, *p)),
            (Field::Rat(r), Elem::Rat(n1, d1), Elem::Rat(n2, d2)) => {
                let k = &r.base;
                if n1.is_zero() || n2.is_zero() {
                    return self.zero();
                }
                let n = k.pmul(n1, n2);
                let d = k.pmul(d1, d2);
                self.rat_from_parts(n, d).unwrap()
            }
            (Field::Ext(e), Elem::Ext(x), Elem::Ext(y)) => {
                let k = &e.base;
                let px = Poly::from_coeffs(x.clone());
                let py = Poly::from_coeffs(y.clone());
                let prod = k.pmul(&px, &py);
                let r = k.prem(&prod, &e.modulus);
                self.ext_from_poly(&r)
            }
            _ => panic!("element does not belong to field {self}"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(MwkError::domain("division by zero"));
        }
        Ok(match (self, a) {
            (Field::Q, Elem::Q(x)) => Elem::Q(x.recip()),
            (Field::Fp(p), Elem::Fp(x)) => Elem::Fp(powmod(*x, p - 2, *p)),
            (Field::Rat(_), Elem::Rat(n, d)) => self.rat_from_parts((**d).clone(), (**n).clone())?,
            (Field::Ext(e), Elem::Ext(x)) => {
                let k = &e.base;
                let px = Poly::from_coeffs(x.clone());
                let (g, s, _) = k.pxgcd(&px, &e.modulus);
                if g.deg() != Some(0) {
                    return Err(MwkError::domain(format!(
                        "element is a zero divisor: modulus of {} is reducible",
                        self
                    )));
                }
                let ginv = k.inv(&g.c[0])?;
                self.ext_from_poly(&k.pscale(&s, &ginv))
            }
            _ => panic!("element does not belong to field {self}"),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, e: u64) -> Elem {
        self.pow_big(a, &BigUint::from(e))
    }

    pub fn pow_big(&self, a: &Elem, e: &BigUint) -> Elem {
        let mut r = self.one();
        let bits = e.bits();
        for i in (0..bits).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, a: &Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn ext_from_poly(&self, r: &Poly) -> Elem {
        match self {
            Field::Ext(e) => {
                let d = e.modulus.deg().unwrap();
                let r = if r.deg().map_or(false, |x| x >= d) { e.base.prem(r, &e.modulus) } else { r.clone() };
                let mut v = r.c;
                v.resize(d, e.base.zero());
                Elem::Ext(v)
            }
            _ => panic!("not an extension field"),
        }
    }

    /// Coefficient polynomial of an extension element.
    pub fn ext_to_poly(&self, a: &Elem) -> Poly {
        match a {
            Elem::Ext(v) => Poly::from_coeffs(v.clone()),
            _ => panic!("not an extension element"),
        }
    }

    /// Build a normalized rational function from numerator and denominator.
    pub fn rat_from_parts(&self, n: Poly, d: Poly) -> Result<Elem> {
        let k = match self {
            Field::Rat(r) => &r.base,
            _ => panic!("not a rational function field"),
        };
        if d.is_zero() {
            return Err(MwkError::domain("zero denominator"));
        }
        if n.is_zero() {
            return Ok(Elem::Rat(Box::new(Poly::zero()), Box::new(Poly { c: vec![k.one()] })));
        }
        let (n, d) = if d.deg() == Some(0) {
            (n, d)
        } else {
            let g = k.pgcd(&n, &d);
            if g.deg() == Some(0) {
                (n, d)
            } else {
                (k.pdiv_exact(&n, &g), k.pdiv_exact(&d, &g))
            }
        };
        let lc = k.inv(d.lead().unwrap())?;
        Ok(Elem::Rat(Box::new(k.pscale(&n, &lc)), Box::new(k.pscale(&d, &lc))))
    }

    pub fn rat_parts<'a>(&self, a: &'a Elem) -> (&'a Poly, &'a Poly) {
        match a {
            Elem::Rat(n, d) => (n, d),
            _ => panic!("not a rational function"),
        }
    }

    /// Embed a polynomial over the base into k(t).
    pub fn rat_from_poly(&self, p: &Poly) -> Elem {
        let k = self.base().unwrap();
        Elem::Rat(Box::new(p.clone()), Box::new(Poly { c: vec![k.one()] }))
    }

    /// Element of the prime field if `a` lies in it (used for printing and
    /// integer recognition).
    pub fn as_prime_integer(&self, a: &Elem) -> Option<BigInt> {
        match (self, a) {
            (Field::Q, Elem::Q(x)) if x.is_integer() => Some(x.numer().clone()),
            (Field::Fp(_), Elem::Fp(x)) => Some(BigInt::from(*x)),
            (Field::Rat(r), Elem::Rat(n, d)) if d.deg() == Some(0) && n.deg().unwrap_or(0) == 0 => {
                if n.is_zero() {
                    Some(BigInt::zero())
                } else {
                    r.base.as_prime_integer(&n.c[0])
                }
            }
            (Field::Ext(e), Elem::Ext(v)) if v[1..].iter().all(|x| x.is_zero()) => e.base.as_prime_integer(&v[0]),
            _ => None,
        }
    }

    /// Human readable rendering; parsable back by the CLI.
    pub fn show(&self, a: &Elem) -> String {
        match (self, a) {
            (Field::Q, Elem::Q(x)) => {
                if x.is_integer() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            (Field::Fp(_), Elem::Fp(x)) => x.to_string(),
            (Field::Rat(r), Elem::Rat(n, d)) => {
                let ns = r.base.show_poly(n, &r.var);
                if d.deg() == Some(0) {
                    ns
                } else {
                    let ds = r.base.show_poly(d, &r.var);
                    format!("({})/({})", ns, ds)
                }
            }
            (Field::Ext(e), Elem::Ext(v)) => e.base.show_poly(&Poly::from_coeffs(v.clone()), &e.var),
            _ => panic!("element does not belong to field {self}"),
        }
    }

    fn show_coeff_atomic(&self, c: &Elem) -> (String, bool) {
        let s = self.show(c);
        let atomic = !s[1..].contains(['+', '-', '/']) && !s.contains('*');
        (s, atomic)
    }

    pub fn show_poly(&self, p: &Poly, var: &str) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in p.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (cs, atomic) = self.show_coeff_atomic(c);
            let mon = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if i == 0 {
                if atomic { cs } else { format!("({cs})") }
            } else if cs == "1" {
                mon
            } else if cs == "-1" {
                format!("-{mon}")
            } else if atomic {
                format!("{cs}*{mon}")
            } else {
                format!("({cs})*{mon}")
            };
            if out.is_empty() {
                out = term;
            } else if let Some(stripped) = term.strip_prefix('-') {
                out.push('-');
                out.push_str(stripped);
            } else {
                out.push('+');
                out.push_str(&term);
            }
        }
        out
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "QQ"),
            Field::Fp(p) => write!(f, "GF({p})"),
            Field::Rat(r) => write!(f, "{}({})", r.base, r.var),
            Field::Ext(e) => write!(f, "{}[{}]/({})", e.base, e.var, e.base.show_poly(&e.modulus, &e.var)),
        }
    }
}

/// Normalize a signed machine integer into `F_p`.
pub fn fp_from_i128(a: i128, p: u64) -> Elem {
    Elem::Fp(modp(a, p))
}

/// Signed-integer helper used by square-class code over Q.
pub fn sign_of(q: &BigRational) -> i32 {
    if q.is_negative() {
        -1
    } else if q.is_zero() {
        0
    } else {
        1
    }
}
