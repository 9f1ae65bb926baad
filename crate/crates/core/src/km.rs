//! Milnor K-theory: symbols, tame residues, specialization, decidable
//! equality and norms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field};
use crate::exact::integer::{hilbert_symbol, prime_divisors, valuation};
use crate::fields::{self, Extension, FieldMap, Place};

/// `sum n_w {u_1, ..., u_n}` in `K^M_n(K)`. Degree 0 is the integers
/// (the empty word); negative degrees are the zero group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmElem {
    pub field: Field,
    pub degree: i64,
    pub terms: BTreeMap<Vec<Elem>, i64>,
}

impl KmElem {
    pub fn zero(k: &Field, degree: i64) -> Self {
        KmElem { field: k.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn int(k: &Field, n: i64) -> Self {
        let mut r = Self::zero(k, 0);
        r.push(Vec::new(), n);
        r
    }

    /// The symbol `{u_1, ..., u_n}`.
    pub fn symbol(k: &Field, units: &[Elem]) -> Result<Self> {
        if units.iter().any(|u| u.is_zero()) {
            return Err(MwkError::domain("symbols take units; got 0"));
        }
        let mut r = Self::zero(k, units.len() as i64);
        r.push(units.to_vec(), 1);
        Ok(r.normalized())
    }

    fn push(&mut self, w: Vec<Elem>, n: i64) {
        if n == 0 || self.degree < 0 {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&w);
        }
    }

    /// Drop words containing 1 and collapse degree one to a single symbol.
    fn normalized(mut self) -> Self {
        let k = self.field.clone();
        let one = k.one();
        self.terms.retain(|w, _| !w.contains(&one));
        if self.degree == 1 && !self.terms.is_empty() {
            let mut p = k.one();
            for (w, n) in &self.terms {
                p = k.mul(&p, &k.powi(&w[0], *n).unwrap());
            }
            self.terms.clear();
            if !k.is_one(&p) {
                self.terms.insert(vec![p], 1);
            }
        }
        self
    }

    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Integer value of a degree-0 element.
    pub fn as_int(&self) -> i64 {
        debug_assert!(self.degree == 0);
        self.terms.get(&Vec::new()).copied().unwrap_or(0)
    }

    fn check(&self, o: &KmElem) -> Result<()> {
        if self.field != o.field {
            return Err(MwkError::domain(format!("field mismatch: {} vs {}", self.field, o.field)));
        }
        if self.degree != o.degree {
            return Err(MwkError::domain(format!("degree mismatch: {} vs {}", self.degree, o.degree)));
        }
        Ok(())
    }

    pub fn add(&self, o: &KmElem) -> Result<KmElem> {
        self.check(o)?;
        let mut r = self.clone();
        for (w, n) in &o.terms {
            r.push(w.clone(), *n);
        }
        Ok(r.normalized())
    }

    pub fn neg(&self) -> KmElem {
        self.scale(-1)
    }

    pub fn sub(&self, o: &KmElem) -> Result<KmElem> {
        self.add(&o.neg())
    }

    pub fn scale(&self, m: i64) -> KmElem {
        let mut r = KmElem::zero(&self.field, self.degree);
        for (w, n) in &self.terms {
            r.push(w.clone(), n * m);
        }
        r.normalized()
    }

    pub fn mul(&self, o: &KmElem) -> Result<KmElem> {
        if self.field != o.field {
            return Err(MwkError::domain("field mismatch"));
        }
        let mut r = KmElem::zero(&self.field, self.degree + o.degree);
        for (w1, n1) in &self.terms {
            for (w2, n2) in &o.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().cloned());
                r.push(w, n1 * n2);
            }
        }
        Ok(r.normalized())
    }

    /// Base change along a field map.
    pub fn map(&self, f: &FieldMap) -> Result<KmElem> {
        let mut r = KmElem::zero(f.dst(), self.degree);
        for (w, n) in &self.terms {
            let w2 = w.iter().map(|u| f.apply(u)).collect::<Result<Vec<_>>>()?;
            r.push(w2, *n);
        }
        Ok(r.normalized())
    }
}

// ---------------------------------------------------------------------------
// Residues through the algebra K^M(kappa)[xi], xi^2 = {-1} xi.

/// `s + xi d` with `s` of degree `n` and `d` of degree `n - 1`.
struct Theta {
    s: KmElem,
    d: KmElem,
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl Theta {
    fn of_unit(place: &Place, u: &Elem) -> Result<Theta> {
        let kappa = &place.residue;
        let (m, a) = place.unit_decomposition(u)?;
        Ok(Theta { s: KmElem::symbol(kappa, &[a])?, d: KmElem::int(kappa, m) })
    }

    fn mul(&self, y: &Theta) -> Result<Theta> {
        let n = self.s.degree;
        let kappa = &self.s.field;
        let m1 = KmElem::symbol(kappa, &[kappa.from_i64(-1)])?;
        let s = self.s.mul(&y.s)?;
        let d = self.s.mul(&y.d)?.scale(sign(n))
            .add(&self.d.mul(&y.s)?)?
            .add(&m1.mul(&self.d)?.mul(&y.d)?.scale(sign(n - 1)))?;
        Ok(Theta { s, d })
    }
}

fn theta(x: &KmElem, place: &Place) -> Result<Theta> {
    let kappa = &place.residue;
    let mut acc = Theta { s: KmElem::zero(kappa, x.degree), d: KmElem::zero(kappa, x.degree - 1) };
    for (w, n) in &x.terms {
        let t = if w.is_empty() {
            Theta { s: KmElem::int(kappa, 1), d: KmElem::zero(kappa, -1) }
        } else {
            let mut t = Theta::of_unit(place, &w[0])?;
            for u in &w[1..] {
                t = t.mul(&Theta::of_unit(place, u)?)?;
            }
            t
        };
        acc.s = acc.s.add(&t.s.scale(*n))?;
        acc.d = acc.d.add(&t.d.scale(*n))?;
    }
    Ok(acc)
}

fn check_place(x: &KmElem, place: &Place) -> Result<()> {
    if x.field != place.func {
        return Err(MwkError::domain(format!("place lives on {}, symbol on {}", place.func, x.field)));
    }
    Ok(())
}

/// Tame residue `K^M_n(k(t)) -> K^M_{n-1}(kappa_v)`.
pub fn km_residue(x: &KmElem, place: &Place) -> Result<KmElem> {
    check_place(x, place)?;
    if x.degree < 1 {
        return Ok(KmElem::zero(&place.residue, x.degree - 1));
    }
    Ok(theta(x, place)?.d)
}

/// Specialization with respect to the place's uniformizer.
pub fn km_specialize(x: &KmElem, place: &Place) -> Result<KmElem> {
    check_place(x, place)?;
    Ok(theta(x, place)?.s)
}

// ---------------------------------------------------------------------------
// Equality

/// Whether `K^M_n` equality over this field and degree is decidable here.
pub fn km_decidable(k: &Field, n: i64) -> bool {
    if n <= 1 || k.is_finite() {
        return true;
    }
    match k {
        Field::Q => n == 2,
        Field::Rat(r) => {
            let b = &r.base;
            b.is_finite() || (*b == Field::Q && n <= 2)
        }
        _ => false,
    }
}

pub fn km_equal(a: &KmElem, b: &KmElem) -> Result<bool> {
    km_is_zero(&a.sub(b)?)
}

pub fn km_is_zero(x: &KmElem) -> Result<bool> {
    let k = &x.field;
    let n = x.degree;
    if n < 0 || x.is_formally_zero() {
        return Ok(true);
    }
    if n <= 1 {
        // Normalized: integers, or a single unit symbol different from 1.
        return Ok(false);
    }
    if k.is_finite() {
        return Ok(true);
    }
    if !km_decidable(k, n) {
        return Err(MwkError::capability(format!(
            "K^M_{n} equality over {k} is outside the supported matrix (finite fields, QQ in degree <= 2, k(t) over those)"
        )));
    }
    match k {
        Field::Q => q_k2_is_zero(x),
        Field::Rat(_) => {
            let mut units: Vec<Elem> = Vec::new();
            for w in x.terms.keys() {
                units.extend(w.iter().cloned());
            }
            for place in fields::support_places(k, &units)? {
                if !km_is_zero(&km_residue(x, &place)?)? {
                    return Ok(false);
                }
            }
            let p0 = Place::rational(k, &k.base().unwrap().zero())?;
            km_is_zero(&km_specialize(x, &p0)?)
        }
        _ => unreachable!(),
    }
}

fn rat_int(q: &Elem) -> BigInt {
    let r = q.as_rational().unwrap();
    r.numer() * r.denom()
}

fn rat_val(q: &Elem, p: u64) -> i64 {
    let r = q.as_rational().unwrap();
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

fn rat_mod_p(q: &Elem, p: u64) -> Result<BigInt> {
    let r = q.as_rational().unwrap();
    let pb = BigInt::from(p);
    let strip = |n: &BigInt| -> BigInt {
        let mut n = n.clone();
        while (&n % &pb).is_zero() {
            n /= &pb;
        }
        n
    };
    let num = strip(r.numer()).mod_floor(&pb);
    let den = strip(r.denom()).mod_floor(&pb);
    let inv = den.modpow(&(&pb - 2), &pb);
    Ok((num * inv).mod_floor(&pb))
}


/// `K_2(QQ)`: tame symbols at odd primes plus the Hilbert symbol at 2.
fn q_k2_is_zero(x: &KmElem) -> Result<bool> {
    let mut primes: Vec<u64> = Vec::new();
    for w in x.terms.keys() {
        for u in w {
            let r = u.as_rational().unwrap();
            for n in [r.numer(), r.denom()] {
                for p in prime_divisors(&n.abs())? {
                    if p != 2 && !primes.contains(&p) {
                        primes.push(p);
                    }
                }
            }
        }
    }
    for p in primes {
        let pb = BigInt::from(p);
        let mut acc = BigInt::one();
        for (w, n) in &x.terms {
            let (a, b) = (&w[0], &w[1]);
            let (al, be) = (rat_val(a, p), rat_val(b, p));
            // (-1)^{al be} a^be / b^al
            let mut t = BigInt::one();
            if (al * be).rem_euclid(2) == 1 {
                t = &pb - 1;
            }
            let am = rat_mod_p(a, p)?;
            let bm = rat_mod_p(b, p)?;
            let powm = |base: &BigInt, e: i64| -> BigInt {
                let e = e.rem_euclid(p as i64 - 1);
                base.modpow(&BigInt::from(e), &pb)
            };
            t = (t * powm(&am, be) * powm(&bm, -al)).mod_floor(&pb);
            acc = (acc * powm(&t, *n)).mod_floor(&pb);
        }
        if !acc.is_one() {
            return Ok(false);
        }
    }
    let mut h = 1;
    for (w, n) in &x.terms {
        if n.rem_euclid(2) == 1 {
            h *= hilbert_symbol(&rat_int(&w[0]), &rat_int(&w[1]), 2);
        }
    }
    Ok(h == 1)
}

// ---------------------------------------------------------------------------
// Norms

/// Transfer along a finite extension: degree in `K^M_0`, the norm in
/// `K^M_1`, zero in higher degrees over finite fields.
pub fn km_transfer(x: &KmElem, ext: &Extension) -> Result<KmElem> {
    if x.field != ext.top {
        return Err(MwkError::domain(format!("symbol lives on {}, extension top is {}", x.field, ext.top)));
    }
    let k = &ext.base;
    match x.degree {
        d if d < 0 => Ok(KmElem::zero(k, d)),
        0 => Ok(KmElem::int(k, x.as_int() * ext.degree() as i64)),
        1 => {
            let mut r = KmElem::zero(k, 1);
            for (w, n) in &x.terms {
                r.push(vec![ext.norm(&w[0])], *n);
            }
            Ok(r.normalized())
        }
        d => {
            if k.is_finite() || x.is_formally_zero() {
                Ok(KmElem::zero(k, d))
            } else {
                Err(MwkError::capability(format!(
                    "norms on K^M_{d} over the infinite field {k} (general Kato transfers) are not supported"
                )))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

pub fn show_km(x: &KmElem) -> String {
    let k = &x.field;
    if x.degree == 0 {
        return x.as_int().to_string();
    }
    if x.terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (w, n) in &x.terms {
        let body = format!("{{{}}}", w.iter().map(|u| k.show(u)).collect::<Vec<_>>().join(", "));
        let body = if n.abs() == 1 { body } else { format!("{}*{}", n.abs(), body) };
        if out.is_empty() {
            out = if *n < 0 { format!("-{body}") } else { body };
        } else if *n < 0 {
            out.push_str(&format!(" - {body}"));
        } else {
            out.push_str(&format!(" + {body}"));
        }
    }
    out
}

impl std::fmt::Display for KmElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", show_km(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::field::Poly;

    fn f5t() -> (Field, Field, Elem) {
        let f5 = Field::fp(5).unwrap();
        let k = Field::rat(&f5, "t");
        let t = k.gen().unwrap();
        (f5, k, t)
    }

    #[test]
    fn residue_examples() {
        let (f5, k, t) = f5t();
        let p = Place::rational(&k, &f5.zero()).unwrap();
        let x = KmElem::symbol(&k, &[t.clone(), k.from_i64(2)]).unwrap();
        let r = km_residue(&x, &p).unwrap();
        assert!(km_equal(&r, &KmElem::symbol(&f5, &[f5.from_i64(2)]).unwrap()).unwrap());
        let u = k.add(&t, &k.one());
        assert!(km_residue(&KmElem::symbol(&k, &[u]).unwrap(), &p).unwrap().is_formally_zero());
        let t2 = KmElem::symbol(&k, &[k.mul(&t, &t)]).unwrap();
        assert_eq!(km_residue(&t2, &p).unwrap().as_int(), 2);
    }

    #[test]
    fn steinberg_and_multiplicativity() {
        let k = Field::fp(7).unwrap();
        let a = k.from_i64(3);
        let s = KmElem::symbol(&k, &[a.clone(), k.sub(&k.one(), &a)]).unwrap();
        assert!(km_is_zero(&s).unwrap());
        let q = Field::Q;
        let four = KmElem::symbol(&q, &[q.from_i64(4)]).unwrap();
        let two = KmElem::symbol(&q, &[q.from_i64(2)]).unwrap().scale(2);
        assert!(km_equal(&four, &two).unwrap());
    }

    #[test]
    fn function_field_steinberg() {
        let (_, k, t) = f5t();
        let s = KmElem::symbol(&k, &[t.clone(), k.sub(&k.one(), &t)]).unwrap();
        assert!(km_is_zero(&s).unwrap());
        let u = KmElem::symbol(&k, &[t.clone(), k.from_i64(2)]).unwrap();
        assert!(!km_is_zero(&u).unwrap());
        // {t, t} = {t, -1}
        let a = KmElem::symbol(&k, &[t.clone(), t.clone()]).unwrap();
        let b = KmElem::symbol(&k, &[t.clone(), k.from_i64(-1)]).unwrap();
        assert!(km_equal(&a, &b).unwrap());
    }

    #[test]
    fn rational_k2() {
        let q = Field::Q;
        let s = |a: i64, b: i64| KmElem::symbol(&q, &[q.from_i64(a), q.from_i64(b)]).unwrap();
        assert!(km_is_zero(&s(3, -2)).unwrap()); // 3 + (-2) = 1
        assert!(!km_is_zero(&s(-1, -1)).unwrap());
        assert!(km_is_zero(&s(-1, -1).scale(2)).unwrap());
        assert!(!km_is_zero(&s(3, 5)).unwrap());
        assert!(km_is_zero(&s(2, 5).add(&s(5, 2)).unwrap()).unwrap());
    }

    #[test]
    fn norms_from_f9() {
        let f3 = Field::fp(3).unwrap();
        let f = Poly::from_coeffs(vec![f3.one(), f3.zero(), f3.one()]);
        let e = Extension::simple(&f3, &f, "a", "w").unwrap();
        let a = e.top.gen().unwrap();
        assert_eq!(km_transfer(&KmElem::int(&e.top, 1), &e).unwrap().as_int(), 2);
        let n = km_transfer(&KmElem::symbol(&e.top, &[a.clone()]).unwrap(), &e).unwrap();
        assert!(km_is_zero(&n).unwrap());
        let b = KmElem::symbol(&e.top, &[a.clone(), e.top.add(&a, &e.top.one())]).unwrap();
        assert!(km_transfer(&b, &e).unwrap().is_formally_zero());
    }
}
