//! Field towers, finite extensions with triangular presentations, canonical
//! module generators, square classes, places of `k(t)` and field maps.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{MwkError, Result};
use crate::exact::factor::{self, is_irreducible_fq, squarefree_fq};
use crate::exact::field::{Elem, Field, Poly};
use crate::exact::integer::squarefree_class;
use crate::exact::linalg::{self, Matrix};

// ---------------------------------------------------------------------------
// Square classes

/// Squarefree decomposition over a perfect field (characteristic zero or finite).
pub fn squarefree_decomposition(k: &Field, f: &Poly) -> Result<Vec<(Poly, usize)>> {
    if k.is_finite() {
        return Ok(squarefree_fq(k, f));
    }
    if k.char() != 0 {
        return Err(MwkError::capability(format!("squarefree decomposition over imperfect {k}")));
    }
    let f = k.pmonic(f);
    let mut out = Vec::new();
    if f.deg().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let df = k.pderiv(&f);
    let mut a = k.pgcd(&f, &df);
    let mut b = k.pdiv_exact(&f, &a);
    let mut c = k.pdiv_exact(&df, &a);
    let mut d = k.psub(&c, &k.pderiv(&b));
    let mut i = 1;
    while b.deg().unwrap_or(0) > 0 {
        a = k.pgcd(&b, &d);
        if a.deg().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = k.pdiv_exact(&b, &a);
        c = k.pdiv_exact(&d, &a);
        d = k.psub(&c, &k.pderiv(&b));
        i += 1;
    }
    Ok(out)
}

fn q_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Whether a nonzero element is a square.
pub fn is_square(k: &Field, a: &Elem) -> Result<bool> {
    if a.is_zero() {
        return Err(MwkError::domain("zero is not a unit"));
    }
    match k {
        Field::Q => Ok(q_sqrt(a.as_rational().unwrap()).is_some()),
        _ if k.is_finite() => {
            if k.char() == 2 {
                return Ok(true);
            }
            let q = k.size().unwrap();
            let e = (q - BigUint::one()) / BigUint::from(2u32);
            Ok(k.is_one(&k.pow_big(a, &e)))
        }
        Field::Rat(r) => {
            let base = &r.base;
            let (n, d) = k.rat_parts(a);
            let m = base.pmul(n, d);
            if base.char() == 2 && base.is_finite() {
                return Ok(m.c.iter().enumerate().all(|(i, c)| i % 2 == 0 || c.is_zero()));
            }
            let parts = squarefree_decomposition(base, &m)?;
            if parts.iter().any(|(_, e)| e % 2 == 1) {
                return Ok(false);
            }
            is_square(base, m.lead().unwrap())
        }
        _ => Err(MwkError::capability(format!("square test over {k} is not supported"))),
    }
}

/// A square root of a square.
pub fn sqrt(k: &Field, a: &Elem) -> Result<Elem> {
    if a.is_zero() {
        return Ok(k.zero());
    }
    match k {
        Field::Q => q_sqrt(a.as_rational().unwrap()).map(Elem::Q).ok_or_else(|| MwkError::domain("not a square")),
        _ if k.is_finite() => {
            let f = Poly::from_coeffs(vec![k.neg(a), k.zero(), k.one()]);
            let r = factor::roots_fq(k, &f);
            r.into_iter().next().ok_or_else(|| MwkError::domain("not a square"))
        }
        Field::Rat(r) => {
            let base = &r.base;
            if base.char() == 2 {
                return Err(MwkError::capability("square roots in characteristic 2 function fields"));
            }
            let (n, d) = k.rat_parts(a);
            let root = |p: &Poly| -> Result<Poly> {
                let mut acc = base.pconst(sqrt(base, p.lead().unwrap())?);
                for (g, e) in squarefree_decomposition(base, p)? {
                    if e % 2 == 1 {
                        return Err(MwkError::domain("not a square"));
                    }
                    acc = base.pmul(&acc, &base.ppow(&g, (e / 2) as u64));
                }
                Ok(acc)
            };
            k.rat_from_parts(root(n)?, root(d)?)
        }
        _ => Err(MwkError::capability(format!("square roots over {k} are not supported"))),
    }
}

/// The first non-square of an odd finite field in enumeration order.
pub fn first_nonsquare(k: &Field) -> Result<Elem> {
    if !k.is_finite() || k.char() == 2 {
        return Err(MwkError::domain("only odd finite fields have a distinguished non-square"));
    }
    let mut i = 1u64;
    loop {
        let a = nth_fq(k, i);
        if !is_square(k, &a)? {
            return Ok(a);
        }
        i += 1;
    }
}

/// The `i`-th element in the order of [`enumerate_fq`].
pub fn nth_fq(k: &Field, i: u64) -> Elem {
    match k {
        Field::Fp(_) => Elem::Fp(i),
        Field::Ext(e) => {
            let s = e.base.size().and_then(|n| u64::try_from(n).ok()).unwrap_or(u64::MAX);
            let d = e.modulus.deg().unwrap();
            let mut digits = vec![0u64; d];
            let mut rest = i;
            for j in (0..d).rev() {
                digits[j] = rest % s;
                rest /= s;
            }
            Elem::Ext(digits.into_iter().map(|x| nth_fq(&e.base, x)).collect())
        }
        _ => panic!("not a finite field"),
    }
}

/// All elements of a finite field in a fixed order.
pub fn enumerate_fq(k: &Field) -> Vec<Elem> {
    match k {
        Field::Fp(p) => (0..*p).map(Elem::Fp).collect(),
        Field::Ext(e) => {
            let inner = enumerate_fq(&e.base);
            let d = e.modulus.deg().unwrap();
            let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
            for _ in 0..d {
                let mut next = Vec::new();
                for v in &out {
                    for x in &inner {
                        let mut w = v.clone();
                        w.push(x.clone());
                        next.push(w);
                    }
                }
                out = next;
            }
            out.into_iter().map(Elem::Ext).collect()
        }
        _ => panic!("not a finite field"),
    }
}

/// Canonical representative of the square class of a unit, where the field
/// supports it; otherwise the element itself.
pub fn square_class_rep(k: &Field, a: &Elem) -> Result<Elem> {
    if a.is_zero() {
        return Err(MwkError::domain("zero is not a unit"));
    }
    match k {
        Field::Q => {
            let q = a.as_rational().unwrap();
            Ok(k.from_bigint(&squarefree_class(q.numer(), q.denom())?))
        }
        _ if k.is_finite() => {
            if k.char() == 2 || is_square(k, a)? {
                Ok(k.one())
            } else {
                first_nonsquare(k)
            }
        }
        Field::Rat(r) if r.base.is_finite() || r.base == Field::Q => {
            let base = &r.base;
            let (n, d) = k.rat_parts(a);
            let m = base.pmul(n, d);
            let lc = square_class_rep(base, m.lead().unwrap())?;
            let mut acc = base.pconst(lc);
            for (g, e) in squarefree_decomposition(base, &m)? {
                if e % 2 == 1 {
                    acc = base.pmul(&acc, &g);
                }
            }
            Ok(k.rat_from_poly(&acc))
        }
        _ => Ok(a.clone()),
    }
}

/// Whether units have canonical square-class representatives.
pub fn has_square_classes(k: &Field) -> bool {
    match k {
        Field::Q => true,
        Field::Rat(r) => r.base.is_finite() || r.base == Field::Q,
        _ => k.is_finite(),
    }
}

// ---------------------------------------------------------------------------
// Irreducibility and p-th powers

/// Whether `c` is a p-th power in a field of characteristic p, where decidable.
pub fn is_pth_power(k: &Field, c: &Elem) -> Result<bool> {
    let p = k.char();
    if p == 0 {
        return Err(MwkError::domain("characteristic zero"));
    }
    if k.is_finite() {
        return Ok(true);
    }
    match k {
        Field::Rat(r) if r.base.is_finite() => Ok(factor::rat_is_pth_power(k, c)),
        Field::Ext(e) => {
            // A purely inseparable stage x^p - c0 over k(s): its p-th powers are k(s).
            let m = &e.modulus;
            let pure = m.deg() == Some(p as usize) && m.c[1..p as usize].iter().all(|x| x.is_zero());
            if pure && matches!(&e.base, Field::Rat(r) if r.base.is_finite()) {
                let v = match c {
                    Elem::Ext(v) => v,
                    _ => unreachable!(),
                };
                return Ok(v[1..].iter().all(|x| x.is_zero()));
            }
            Err(MwkError::capability(format!("p-th power test over {k}")))
        }
        _ => Err(MwkError::capability(format!("p-th power test over {k}"))),
    }
}

/// Decide irreducibility of a polynomial over a supported field.
pub fn is_irreducible(k: &Field, f: &Poly) -> Result<bool> {
    match f.deg() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        _ => {}
    }
    if k.is_finite() {
        return Ok(is_irreducible_fq(k, f));
    }
    let n = f.deg().unwrap();
    let p = k.char() as usize;
    let g = k.pmonic(f);
    if p != 0 && n == p && g.c[1..p].iter().all(|c| c.is_zero()) {
        return Ok(!is_pth_power(k, &k.neg(&g.c[0]))?);
    }
    match k {
        Field::Q | Field::Rat(_) => {
            let fac = factor::factor(k, &g)?;
            Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
        }
        _ => Err(MwkError::capability(format!("irreducibility over {k} is not decidable here"))),
    }
}

// ---------------------------------------------------------------------------
// Extensions

/// A finite extension `top / base` presented as a triangular tower of
/// simple extensions, each stage monic after dividing out a leading unit.
#[derive(Clone, Debug)]
pub struct Extension {
    pub base: Field,
    pub top: Field,
    /// `stages[i]` is the field obtained after adjoining the first `i + 1` generators.
    pub stages: Vec<Field>,
    pub vars: Vec<String>,
    pub degrees: Vec<usize>,
    pub separable: Vec<bool>,
    /// Leading coefficients of the user-supplied stage polynomials.
    pub scales: Vec<Elem>,
    /// Label of the canonical generator `w` of `omega_{top/base}`.
    pub label: String,
}

impl Extension {
    /// Build a tower from stage polynomials. `polys[i]` has coefficients in
    /// the field below stage `i`. Every stage is checked to be irreducible.
    pub fn new(base: &Field, polys: &[Poly], vars: &[&str], label: &str) -> Result<Extension> {
        Self::build(base, polys, vars, label, true)
    }

    /// Same as [`Extension::new`] without the irreducibility check; callers
    /// must already hold a certificate.
    pub fn new_trusted(base: &Field, polys: &[Poly], vars: &[&str], label: &str) -> Result<Extension> {
        Self::build(base, polys, vars, label, false)
    }

    fn build(base: &Field, polys: &[Poly], vars: &[&str], label: &str, check: bool) -> Result<Extension> {
        if polys.len() != vars.len() {
            return Err(MwkError::domain("one variable per stage polynomial is required"));
        }
        let mut cur = base.clone();
        let mut stages = Vec::new();
        let mut degrees = Vec::new();
        let mut separable = Vec::new();
        let mut scales = Vec::new();
        for (f, v) in polys.iter().zip(vars) {
            let d = f.deg().ok_or_else(|| MwkError::domain("zero stage polynomial"))?;
            if d == 0 {
                return Err(MwkError::domain("constant stage polynomial"));
            }
            if check && !is_irreducible(&cur, f)? {
                let shown = cur.show_poly(f, v);
                let detail = match factor::factor(&cur, f) {
                    Ok(fac) => fac
                        .factors
                        .iter()
                        .map(|(g, _)| cur.show_poly(g, v))
                        .next()
                        .map(|g| format!(" (factor {g})"))
                        .unwrap_or_default(),
                    Err(_) => String::new(),
                };
                return Err(MwkError::domain(format!("stage polynomial {shown} is reducible over {cur}{detail}")));
            }
            let lead = f.lead().unwrap().clone();
            let monic = cur.pmonic(f);
            separable.push(!cur.pderiv(&monic).is_zero());
            scales.push(lead);
            degrees.push(d);
            let next = Field::ext_unchecked(&cur, monic, v)?;
            stages.push(next.clone());
            cur = next;
        }
        Ok(Extension {
            base: base.clone(),
            top: cur,
            stages,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            degrees,
            separable,
            scales,
            label: label.to_string(),
        })
    }

    /// Monogenic extension from a single polynomial.
    pub fn simple(base: &Field, f: &Poly, var: &str, label: &str) -> Result<Extension> {
        Self::new(base, std::slice::from_ref(f), &[var], label)
    }

    /// View an existing nested extension field as a tower over `base`.
    pub fn from_field(top: &Field, base: &Field, label: &str) -> Result<Extension> {
        let mut chain = Vec::new();
        let mut cur = top.clone();
        while cur != *base {
            match &cur {
                Field::Ext(e) => {
                    chain.push(cur.clone());
                    cur = e.base.clone();
                }
                _ => return Err(MwkError::domain(format!("{base} is not below {top} in its tower"))),
            }
        }
        chain.reverse();
        let mut polys = Vec::new();
        let mut vars = Vec::new();
        for f in &chain {
            if let Field::Ext(e) = f {
                polys.push(e.modulus.clone());
                vars.push(e.var.clone());
            }
        }
        let vref: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let mut ext = Self::new_trusted(base, &polys, &vref, label)?;
        // Reuse the given field objects so elements stay compatible.
        ext.stages = chain;
        ext.top = top.clone();
        Ok(ext)
    }

    /// The identity extension `k / k`.
    pub fn trivial(k: &Field, label: &str) -> Extension {
        Extension {
            base: k.clone(),
            top: k.clone(),
            stages: Vec::new(),
            vars: Vec::new(),
            degrees: Vec::new(),
            separable: Vec::new(),
            scales: Vec::new(),
            label: label.to_string(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degrees.iter().product()
    }

    pub fn is_separable(&self) -> bool {
        self.separable.iter().all(|&s| s)
    }

    pub fn is_monogenic(&self) -> bool {
        self.stages.len() == 1
    }

    fn field_below(&self, i: usize) -> &Field {
        if i == 0 {
            &self.base
        } else {
            &self.stages[i - 1]
        }
    }

    /// Coordinates of an element of `top` on the monomial basis over `base`.
    /// The index of `a_1^{e_1} ... a_n^{e_n}` is `e_n * (d_1...d_{n-1}) + ...`.
    pub fn coords(&self, a: &Elem) -> Vec<Elem> {
        fn go(level: usize, a: &Elem) -> Vec<Elem> {
            if level == 0 {
                return vec![a.clone()];
            }
            match a {
                Elem::Ext(v) => v.iter().flat_map(|c| go(level - 1, c)).collect(),
                _ => panic!("element is not in the expected tower"),
            }
        }
        go(self.stages.len(), a)
    }

    pub fn from_coords(&self, c: &[Elem]) -> Elem {
        fn go(ext: &Extension, level: usize, c: &[Elem]) -> Elem {
            if level == 0 {
                return c[0].clone();
            }
            let d = ext.degrees[level - 1];
            let inner: usize = ext.degrees[..level - 1].iter().product();
            Elem::Ext((0..d).map(|j| go(ext, level - 1, &c[j * inner..(j + 1) * inner])).collect())
        }
        go(self, self.stages.len(), c)
    }

    /// Exponent vector of flat basis index `i`.
    pub fn monomial_exponents(&self, mut i: usize) -> Vec<usize> {
        let mut e = Vec::with_capacity(self.degrees.len());
        for &d in &self.degrees {
            e.push(i % d);
            i /= d;
        }
        e
    }

    /// The generators `alpha_i` embedded in `top`.
    pub fn generators(&self) -> Vec<Elem> {
        self.stages
            .iter()
            .map(|f| self.top.embed_from(f, &f.gen().unwrap()).unwrap())
            .collect()
    }

    /// The `i`-th monomial basis element of `top` over `base`.
    pub fn basis_element(&self, i: usize) -> Elem {
        let mut c = vec![self.base.zero(); self.degree()];
        c[i] = self.base.one();
        self.from_coords(&c)
    }

    pub fn embed(&self, a: &Elem) -> Elem {
        self.top.embed_from(&self.base, a).expect("base element")
    }

    /// Matrix of multiplication by `b` on the monomial basis (columns are images).
    pub fn mult_matrix(&self, b: &Elem) -> Matrix {
        let d = self.degree();
        let cols: Vec<Vec<Elem>> =
            (0..d).map(|i| self.coords(&self.top.mul(b, &self.basis_element(i)))).collect();
        linalg::transpose(&cols)
    }

    /// Trace of multiplication by `b`.
    pub fn trace(&self, b: &Elem) -> Elem {
        let m = self.mult_matrix(b);
        (0..m.len()).fold(self.base.zero(), |acc, i| self.base.add(&acc, &m[i][i]))
    }

    /// Norm (determinant of multiplication by `b`).
    pub fn norm(&self, b: &Elem) -> Elem {
        linalg::det(&self.base, &self.mult_matrix(b))
    }

    /// Stage polynomial `i` as supplied (including its scale).
    pub fn stage_poly(&self, i: usize) -> Poly {
        let k = self.field_below(i);
        match &self.stages[i] {
            Field::Ext(e) => k.pscale(&e.modulus, &self.scales[i]),
            _ => unreachable!(),
        }
    }

    /// Product of the stage scales, embedded in `top`; `w` of the scaled
    /// presentation equals this unit's inverse times `w` of the monic one.
    pub fn scale_unit(&self) -> Elem {
        let mut acc = self.top.one();
        for (i, s) in self.scales.iter().enumerate() {
            let emb = self.top.embed_from(self.field_below(i), s).unwrap();
            acc = self.top.mul(&acc, &emb);
        }
        acc
    }
}

/// `f'(alpha)` for a separable monogenic extension; `w` corresponds to its
/// inverse under `omega = E`.
pub fn etale_unit(ext: &Extension) -> Result<Elem> {
    if !ext.is_monogenic() {
        return Err(MwkError::domain("etale unit requires a monogenic presentation"));
    }
    if !ext.separable[0] {
        return Err(MwkError::domain("extension is inseparable"));
    }
    let f = ext.stage_poly(0);
    let df = ext.base.pderiv(&f);
    let alpha = ext.top.gen()?;
    ext.base.peval_in(&df, &ext.top, &alpha)
}

/// Unit `c` of `L` with `w_{L/k} = c * (w_{L/E} (x) w_{E/k})` for a
/// presentation of `L/k` that stacks the stages of `E/k` and `L/E`.
pub fn compose_canonical(lk: &Extension, le: &Extension, ek: &Extension) -> Result<Elem> {
    let n1 = ek.stages.len();
    let n2 = le.stages.len();
    if lk.stages.len() != n1 + n2 || le.base != ek.top || lk.base != ek.base {
        return Err(MwkError::domain("presentations are not concatenable"));
    }
    for i in 0..n1 {
        if lk.stages[i] != ek.stages[i] {
            return Err(MwkError::domain("lower stages differ"));
        }
    }
    for i in 0..n2 {
        if lk.stages[n1 + i] != le.stages[i] {
            return Err(MwkError::domain("upper stages differ"));
        }
    }
    let l = &lk.top;
    let num = l.mul(&le.scale_unit(), &l.embed_from(&ek.top, &ek.scale_unit())?);
    l.div(&num, &lk.scale_unit())
}

/// Stack `E/k` and `L/E` into one presentation of `L/k`.
pub fn concatenate(ek: &Extension, le: &Extension, label: &str) -> Result<Extension> {
    if le.base != ek.top {
        return Err(MwkError::domain("presentations are not concatenable"));
    }
    let mut out = ek.clone();
    out.stages.extend(le.stages.iter().cloned());
    out.vars.extend(le.vars.iter().cloned());
    out.degrees.extend(le.degrees.iter().cloned());
    out.separable.extend(le.separable.iter().cloned());
    out.scales.extend(le.scales.iter().cloned());
    out.top = le.top.clone();
    out.label = label.to_string();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Places of k(t)

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceKind {
    Finite(Poly),
    Infinity,
}

/// A place of a rational function field `k(t)` with a chosen uniformizer.
#[derive(Clone, Debug)]
pub struct Place {
    pub func: Field,
    pub kind: PlaceKind,
    pub residue: Field,
    pub uniformizer: Elem,
}

impl Place {
    /// Finite place at a monic irreducible polynomial over `k`.
    pub fn finite(func: &Field, pi: &Poly) -> Result<Place> {
        let k = func.base().ok_or_else(|| MwkError::domain("places live on rational function fields"))?;
        if !matches!(func, Field::Rat(_)) {
            return Err(MwkError::domain("places live on rational function fields"));
        }
        if !k.is_monic(pi) {
            return Err(MwkError::domain("place polynomial must be monic"));
        }
        let residue = if pi.deg() == Some(1) {
            k.clone()
        } else {
            Field::ext_unchecked(k, pi.clone(), func.var().unwrap())?
        };
        Ok(Place { func: func.clone(), kind: PlaceKind::Finite(pi.clone()), residue, uniformizer: func.rat_from_poly(pi) })
    }

    /// Finite place with an irreducibility check.
    pub fn finite_checked(func: &Field, pi: &Poly) -> Result<Place> {
        let k = func.base().ok_or_else(|| MwkError::domain("not a function field"))?;
        if !is_irreducible(k, pi)? {
            return Err(MwkError::domain("place polynomial is reducible"));
        }
        Self::finite(func, pi)
    }

    /// The place at infinity with uniformizer `1/t`.
    pub fn infinity(func: &Field) -> Result<Place> {
        let k = func.base().ok_or_else(|| MwkError::domain("not a function field"))?.clone();
        let t = func.gen()?;
        Ok(Place { func: func.clone(), kind: PlaceKind::Infinity, residue: k, uniformizer: func.inv(&t)? })
    }

    /// The rational place `t = a`.
    pub fn rational(func: &Field, a: &Elem) -> Result<Place> {
        let k = func.base().unwrap();
        Self::finite(func, &k.plinear(a))
    }

    /// Same place with a different uniformizer (must have valuation one).
    pub fn with_uniformizer(&self, u: &Elem) -> Result<Place> {
        if self.valuation(u)? != 1 {
            return Err(MwkError::domain("not a uniformizer for this place"));
        }
        let mut p = self.clone();
        p.uniformizer = u.clone();
        Ok(p)
    }

    pub fn is_infinity(&self) -> bool {
        self.kind == PlaceKind::Infinity
    }

    pub fn degree(&self) -> usize {
        match &self.kind {
            PlaceKind::Finite(p) => p.deg().unwrap(),
            PlaceKind::Infinity => 1,
        }
    }

    pub fn base(&self) -> &Field {
        self.func.base().unwrap()
    }

    pub fn valuation(&self, f: &Elem) -> Result<i64> {
        if f.is_zero() {
            return Err(MwkError::domain("valuation of zero"));
        }
        let k = self.base();
        let (n, d) = self.func.rat_parts(f);
        match &self.kind {
            PlaceKind::Finite(pi) => {
                let (a, _) = k.pvaluation(n, pi)?;
                let (b, _) = k.pvaluation(d, pi)?;
                Ok(a as i64 - b as i64)
            }
            PlaceKind::Infinity => Ok(d.deg().unwrap() as i64 - n.deg().unwrap() as i64),
        }
    }

    /// Residue class of an element with nonnegative valuation.
    pub fn reduce(&self, f: &Elem) -> Result<Elem> {
        if f.is_zero() {
            return Ok(self.residue.zero());
        }
        let v = self.valuation(f)?;
        if v < 0 {
            return Err(MwkError::domain("element is not integral at the place"));
        }
        if v > 0 {
            return Ok(self.residue.zero());
        }
        let k = self.base();
        let (n, d) = self.func.rat_parts(f);
        match &self.kind {
            PlaceKind::Finite(pi) => {
                let red = |p: &Poly| -> Result<Elem> {
                    if pi.deg() == Some(1) {
                        Ok(k.peval(p, &k.neg(&pi.c[0])))
                    } else {
                        Ok(self.residue.ext_from_poly(&k.prem(p, pi)))
                    }
                };
                self.residue.div(&red(n)?, &red(d)?)
            }
            PlaceKind::Infinity => k.div(n.lead().unwrap(), d.lead().unwrap()),
        }
    }

    /// Write `f = a * uniformizer^m` and return `(m, residue of a)`.
    pub fn unit_decomposition(&self, f: &Elem) -> Result<(i64, Elem)> {
        let m = self.valuation(f)?;
        let pm = self.func.powi(&self.uniformizer, m)?;
        let a = self.func.div(f, &pm)?;
        Ok((m, self.reduce(&a)?))
    }

    /// Embed a constant of `k` into the residue field.
    pub fn embed_constant(&self, c: &Elem) -> Elem {
        self.residue.embed_from(self.base(), c).unwrap()
    }

    /// Label of the normal line generator (dual of the uniformizer class).
    pub fn normal_label(&self) -> String {
        let k = self.base();
        let var = self.func.var().unwrap();
        match &self.kind {
            PlaceKind::Finite(_) => format!("({})^*", self.func.show(&self.uniformizer)),
            PlaceKind::Infinity => {
                let _ = k;
                let s = self.func.show(&self.uniformizer);
                if s == format!("(1)/({var})") {
                    format!("(1/{var})^*")
                } else {
                    format!("({s})^*")
                }
            }
        }
    }

    /// The residue field presented as an extension of `k` (monic `pi`, label
    /// `pi^* (x) dt`).
    pub fn residue_extension(&self) -> Result<Extension> {
        let k = self.base();
        match &self.kind {
            PlaceKind::Finite(pi) if pi.deg() == Some(1) => {
                let mut e = Extension::trivial(k, &self.canonical_label());
                e.top = self.residue.clone();
                Ok(e)
            }
            PlaceKind::Finite(_) => Extension::from_field(&self.residue, k, &self.canonical_label()),
            PlaceKind::Infinity => Ok(Extension::trivial(k, &self.canonical_label())),
        }
    }

    /// Label of the canonical generator of `omega_{kappa/k}` at this place.
    pub fn canonical_label(&self) -> String {
        match &self.kind {
            PlaceKind::Finite(pi) => {
                let var = self.func.var().unwrap();
                format!("({})^*.d{var}", self.base().show_poly(pi, var))
            }
            PlaceKind::Infinity => {
                let var = self.func.var().unwrap();
                format!("(1/{var})^*.d(1/{var})")
            }
        }
    }
}

/// Sorted monic irreducible factors of the numerators and denominators of
/// the given functions (the finite part of their joint support).
pub fn support_polys(func: &Field, fs: &[Elem]) -> Result<Vec<Poly>> {
    let k = func.base().unwrap();
    let mut out: Vec<Poly> = Vec::new();
    for f in fs {
        if f.is_zero() {
            return Err(MwkError::domain("zero is not a unit"));
        }
        let (n, d) = func.rat_parts(f);
        for p in [n, d] {
            if p.deg().unwrap_or(0) == 0 {
                continue;
            }
            for (g, _) in factor::factor(k, p)?.factors {
                if !out.contains(&g) {
                    out.push(g);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The finite places in the joint support of the given functions.
pub fn support_places(func: &Field, fs: &[Elem]) -> Result<Vec<Place>> {
    support_polys(func, fs)?.iter().map(|p| Place::finite(func, p)).collect()
}

// ---------------------------------------------------------------------------
// Field maps

/// A morphism of fields, built from inclusions, substitutions and composites.
#[derive(Clone, Debug)]
pub enum FieldMap {
    Identity(Field),
    /// Inclusion of a field into one of its towers.
    Inclusion { src: Field, dst: Field },
    /// `k(t) -> dst` sending `t` to `image` and acting on `k` by `base`.
    Rat { src: Field, dst: Field, base: Box<FieldMap>, image: Elem },
    /// `K[x]/(m) -> dst` sending `x` to `image` and acting on `K` by `base`.
    Ext { src: Field, dst: Field, base: Box<FieldMap>, image: Elem },
    Compose(Vec<FieldMap>),
}

impl FieldMap {
    pub fn src(&self) -> &Field {
        match self {
            FieldMap::Identity(k) => k,
            FieldMap::Inclusion { src, .. } | FieldMap::Rat { src, .. } | FieldMap::Ext { src, .. } => src,
            FieldMap::Compose(v) => v[0].src(),
        }
    }

    pub fn dst(&self) -> &Field {
        match self {
            FieldMap::Identity(k) => k,
            FieldMap::Inclusion { dst, .. } | FieldMap::Rat { dst, .. } | FieldMap::Ext { dst, .. } => dst,
            FieldMap::Compose(v) => v.last().unwrap().dst(),
        }
    }

    pub fn inclusion(src: &Field, dst: &Field) -> FieldMap {
        if src == dst {
            FieldMap::Identity(src.clone())
        } else {
            FieldMap::Inclusion { src: src.clone(), dst: dst.clone() }
        }
    }

    /// Extend `base: k -> K` to `k(t) -> K(t)` with `t -> t`.
    pub fn rat_lift(src: &Field, dst: &Field, base: FieldMap) -> Result<FieldMap> {
        Ok(FieldMap::Rat { src: src.clone(), dst: dst.clone(), base: Box::new(base), image: dst.gen()? })
    }

    pub fn then(self, next: FieldMap) -> FieldMap {
        match self {
            FieldMap::Compose(mut v) => {
                v.push(next);
                FieldMap::Compose(v)
            }
            first => FieldMap::Compose(vec![first, next]),
        }
    }

    fn map_poly_eval(&self, base: &FieldMap, p: &Poly, x: &Elem) -> Result<Elem> {
        let dst = self.dst();
        let lift = base.dst() != dst;
        let mut r = dst.zero();
        for c in p.c.iter().rev() {
            let mut b = base.apply(c)?;
            if lift {
                b = dst.embed_from(base.dst(), &b)?;
            }
            r = dst.add(&dst.mul(&r, x), &b);
        }
        Ok(r)
    }

    pub fn apply(&self, a: &Elem) -> Result<Elem> {
        match self {
            FieldMap::Identity(_) => Ok(a.clone()),
            FieldMap::Inclusion { src, dst } => dst.embed_from(src, a),
            FieldMap::Rat { src, dst, base, image } => {
                let (n, d) = src.rat_parts(a);
                let nn = self.map_poly_eval(base, n, image)?;
                let dd = self.map_poly_eval(base, d, image)?;
                dst.div(&nn, &dd)
            }
            FieldMap::Ext { src, base, image, .. } => {
                let p = src.ext_to_poly(a);
                self.map_poly_eval(base, &p, image)
            }
            FieldMap::Compose(v) => {
                let mut x = a.clone();
                for m in v {
                    x = m.apply(&x)?;
                }
                Ok(x)
            }
        }
    }

    /// Image of a polynomial with coefficients in the source.
    pub fn apply_poly(&self, p: &Poly) -> Result<Poly> {
        Ok(Poly::from_coeffs(p.c.iter().map(|c| self.apply(c)).collect::<Result<Vec<_>>>()?))
    }
}

/// Integer test helper: the field `F_q` with `q = p^e`.
pub fn finite_field(q: u64) -> Result<Field> {
    let fac = crate::exact::integer::factor_u64(q);
    if fac.len() != 1 {
        return Err(MwkError::domain(format!("{q} is not a prime power")));
    }
    let (&p, &e) = fac.iter().next().unwrap();
    factor::gf(p, e as usize, "a")
}

/// Rational number helper.
pub fn q_elem(n: i64, d: i64) -> Elem {
    Elem::Q(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_enumeration_matches_listing() {
        for q in [9u64, 27, 25] {
            let k = finite_field(q).unwrap();
            for (i, a) in enumerate_fq(&k).into_iter().enumerate() {
                assert_eq!(nth_fq(&k, i as u64), a);
            }
        }
    }

    fn fp_poly(k: &Field, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| k.from_i64(x)).collect())
    }

    #[test]
    fn f9_presentation() {
        let f3 = Field::fp(3).unwrap();
        let e = Extension::simple(&f3, &fp_poly(&f3, &[1, 0, 1]), "a", "w").unwrap();
        assert_eq!(e.degree(), 2);
        assert!(e.is_separable());
        // f'(alpha) = 2 alpha
        let u = etale_unit(&e).unwrap();
        let alpha = e.top.gen().unwrap();
        assert_eq!(u, e.top.mul(&e.top.from_i64(2), &alpha));
    }

    #[test]
    fn f4_etale_unit_is_one() {
        let f2 = Field::fp(2).unwrap();
        let e = Extension::simple(&f2, &fp_poly(&f2, &[1, 1, 1]), "a", "w").unwrap();
        assert_eq!(etale_unit(&e).unwrap(), e.top.one());
    }

    #[test]
    fn inseparable_quadratic_over_f2s() {
        let f2 = Field::fp(2).unwrap();
        let k = Field::rat(&f2, "s");
        let s = k.gen().unwrap();
        let f = Poly::from_coeffs(vec![k.neg(&s), k.zero(), k.one()]);
        let e = Extension::simple(&k, &f, "a", "w").unwrap();
        assert_eq!(e.degree(), 2);
        assert!(!e.is_separable());
        assert!(etale_unit(&e).is_err());
    }

    #[test]
    fn reducible_stage_is_rejected() {
        let f5 = Field::fp(5).unwrap();
        let err = Extension::simple(&f5, &fp_poly(&f5, &[-1, 0, 1]), "a", "w").unwrap_err();
        assert!(matches!(err, MwkError::Domain(_)));
    }

    #[test]
    fn degree_four_tower_over_f5() {
        let f5 = Field::fp(5).unwrap();
        let e1 = Extension::simple(&f5, &fp_poly(&f5, &[-2, 0, 1]), "a", "w1").unwrap();
        let k1 = e1.top.clone();
        let a = k1.gen().unwrap();
        let f2 = Poly::from_coeffs(vec![k1.neg(&a), k1.zero(), k1.one()]);
        let e2 = Extension::simple(&k1, &f2, "b", "w2").unwrap();
        let t = concatenate(&e1, &e2, "w").unwrap();
        assert_eq!(t.degree(), 4);
        assert_eq!(compose_canonical(&t, &e2, &e1).unwrap(), t.top.one());
        // Coordinates round trip.
        let b = t.top.gen().unwrap();
        let x = t.top.add(&b, &t.top.embed_from(&k1, &a).unwrap());
        assert_eq!(t.from_coords(&t.coords(&x)), x);
    }

    #[test]
    fn rescaled_stage_changes_the_comparison_unit() {
        let f3 = Field::fp(3).unwrap();
        let e = Extension::simple(&f3, &fp_poly(&f3, &[1, 0, 1]), "a", "w").unwrap();
        let scaled = Extension::simple(&f3, &fp_poly(&f3, &[2, 0, 2]), "a", "w'").unwrap();
        let triv = Extension::trivial(&e.top, "1");
        // w' = 2^{-1} w, so the comparison unit is 2^{-1} = 2.
        let c = compose_canonical(&scaled, &triv, &e).unwrap();
        assert_eq!(c, scaled.top.from_i64(2));
    }

    #[test]
    fn places_and_residues() {
        let f5 = Field::fp(5).unwrap();
        let k = Field::rat(&f5, "t");
        let t = k.gen().unwrap();
        let f = k.mul(&t, &k.sub(&t, &k.one()));
        let places = support_places(&k, &[f.clone()]).unwrap();
        assert_eq!(places.len(), 2);
        let inf = Place::infinity(&k).unwrap();
        assert_eq!(inf.valuation(&f).unwrap(), -2);
        let p0 = Place::rational(&k, &f5.zero()).unwrap();
        assert_eq!(p0.unit_decomposition(&f).unwrap(), (1, f5.from_i64(-1)));
    }

    #[test]
    fn square_classes() {
        let f5 = Field::fp(5).unwrap();
        assert!(!is_square(&f5, &f5.from_i64(2)).unwrap());
        assert_eq!(square_class_rep(&f5, &f5.from_i64(3)).unwrap(), f5.from_i64(2));
        assert_eq!(square_class_rep(&Field::Q, &q_elem(-12, 5)).unwrap(), q_elem(-15, 1));
        let k = Field::rat(&f5, "t");
        let t = k.gen().unwrap();
        let tt = k.mul(&t, &k.mul(&t, &t));
        assert_eq!(square_class_rep(&k, &tt).unwrap(), t);
    }
}
