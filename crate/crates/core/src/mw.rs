//! Milnor-Witt K-theory of fields: symbol words in `eta` and `[u]`, the
//! pair normal form in `W x K^M`, residues, specializations, forgetful and
//! hyperbolic maps, and twists.

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field};
use crate::fields::{first_nonsquare, FieldMap, Place};
use crate::gw::{self, GwElem};
use crate::km::{self, KmElem};

/// `eta^eta [u_1] ... [u_m]`, of degree `m - eta`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub eta: u32,
    pub units: Vec<Elem>,
}

impl Word {
    pub fn degree(&self) -> i64 {
        self.units.len() as i64 - self.eta as i64
    }

    fn concat(&self, o: &Word) -> Word {
        let mut units = self.units.clone();
        units.extend(o.units.iter().cloned());
        Word { eta: self.eta + o.eta, units }
    }
}

/// Image under `(mu', F)` in `W(K) x K^M_n(K)`. In degree 0 `witt` holds
/// the full Grothendieck-Witt class and `km` its rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedPair {
    pub witt: GwElem,
    pub km: KmElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Words(Vec<(Word, i64)>),
    Pair(NormalizedPair),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MwElem {
    pub field: Field,
    pub degree: i64,
    pub body: Body,
    pub twist: Option<String>,
}

fn tensor_labels(a: &Option<String>, b: &Option<String>) -> Option<String> {
    match (a, b) {
        (None, x) | (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(format!("{x}.{y}")),
    }
}

impl MwElem {
    pub fn zero(k: &Field, degree: i64) -> Self {
        MwElem { field: k.clone(), degree, body: Body::Words(Vec::new()), twist: None }
    }

    pub fn from_words(k: &Field, degree: i64, words: Vec<(Word, i64)>) -> Result<Self> {
        let mut r = Self::zero(k, degree);
        for (w, n) in words {
            if w.degree() != degree {
                return Err(MwkError::domain(format!("word of degree {} in an element of degree {degree}", w.degree())));
            }
            if w.units.iter().any(|u| u.is_zero()) {
                return Err(MwkError::domain("symbols take units; got [0]"));
            }
            r.push(w, n);
        }
        Ok(r)
    }

    pub fn int(k: &Field, n: i64) -> Self {
        Self::from_words(k, 0, vec![(Word { eta: 0, units: vec![] }, n)]).unwrap()
    }

    pub fn one(k: &Field) -> Self {
        Self::int(k, 1)
    }

    pub fn eta(k: &Field) -> Self {
        Self::from_words(k, -1, vec![(Word { eta: 1, units: vec![] }, 1)]).unwrap()
    }

    pub fn eta_pow(k: &Field, r: u32) -> Self {
        Self::from_words(k, -(r as i64), vec![(Word { eta: r, units: vec![] }, 1)]).unwrap()
    }

    /// `[u]`.
    pub fn bracket(k: &Field, u: &Elem) -> Result<Self> {
        Self::symbol(k, &[u.clone()])
    }

    /// `[u_1] ... [u_n]`.
    pub fn symbol(k: &Field, us: &[Elem]) -> Result<Self> {
        Self::from_words(k, us.len() as i64, vec![(Word { eta: 0, units: us.to_vec() }, 1)])
    }

    /// `<u> = 1 + eta [u]`.
    pub fn angle(k: &Field, u: &Elem) -> Result<Self> {
        Ok(Self::one(k).add(&Self::eta(k).mul(&Self::bracket(k, u)?)?)?)
    }

    /// `h = 2 + eta [-1]`.
    pub fn h(k: &Field) -> Self {
        Self::angle(k, &k.from_i64(-1)).unwrap().add(&Self::one(k)).unwrap()
    }

    /// `eps = -<-1>`.
    pub fn eps(k: &Field) -> Self {
        Self::angle(k, &k.from_i64(-1)).unwrap().neg()
    }

    /// `n_eps` as a degree-0 element.
    pub fn n_eps(k: &Field, n: i64) -> Self {
        if n < 0 {
            return Self::eps(k).mul(&Self::n_eps(k, -n)).unwrap();
        }
        let base = Self::h(k).scale(n / 2);
        if n % 2 == 1 {
            base.add(&Self::one(k)).unwrap()
        } else {
            base
        }
    }

    /// Degree-0 element from a Grothendieck-Witt class via `<u> = 1 + eta[u]`.
    pub fn from_gw(g: &GwElem) -> Result<Self> {
        let k = &g.field;
        let mut r = Self::zero(k, 0);
        for (u, n) in &g.terms {
            r = r.add(&Self::angle(k, u)?.scale(*n))?;
        }
        Ok(r.with_twist(g.twist.clone()))
    }

    pub fn from_pair(k: &Field, degree: i64, pair: NormalizedPair, twist: Option<String>) -> Self {
        MwElem { field: k.clone(), degree, body: Body::Pair(pair), twist }
    }

    pub fn with_twist(mut self, label: Option<String>) -> Self {
        self.twist = label;
        self
    }

    fn push(&mut self, w: Word, n: i64) {
        if n == 0 {
            return;
        }
        let one_unit = self.field.one();
        if w.units.contains(&one_unit) {
            return;
        }
        let Body::Words(ws) = &mut self.body else { panic!("push on a pair") };
        if let Some(i) = ws.iter().position(|(x, _)| *x == w) {
            ws[i].1 += n;
            if ws[i].1 == 0 {
                ws.remove(i);
            }
        } else {
            ws.push((w, n));
        }
    }

    pub fn words(&self) -> Option<&Vec<(Word, i64)>> {
        match &self.body {
            Body::Words(w) => Some(w),
            Body::Pair(_) => None,
        }
    }

    pub fn is_formally_zero(&self) -> bool {
        match &self.body {
            Body::Words(w) => w.is_empty(),
            Body::Pair(p) => p.witt.is_formally_zero() && p.km.is_formally_zero(),
        }
    }

    fn check(&self, o: &MwElem) -> Result<()> {
        if self.field != o.field {
            return Err(MwkError::domain(format!("field mismatch: {} vs {}", self.field, o.field)));
        }
        if self.degree != o.degree {
            return Err(MwkError::domain(format!("degree mismatch: {} vs {}", self.degree, o.degree)));
        }
        if self.twist != o.twist && !self.is_formally_zero() && !o.is_formally_zero() {
            return Err(MwkError::domain(format!(
                "twist mismatch: {} vs {}",
                self.twist.as_deref().unwrap_or("trivial"),
                o.twist.as_deref().unwrap_or("trivial")
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &MwElem) -> Result<MwElem> {
        self.check(o)?;
        let twist = self.twist.clone().or_else(|| o.twist.clone());
        match (&self.body, &o.body) {
            (Body::Words(_), Body::Words(b)) => {
                let mut r = self.clone();
                for (w, n) in b {
                    r.push(w.clone(), *n);
                }
                r.twist = twist;
                Ok(r)
            }
            _ => {
                let (p, q) = (mw_normalize(self)?, mw_normalize(o)?);
                let pair = NormalizedPair {
                    witt: p.witt.add(&q.witt).with_twist(twist.clone()),
                    km: p.km.add(&q.km)?,
                };
                Ok(MwElem::from_pair(&self.field, self.degree, pair, twist))
            }
        }
    }

    pub fn neg(&self) -> MwElem {
        self.scale(-1)
    }

    pub fn sub(&self, o: &MwElem) -> Result<MwElem> {
        self.add(&o.neg())
    }

    pub fn scale(&self, m: i64) -> MwElem {
        match &self.body {
            Body::Words(ws) => {
                let mut r = MwElem::zero(&self.field, self.degree).with_twist(self.twist.clone());
                for (w, n) in ws {
                    r.push(w.clone(), n * m);
                }
                r
            }
            Body::Pair(p) => {
                let pair = NormalizedPair { witt: p.witt.scale(m), km: p.km.scale(m) };
                MwElem::from_pair(&self.field, self.degree, pair, self.twist.clone())
            }
        }
    }

    /// Product; twists tensor.
    pub fn mul(&self, o: &MwElem) -> Result<MwElem> {
        if self.field != o.field {
            return Err(MwkError::domain(format!("field mismatch: {} vs {}", self.field, o.field)));
        }
        let twist = tensor_labels(&self.twist, &o.twist);
        let degree = self.degree + o.degree;
        match (&self.body, &o.body) {
            (Body::Words(a), Body::Words(b)) => {
                let mut r = MwElem::zero(&self.field, degree);
                for (w1, n1) in a {
                    for (w2, n2) in b {
                        r.push(w1.concat(w2), n1 * n2);
                    }
                }
                Ok(r.with_twist(twist))
            }
            _ => {
                let (p, q) = (mw_normalize(self)?, mw_normalize(o)?);
                let km = if degree < 0 { KmElem::zero(&self.field, degree) } else { p.km.mul(&q.km)? };
                let pair = NormalizedPair { witt: p.witt.mul(&q.witt).with_twist(twist.clone()), km };
                Ok(MwElem::from_pair(&self.field, degree, pair, twist))
            }
        }
    }

    /// Base change along a field map (the restriction `phi_*`).
    pub fn map(&self, f: &FieldMap) -> Result<MwElem> {
        let dst = f.dst();
        match &self.body {
            Body::Words(ws) => {
                let mut r = MwElem::zero(dst, self.degree).with_twist(self.twist.clone());
                for (w, n) in ws {
                    let units = w.units.iter().map(|u| f.apply(u)).collect::<Result<Vec<_>>>()?;
                    r.push(Word { eta: w.eta, units }, *n);
                }
                Ok(r)
            }
            Body::Pair(p) => {
                let pair = NormalizedPair { witt: p.witt.map(f)?, km: p.km.map(f)? };
                Ok(MwElem::from_pair(dst, self.degree, pair, self.twist.clone()))
            }
        }
    }

    /// Multiply by `<u>`.
    pub fn times_angle(&self, u: &Elem) -> Result<MwElem> {
        let t = self.twist.clone();
        Ok(MwElem::angle(&self.field, u)?.mul(self)?.with_twist(t))
    }
}

// ---------------------------------------------------------------------------
// Pair normal form and equality

/// `(mu'(a), F(a))` with `mu'([u]) = 1 - <u>` and `mu'(eta) = -1`.
pub fn mw_normalize(a: &MwElem) -> Result<NormalizedPair> {
    let k = &a.field;
    match &a.body {
        Body::Pair(p) => Ok(p.clone()),
        Body::Words(ws) => {
            let mut witt = GwElem::zero(k);
            let mut milnor = KmElem::zero(k, a.degree);
            for (w, n) in ws {
                let mut g = GwElem::one(k);
                for u in &w.units {
                    g = g.mul(&GwElem::pfister(k, u)?);
                }
                let sgn = if w.eta % 2 == 0 { 1 } else { -1 };
                witt = witt.add(&g.scale(sgn * n));
                if w.eta == 0 {
                    milnor = milnor.add(&KmElem::symbol(k, &w.units)?.scale(*n))?;
                }
            }
            Ok(NormalizedPair { witt: witt.with_twist(a.twist.clone()), km: milnor })
        }
    }
}

pub fn mw_equal(a: &MwElem, b: &MwElem) -> Result<bool> {
    a.check(b)?;
    let (p, q) = (mw_normalize(a)?, mw_normalize(b)?);
    let strip = |g: &GwElem| g.clone().with_twist(None);
    let (x, y) = (strip(&p.witt), strip(&q.witt));
    if a.degree == 0 {
        return gw::gw_equal(&x, &y);
    }
    if !gw::witt_equal(&x, &y)? {
        return Ok(false);
    }
    if a.degree > 0 {
        return km::km_equal(&p.km, &q.km);
    }
    Ok(true)
}

pub fn mw_is_zero(a: &MwElem) -> Result<bool> {
    mw_equal(a, &MwElem::zero(&a.field, a.degree).with_twist(a.twist.clone()))
}

// ---------------------------------------------------------------------------
// Residues: Theta_pi into K^MW(kappa)[xi] with xi^2 = [-1] xi and
// xi a = eps^{deg a} a xi.

struct Theta {
    s: MwElem,
    d: MwElem,
}

fn eps_pow(k: &Field, e: i64) -> MwElem {
    if e.rem_euclid(2) == 0 {
        MwElem::one(k)
    } else {
        MwElem::eps(k)
    }
}

impl Theta {
    fn of_unit(place: &Place, u: &Elem) -> Result<Theta> {
        let kappa = &place.residue;
        let (m, a) = place.unit_decomposition(u)?;
        let d = MwElem::n_eps(kappa, m).mul(&MwElem::angle(kappa, &a)?)?;
        Ok(Theta { s: MwElem::bracket(kappa, &a)?, d })
    }

    fn mul(&self, y: &Theta) -> Result<Theta> {
        let kappa = &self.s.field;
        let n = self.s.degree;
        let m1 = MwElem::bracket(kappa, &kappa.from_i64(-1))?;
        let s = self.s.mul(&y.s)?;
        let d = eps_pow(kappa, n)
            .mul(&self.s)?
            .mul(&y.d)?
            .add(&self.d.mul(&y.s)?)?
            .add(&eps_pow(kappa, n - 1).mul(&m1)?.mul(&self.d)?.mul(&y.d)?)?;
        Ok(Theta { s, d })
    }
}

fn theta(a: &MwElem, place: &Place) -> Result<Theta> {
    if a.field != place.func {
        return Err(MwkError::domain(format!("place lives on {}, element on {}", place.func, a.field)));
    }
    let kappa = &place.residue;
    let ws = a.words().ok_or_else(|| {
        MwkError::capability("residues are computed on symbol words; glued pair elements are not supported")
    })?;
    let mut acc = Theta { s: MwElem::zero(kappa, a.degree), d: MwElem::zero(kappa, a.degree - 1) };
    for (w, n) in ws {
        let mut t = Theta { s: MwElem::eta_pow(kappa, w.eta), d: MwElem::zero(kappa, -(w.eta as i64) - 1) };
        for u in &w.units {
            t = t.mul(&Theta::of_unit(place, u)?)?;
        }
        acc.s = acc.s.add(&t.s.scale(*n))?;
        acc.d = acc.d.add(&t.d.scale(*n))?;
    }
    Ok(acc)
}

/// Residue `d_v^pi` without the twist label (a degree `n - 1` element over kappa).
pub fn mw_residue_raw(a: &MwElem, place: &Place) -> Result<MwElem> {
    Ok(theta(a, place)?.d)
}

/// Residue of an untwisted element, twisted by the normal line of the place.
pub fn mw_residue(a: &MwElem, place: &Place) -> Result<MwElem> {
    if a.twist.is_some() {
        return Err(MwkError::domain("use the twisted residue for twisted elements"));
    }
    Ok(mw_residue_raw(a, place)?.with_twist(Some(place.normal_label())))
}

/// Specialization `s_v^pi`, the constant term of `Theta_pi`.
pub fn mw_specialize(a: &MwElem, place: &Place) -> Result<MwElem> {
    Ok(theta(a, place)?.s.with_twist(None))
}

/// Twisted residue of `sigma (x) (c l_0)`: `d_v(<c> sigma) (x) (pi^* . l_0)`.
pub fn mw_residue_twisted(a: &MwElem, place: &Place, c: &Elem, base_label: &str) -> Result<MwElem> {
    if c.is_zero() {
        return Err(MwkError::domain("twist generator must be nonzero"));
    }
    let sigma = a.clone().with_twist(None).times_angle(c)?;
    let r = mw_residue_raw(&sigma, place)?;
    Ok(r.with_twist(Some(format!("{}.{}", place.normal_label(), base_label))))
}

// ---------------------------------------------------------------------------
// Forgetful, hyperbolic, twists

pub fn forgetful(a: &MwElem) -> Result<KmElem> {
    let p = mw_normalize(a)?;
    if a.degree == 0 {
        return Ok(KmElem::int(&a.field, p.witt.rank()));
    }
    Ok(p.km)
}

/// `H({a_1..a_n}) = h [a_1] ... [a_n]`.
pub fn hyperbolic(s: &KmElem, twist: Option<String>) -> Result<MwElem> {
    let k = &s.field;
    let mut r = MwElem::zero(k, s.degree.max(0));
    if s.degree < 0 {
        return Ok(MwElem::zero(k, s.degree).with_twist(twist));
    }
    for (w, n) in &s.terms {
        let sym = if w.is_empty() { MwElem::one(k) } else { MwElem::symbol(k, w)? };
        r = r.add(&MwElem::h(k).mul(&sym)?.scale(*n))?;
    }
    Ok(r.with_twist(twist))
}

/// `ev_l(sigma (x) (u l)) = <u> sigma`.
pub fn twist_eval(a: &MwElem, u: &Elem) -> Result<MwElem> {
    if u.is_zero() {
        return Err(MwkError::domain("twist generator must be nonzero"));
    }
    a.clone().with_twist(None).times_angle(u)
}

// ---------------------------------------------------------------------------
// Printing

fn show_word(k: &Field, w: &Word) -> String {
    let mut f = Vec::new();
    match w.eta {
        0 => {}
        1 => f.push("eta".to_string()),
        r => f.push(format!("eta^{r}")),
    }
    for u in &w.units {
        f.push(format!("[{}]", k.show(u)));
    }
    f.join("*")
}

fn show_words(k: &Field, ws: &[(Word, i64)]) -> String {
    let mut out = String::new();
    for (w, n) in ws {
        let ws = show_word(k, w);
        let body = if ws.is_empty() {
            n.abs().to_string()
        } else if n.abs() == 1 {
            ws
        } else {
            format!("{}*{}", n.abs(), ws)
        };
        if out.is_empty() {
            out = if *n < 0 { format!("-{body}") } else { body };
        } else if *n < 0 {
            out.push_str(&format!(" - {body}"));
        } else {
            out.push_str(&format!(" + {body}"));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn eta_prefix(r: i64) -> String {
    if r == 1 {
        "eta".into()
    } else {
        format!("eta^{r}")
    }
}

/// Canonical form over finite fields, `None` elsewhere.
fn show_finite(a: &MwElem) -> Option<String> {
    let k = &a.field;
    if !k.is_finite() {
        return None;
    }
    let p = mw_normalize(a).ok()?;
    let witt = p.witt.clone().with_twist(None);
    Some(match a.degree {
        n if n >= 2 => "0".into(),
        1 => match p.km.terms.keys().next() {
            Some(w) => format!("[{}]", k.show(&w[0])),
            None => "0".into(),
        },
        0 => gw::show_gw(&witt),
        n => {
            let r = -n;
            // eta^r * G has Witt image (-1)^r G
            let witt = if r % 2 == 1 { witt.neg() } else { witt };
            if gw::witt_is_zero(&witt).ok()? {
                "0".into()
            } else if k.char() == 2 {
                eta_prefix(r)
            } else {
                let g = first_nonsquare(k).ok()?;
                let one = GwElem::one(k);
                let gg = GwElem::angle(k, &g).ok()?;
                if gw::witt_equal(&witt, &one).ok()? {
                    eta_prefix(r)
                } else if gw::witt_equal(&witt, &gg).ok()? {
                    format!("{}*<{}>", eta_prefix(r), k.show(&g))
                } else {
                    format!("{}*(<1> - <{}>)", eta_prefix(r), k.show(&g))
                }
            }
        }
    })
}

/// Canonical expression: normal forms over finite fields, words elsewhere.
pub fn show_mw(a: &MwElem) -> String {
    let body = match show_finite(a) {
        Some(s) => s,
        None => match &a.body {
            Body::Words(ws) => show_words(&a.field, ws),
            Body::Pair(p) => format!(
                "pair({}, {})",
                gw::show_gw(&p.witt.clone().with_twist(None)),
                km::show_km(&p.km)
            ),
        },
    };
    match &a.twist {
        Some(l) => format!("({body}) @ {l}"),
        None => body,
    }
}

/// Symbol words verbatim, regardless of the field.
pub fn show_mw_words(a: &MwElem) -> String {
    match &a.body {
        Body::Words(ws) => show_words(&a.field, ws),
        Body::Pair(_) => show_mw(a),
    }
}

impl std::fmt::Display for MwElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", show_mw(self))
    }
}
