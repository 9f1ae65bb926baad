//! Milnor-Witt transfers along finite extensions: the glued transfer built
//! from the differential GW-transfer and the Milnor norm, the Bass-Tate
//! transfer computed on the projective line, and the reciprocity check.

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field};
use crate::fields::{self, square_class_rep, Extension, Place};
use crate::gw::{self, GwElem};
use crate::km;
use crate::mw::{self, mw_normalize, MwElem, NormalizedPair, Word};
use crate::sstrace;

fn check_twist(ext: &Extension, a: &MwElem) -> Result<()> {
    if a.field != ext.top {
        return Err(MwkError::domain(format!("element lives on {}, extension top is {}", a.field, ext.top)));
    }
    match &a.twist {
        Some(l) if *l == ext.label => Ok(()),
        Some(l) => Err(MwkError::domain(format!("element is twisted by {l}, transfer expects {}", ext.label))),
        None => Err(MwkError::domain(format!("transfer expects an element twisted by {}", ext.label))),
    }
}

/// Glued transfer: `(Tr^omega(mu'), N(F))`, with the compatibility of the
/// two components in `gI^n(k)` asserted.
pub fn mw_transfer(ext: &Extension, a: &MwElem) -> Result<MwElem> {
    check_twist(ext, a)?;
    let k = &ext.base;
    let p = mw_normalize(a)?;
    let witt = sstrace::gw_transfer(ext, &p.witt.with_twist(Some(ext.label.clone())))?;
    let milnor = if a.degree < 0 { km::KmElem::zero(k, a.degree) } else { km::km_transfer(&p.km, ext)? };
    check_glue(&witt, &milnor, a.degree)?;
    Ok(MwElem::from_pair(k, a.degree, NormalizedPair { witt, km: milnor }, None))
}

fn check_glue(witt: &GwElem, milnor: &km::KmElem, n: i64) -> Result<()> {
    let k = &witt.field;
    let ok = match n {
        0 => witt.rank() == milnor.as_int(),
        1 if fields::has_square_classes(k) && (k.is_finite() || k.char() != 2) => {
            let u = milnor.terms.keys().next().map(|w| w[0].clone()).unwrap_or_else(|| k.one());
            witt.rank() == 0 && square_class_rep(k, &witt.disc())? == square_class_rep(k, &u)?
        }
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(MwkError::domain("internal: transferred components disagree in gI^n"))
    }
}

/// Glued transfer along a tower of presentations, one step at a time.
pub fn mw_transfer_chain(chain: &[Extension], a: &MwElem) -> Result<MwElem> {
    check_chain(chain, &a.field)?;
    let mut cur = a.clone();
    for step in chain.iter().rev() {
        cur = mw_transfer(step, &cur.with_twist(Some(step.label.clone())))?;
    }
    Ok(cur)
}

fn check_chain(chain: &[Extension], top: &Field) -> Result<()> {
    let last = chain.last().ok_or_else(|| MwkError::domain("empty generator chain"))?;
    if last.top != *top {
        return Err(MwkError::domain("chain does not generate the field of the element"));
    }
    for w in chain.windows(2) {
        if w[1].base != w[0].top {
            return Err(MwkError::domain("chain steps do not stack"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Bass-Tate transfers

/// Bass-Tate transfer along a chain of monogenic steps.
pub fn mw_transfer_bass_tate(chain: &[Extension], a: &MwElem) -> Result<MwElem> {
    check_chain(chain, &a.field)?;
    let mut cur = a.clone().with_twist(None);
    for step in chain.iter().rev() {
        if !step.is_monogenic() {
            return Err(MwkError::domain("Bass-Tate steps must be monogenic"));
        }
        cur = bass_tate_step(step, &cur)?;
    }
    Ok(cur)
}

/// One monogenic step `K(alpha)/K`: lift `sigma` to `[pi] * lift(sigma)` on
/// `P^1_K`, then solve the reciprocity relation for the coefficient at `pi`.
fn bass_tate_step(ext: &Extension, sigma: &MwElem) -> Result<MwElem> {
    let k = &ext.base;
    if ext.degree() == 1 {
        let unit = ext.top.inv(&ext.scale_unit())?;
        let s = sigma.times_angle(&unit)?;
        let f = fields::FieldMap::Inclusion { src: ext.top.clone(), dst: k.clone() };
        return degree_one_descend(&s, &f, ext);
    }
    // Rescaled stage: w_scaled = c^{-1} w_monic.
    let sigma = sigma.times_angle(&ext.scale_unit())?;
    let func = Field::rat(k, &ext.vars[0]);
    let pi = match &ext.stages[0] {
        Field::Ext(e) => e.modulus.clone(),
        _ => unreachable!(),
    };
    let place = Place::finite(&func, &pi)?;
    if place.residue != ext.top {
        return Err(MwkError::domain("generator chain step does not match its residue model"));
    }
    let words = sigma
        .words()
        .ok_or_else(|| MwkError::capability("Bass-Tate transfers need symbol words, not glued pairs"))?;
    let pi_f = func.rat_from_poly(&pi);
    let mut lift = MwElem::zero(&func, sigma.degree + 1);
    for (w, n) in words {
        let mut units = vec![pi_f.clone()];
        for v in &w.units {
            units.push(func.rat_from_poly(&ext.top.ext_to_poly(v)));
        }
        lift = lift.add(&MwElem::from_words(&func, sigma.degree + 1, vec![(Word { eta: w.eta, units }, *n)])?)?;
    }
    let mut others = MwElem::zero(k, sigma.degree);
    let mut units: Vec<Elem> = Vec::new();
    for (w, _) in lift.words().unwrap() {
        units.extend(w.units.iter().cloned());
    }
    for q in fields::support_places(&func, &units)? {
        if matches!(&q.kind, fields::PlaceKind::Finite(p) if *p == pi) {
            continue;
        }
        let rho = mw::mw_residue_raw(&lift, &q)?;
        let t = if q.degree() == 1 {
            rho
        } else {
            let sub = Extension::from_field(&q.residue, k, &q.canonical_label())?;
            bass_tate_step(&sub, &rho)?
        };
        others = others.add(&t)?;
    }
    let inf = Place::infinity(&func)?;
    let at_inf = mw::mw_residue_raw(&lift, &inf)?.times_angle(&k.from_i64(-1))?;
    others = others.add(&at_inf)?;
    Ok(others.neg())
}

fn degree_one_descend(s: &MwElem, f: &fields::FieldMap, ext: &Extension) -> Result<MwElem> {
    // A degree-one stage x - a: the top field is K[x]/(x - a), identified with K.
    let _ = ext;
    let k = f.dst();
    match &s.body {
        mw::Body::Words(ws) => {
            let mut r = MwElem::zero(k, s.degree);
            for (w, n) in ws {
                let units = w.units.iter().map(|u| collapse_linear(u)).collect::<Vec<_>>();
                r = r.add(&MwElem::from_words(k, s.degree, vec![(Word { eta: w.eta, units }, *n)])?)?;
            }
            Ok(r)
        }
        mw::Body::Pair(_) => Err(MwkError::capability("Bass-Tate transfers need symbol words")),
    }
}

fn collapse_linear(u: &Elem) -> Elem {
    match u {
        Elem::Ext(v) => v[0].clone(),
        other => other.clone(),
    }
}

// ---------------------------------------------------------------------------
// Reciprocity

#[derive(Clone, Debug)]
pub struct PlaceContribution {
    pub place: String,
    pub residue: String,
    pub transferred: String,
}

#[derive(Clone, Debug)]
pub struct ReciprocityReport {
    pub per_place: Vec<PlaceContribution>,
    pub sum: MwElem,
    pub ok: bool,
}

/// Transfer of the residue at a place to the base field, with the residue
/// twisted by `pi^* (x) dt` (the canonical generator at finite places).
pub fn place_transfer(place: &Place, rho: &MwElem) -> Result<MwElem> {
    let k = place.base();
    if place.is_infinity() || place.degree() == 1 {
        return Ok(rho.clone().with_twist(None));
    }
    let ext = Extension::from_field(&place.residue, k, &place.canonical_label())?;
    mw_transfer(&ext, &rho.clone().with_twist(Some(ext.label.clone())))
}

/// Residue at a place of `sigma (x) dt`: the plain residue at finite places,
/// `<-1>` times the residue in `s = 1/t` at infinity.
pub fn dt_residue(sigma: &MwElem, place: &Place) -> Result<MwElem> {
    let r = mw::mw_residue_raw(&sigma.clone().with_twist(None), place)?;
    if place.is_infinity() {
        r.times_angle(&place.residue.from_i64(-1))
    } else {
        Ok(r)
    }
}

/// `sum_x Tr_{kappa_x/k} d_x(sigma (x) dt)` with per-place contributions.
pub fn reciprocity_check(sigma: &MwElem) -> Result<ReciprocityReport> {
    let func = &sigma.field;
    let k = func.base().ok_or_else(|| MwkError::domain("reciprocity needs an element of k(t)"))?.clone();
    let words = sigma.words().ok_or_else(|| MwkError::capability("reciprocity needs symbol words"))?;
    let mut units = Vec::new();
    for (w, _) in words {
        units.extend(w.units.iter().cloned());
    }
    let mut places = fields::support_places(func, &units)?;
    places.push(Place::infinity(func)?);
    let mut sum = MwElem::zero(&k, sigma.degree - 1);
    let mut per_place = Vec::new();
    for p in &places {
        let rho = dt_residue(sigma, p)?;
        let t = place_transfer(p, &rho)?;
        let label = match &p.kind {
            fields::PlaceKind::Finite(pi) => format!("({})", k.show_poly(pi, func.var().unwrap())),
            fields::PlaceKind::Infinity => "inf".to_string(),
        };
        per_place.push(PlaceContribution { place: label, residue: mw::show_mw(&rho), transferred: mw::show_mw(&t) });
        sum = sum.add(&t)?;
    }
    let ok = mw::mw_is_zero(&sum)?;
    Ok(ReciprocityReport { per_place, sum, ok })
}

/// Degree formula shortcut: `Tr(<1> (x) w)`.
pub fn degree_class(ext: &Extension) -> Result<MwElem> {
    mw_transfer(ext, &MwElem::one(&ext.top).with_twist(Some(ext.label.clone())))
}

/// `d_eps` over the base as a Grothendieck-Witt class.
pub fn expected_degree(ext: &Extension) -> GwElem {
    gw::n_eps(&ext.base, ext.degree() as i64)
}
