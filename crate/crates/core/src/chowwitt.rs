//! Quadratic divisors on the affine and projective line: the divisor class
//! map, the homotopy-invariance splitting, localization residues and the
//! class invariants of `P^1` with a twist `O(d)`.
//!
//! `O(d)` is trivialized by `u` on `A^1` and by `v` near infinity, glued by
//! `u = y^d v` with `y = 1/t`.

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field, Poly};
use crate::fields::{self, FieldMap, Place, PlaceKind};
use crate::km::{self, KmElem};
use crate::mw::{self, MwElem, Word};
use crate::transfer;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    /// Monic irreducible polynomial in `t`.
    Finite(Poly),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Affine,
    Projective,
    /// `Spec O_v` for a place of `k(t)`.
    Local(Point),
}

#[derive(Clone, Debug)]
pub struct Curve {
    pub kind: CurveKind,
    /// Function field `k(t)`.
    pub func: Field,
    /// Degree of the line bundle (0 on the affine line and local schemes).
    pub line_degree: i64,
}

impl Curve {
    pub fn affine(func: &Field) -> Curve {
        Curve { kind: CurveKind::Affine, func: func.clone(), line_degree: 0 }
    }

    pub fn projective(func: &Field, d: i64) -> Curve {
        Curve { kind: CurveKind::Projective, func: func.clone(), line_degree: d }
    }

    pub fn base(&self) -> &Field {
        self.func.base().unwrap()
    }

    pub fn place(&self, p: &Point) -> Result<Place> {
        match p {
            Point::Finite(pi) => Place::finite(&self.func, pi),
            Point::Infinity => Place::infinity(&self.func),
        }
    }

    fn contains(&self, p: &Point) -> bool {
        match &self.kind {
            CurveKind::Affine => *p != Point::Infinity,
            CurveKind::Projective => true,
            CurveKind::Local(q) => q == p,
        }
    }
}

fn point_of(place: &Place) -> Point {
    match &place.kind {
        PlaceKind::Finite(p) => Point::Finite(p.clone()),
        PlaceKind::Infinity => Point::Infinity,
    }
}

/// Twist label of the coefficient group at a point.
pub fn point_label(place: &Place) -> String {
    if place.is_infinity() {
        format!("{}.v", place.normal_label())
    } else {
        format!("{}.u", place.normal_label())
    }
}

/// A finitely supported sum of points with twisted Milnor-Witt coefficients
/// of a fixed degree `q`.
#[derive(Clone, Debug)]
pub struct QuadraticDivisor {
    pub curve: Curve,
    pub q: i64,
    pub entries: Vec<(Point, MwElem)>,
}

impl QuadraticDivisor {
    pub fn zero(curve: &Curve, q: i64) -> Self {
        QuadraticDivisor { curve: curve.clone(), q, entries: Vec::new() }
    }

    /// Add `coefficient` (over the residue field, untwisted) at a point.
    pub fn add_at(&mut self, p: Point, coefficient: &MwElem) -> Result<()> {
        if !self.curve.contains(&p) {
            return Err(MwkError::domain("point is not on the curve"));
        }
        if coefficient.degree != self.q {
            return Err(MwkError::domain(format!("coefficient of degree {} in a divisor of degree {}", coefficient.degree, self.q)));
        }
        let place = self.curve.place(&p)?;
        if coefficient.field != place.residue {
            return Err(MwkError::domain("coefficient does not live on the residue field of the point"));
        }
        let c = coefficient.clone().with_twist(Some(point_label(&place)));
        match self.entries.iter().position(|(x, _)| *x == p) {
            Some(i) => self.entries[i].1 = self.entries[i].1.add(&c)?,
            None => {
                self.entries.push((p, c));
                self.entries.sort_by(|a, b| a.0.cmp(&b.0));
            }
        }
        Ok(())
    }

    pub fn add(&self, o: &QuadraticDivisor) -> Result<QuadraticDivisor> {
        let mut r = self.clone();
        for (p, c) in &o.entries {
            r.add_at(p.clone(), &c.clone().with_twist(None))?;
        }
        Ok(r)
    }

    /// Entries whose coefficient is nonzero.
    pub fn support(&self) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        for (p, c) in &self.entries {
            if !mw::mw_is_zero(c)? {
                out.push(p.clone());
            }
        }
        Ok(out)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.support()?.is_empty())
    }

    /// `(point, coefficient, twist)` triples for serialization.
    pub fn rows(&self) -> Vec<(Option<Vec<String>>, String, String)> {
        let k = self.curve.base();
        self.entries
            .iter()
            .map(|(p, c)| {
                let point = match p {
                    Point::Finite(pi) => Some(pi.c.iter().map(|x| k.show(x)).collect()),
                    Point::Infinity => None,
                };
                (point, mw::show_mw(&c.clone().with_twist(None)), c.twist.clone().unwrap_or_default())
            })
            .collect()
    }
}

/// Quadratic divisor of `sigma (x) (a u)`, `a` a nonzero function.
pub fn tdiv_scaled(sigma: &MwElem, a: &Elem, curve: &Curve) -> Result<QuadraticDivisor> {
    let func = &curve.func;
    if sigma.field != *func {
        return Err(MwkError::domain("element does not live on the function field of the curve"));
    }
    let words = sigma.words().ok_or_else(|| MwkError::capability("divisors of glued pair elements"))?;
    let mut units: Vec<Elem> = vec![a.clone()];
    for (w, _) in words {
        units.extend(w.units.iter().cloned());
    }
    let mut places: Vec<Place> = match &curve.kind {
        CurveKind::Local(p) => vec![curve.place(p)?],
        _ => fields::support_places(func, &units)?,
    };
    if curve.kind == CurveKind::Projective {
        places.push(Place::infinity(func)?);
    }
    let sigma = sigma.clone().with_twist(None);
    let mut d = QuadraticDivisor::zero(curve, sigma.degree - 1);
    for place in places {
        let scale = if place.is_infinity() {
            // u = y^d v
            let y = func.inv(&func.gen()?)?;
            func.mul(a, &func.powi(&y, curve.line_degree)?)
        } else {
            a.clone()
        };
        let rho = mw::mw_residue_raw(&sigma.times_angle(&scale)?, &place)?;
        if !mw::mw_is_zero(&rho)? {
            d.add_at(point_of(&place), &rho)?;
        }
    }
    Ok(d)
}

/// Quadratic divisor of `sigma (x) u`.
pub fn tdiv(sigma: &MwElem, curve: &Curve) -> Result<QuadraticDivisor> {
    tdiv_scaled(sigma, &curve.func.one(), curve)
}

/// Residues along a finite set of points of `P^1` or `Spec O_v`.
pub fn localization_residue(sigma: &MwElem, curve: &Curve, z: &[Point]) -> Result<QuadraticDivisor> {
    let full = tdiv(sigma, &Curve { kind: CurveKind::Projective, ..curve.clone() })?;
    let mut out = QuadraticDivisor::zero(curve, sigma.degree - 1);
    out.curve.kind = CurveKind::Projective;
    for (p, c) in full.entries {
        if z.contains(&p) {
            out.add_at(p, &c.with_twist(None))?;
        }
    }
    Ok(out)
}

/// Constant-coefficient inclusion `k -> k(t)`.
pub fn constant_map(func: &Field) -> FieldMap {
    FieldMap::inclusion(func.base().unwrap(), func)
}

/// Split `sigma` over `k(t)` into its specialization at `t = 0` and its
/// divisor on `A^1`.
pub fn a1_decompose(sigma: &MwElem) -> Result<(MwElem, QuadraticDivisor)> {
    let func = &sigma.field;
    let k = func.base().ok_or_else(|| MwkError::domain("not a function field"))?;
    let p0 = Place::rational(func, &k.zero())?;
    let constant = mw::mw_specialize(sigma, &p0)?;
    let divisor = tdiv(sigma, &Curve::affine(func))?;
    Ok((constant, divisor))
}

/// Lift of a residue generator `eta^r [v_1..v_m]` at a finite place:
/// `eta^r [pi] [v_1] .. [v_m]` with polynomial lifts of the `v_i`.
pub fn lift_generator(place: &Place, g: &Word) -> Result<MwElem> {
    let func = &place.func;
    let pi = match &place.kind {
        PlaceKind::Finite(p) => p.clone(),
        PlaceKind::Infinity => return Err(MwkError::domain("lifts are taken at finite places")),
    };
    let mut units = vec![func.rat_from_poly(&pi)];
    for v in &g.units {
        let lifted = if place.degree() == 1 {
            func.embed_base(v)
        } else {
            func.rat_from_poly(&place.residue.ext_to_poly(v))
        };
        units.push(lifted);
    }
    let deg = units.len() as i64 - g.eta as i64;
    MwElem::from_words(func, deg, vec![(Word { eta: g.eta, units }, 1)])
}

// ---------------------------------------------------------------------------
// Projective line

/// Image of `sigma` over `k` under the push-forward from the point at infinity.
pub fn push_infinity(curve: &Curve, sigma: &MwElem) -> Result<QuadraticDivisor> {
    let mut d = QuadraticDivisor::zero(curve, sigma.degree);
    d.add_at(Point::Infinity, &sigma.clone().with_twist(None))?;
    Ok(d)
}

#[derive(Clone, Debug)]
pub enum Pb1Class {
    /// Even degree: an element of `K^MW_q(k)` relative to `y^* (x) v` at infinity.
    Even(MwElem),
    /// Odd degree: an element of `K^M_q(k)`.
    Odd(KmElem),
}

impl Pb1Class {
    pub fn is_zero(&self) -> Result<bool> {
        match self {
            Pb1Class::Even(m) => mw::mw_is_zero(m),
            Pb1Class::Odd(k) => km::km_is_zero(k),
        }
    }

    pub fn show(&self) -> String {
        match self {
            Pb1Class::Even(m) => mw::show_mw(m),
            Pb1Class::Odd(k) => km::show_km(k),
        }
    }
}

/// Transfer of each coefficient to `k` in the canonical twists: at finite
/// points `u` corresponds to `dt`, at infinity `v` to `-dy` (for even `d`).
fn transferred_terms(d: &QuadraticDivisor) -> Result<Vec<(Point, MwElem)>> {
    let curve = &d.curve;
    let mut out = Vec::new();
    for (p, c) in &d.entries {
        let place = curve.place(p)?;
        let c = c.clone().with_twist(None);
        let t = transfer::place_transfer(&place, &c)?;
        out.push((p.clone(), t));
    }
    Ok(out)
}

/// Class invariant of a quadratic divisor on `P^1` twisted by `O(d)`.
pub fn pb1_class(d: &QuadraticDivisor) -> Result<Pb1Class> {
    let curve = &d.curve;
    if curve.kind != CurveKind::Projective {
        return Err(MwkError::domain("class invariants are defined on the projective line"));
    }
    let k = curve.base();
    let terms = transferred_terms(d)?;
    if curve.line_degree.rem_euclid(2) == 0 {
        let mone = k.from_i64(-1);
        let mut acc = MwElem::zero(k, d.q);
        for (p, t) in terms {
            let t = if p == Point::Infinity { t } else { t.times_angle(&mone)? };
            acc = acc.add(&t)?;
        }
        Ok(Pb1Class::Even(acc))
    } else {
        let mut acc = KmElem::zero(k, d.q);
        for (_, t) in terms {
            acc = acc.add(&mw::forgetful(&t)?)?;
        }
        Ok(Pb1Class::Odd(acc))
    }
}

/// Quadratic degree of a divisor in the canonical twist `O(-2)`.
pub fn quadratic_degree(d: &QuadraticDivisor) -> Result<MwElem> {
    if d.curve.line_degree != -2 {
        return Err(MwkError::domain("the quadratic degree is defined for the canonical twist O(-2)"));
    }
    match pb1_class(d)? {
        Pb1Class::Even(m) => Ok(m),
        Pb1Class::Odd(_) => unreachable!(),
    }
}

/// Pointwise forgetful map to Milnor K-theory coefficients (ranks in degree 0).
pub fn forget_divisor(d: &QuadraticDivisor) -> Result<Vec<(Point, KmElem)>> {
    d.entries.iter().map(|(p, c)| Ok((p.clone(), mw::forgetful(c)?))).collect()
}

/// Pointwise hyperbolic map.
pub fn hyper_divisor(curve: &Curve, q: i64, z: &[(Point, KmElem)]) -> Result<QuadraticDivisor> {
    let mut d = QuadraticDivisor::zero(curve, q);
    for (p, s) in z {
        d.add_at(p.clone(), &mw::hyperbolic(s, None)?)?;
    }
    Ok(d)
}

/// Classical degree of a 0-cycle of ranks.
pub fn cycle_degree(z: &[(Point, KmElem)]) -> i64 {
    z.iter()
        .map(|(p, c)| {
            let deg = match p {
                Point::Finite(pi) => pi.deg().unwrap() as i64,
                Point::Infinity => 1,
            };
            deg * c.as_int()
        })
        .sum()
}
