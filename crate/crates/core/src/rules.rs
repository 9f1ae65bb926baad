//! Randomized checks of the functoriality rules satisfied by Milnor-Witt
//! K-theory: restrictions, transfers, products and residues.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{MwkError, Result};
use crate::exact::factor;
use crate::exact::field::{Elem, Field, Poly};
use crate::fields::{self, etale_unit, Extension, FieldMap, Place};
use crate::mw::{self, mw_equal, mw_is_zero, MwElem};
use crate::sample::{self, SampleRng};
use crate::transfer::{mw_transfer, mw_transfer_bass_tate};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleStatus {
    Passed,
    Failed(String),
    NotImplemented(&'static str),
}

#[derive(Clone, Debug)]
pub struct RuleOutcome {
    pub rule: &'static str,
    pub statement: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub status: RuleStatus,
}

impl RuleOutcome {
    pub fn passed(&self) -> bool {
        self.status == RuleStatus::Passed
    }
}

type Check = fn(&mut SampleRng) -> Result<bool>;

struct Rule {
    name: &'static str,
    statement: &'static str,
    check: Option<Check>,
}

const RULES: &[Rule] = &[
    Rule { name: "R1a", statement: "(psi phi)_* = psi_* phi_*", check: Some(r1a) },
    Rule { name: "R1b", statement: "Tr_{L/k} = Tr_{E/k} Tr_{L/E}", check: Some(r1b) },
    Rule { name: "R1c", statement: "separable base change of transfers", check: Some(r1c) },
    Rule { name: "R2a", statement: "restriction is multiplicative", check: Some(r2a) },
    Rule { name: "R2b", statement: "Tr(phi(s) b) = s Tr(b)", check: Some(r2b) },
    Rule { name: "R2c", statement: "Tr(s phi(b)) = Tr(s) b", check: Some(r2c) },
    Rule { name: "R3a", statement: "residues commute with unramified restriction", check: Some(r3a) },
    Rule { name: "R3b", statement: "residues of transfers", check: None },
    Rule { name: "R3c", statement: "residues of constants vanish", check: Some(r3c) },
    Rule { name: "R3d", statement: "specialization of constants", check: Some(r3d) },
    Rule { name: "R3e", statement: "residues of [u] s and eta s", check: Some(r3e) },
    Rule { name: "R4a", statement: "twist automorphisms act by <delta>", check: Some(r4a) },
    Rule { name: "R3a+", statement: "residues along ramified restriction", check: Some(r3a_plus) },
    Rule { name: "R1c+", statement: "base change with multiplicities", check: Some(r1c_plus) },
];

pub fn rule_names() -> Vec<&'static str> {
    RULES.iter().map(|r| r.name).collect()
}

/// Run one rule on `instances` random inputs.
pub fn check_rule(name: &str, seed: u64, instances: usize) -> Result<RuleOutcome> {
    let rule = RULES
        .iter()
        .find(|r| r.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| MwkError::domain(format!("unknown rule {name}")))?;
    let Some(check) = rule.check else {
        return Ok(RuleOutcome {
            rule: rule.name,
            statement: rule.statement,
            instances: 0,
            failures: 0,
            status: RuleStatus::NotImplemented("deferred by the paper"),
        });
    };
    let salt = rule.name.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
    let mut rng = sample::rng(seed ^ salt);
    let mut failures = 0;
    let mut first = None;
    for i in 0..instances {
        let outcome = check(&mut rng);
        let ok = matches!(outcome, Ok(true));
        if !ok {
            failures += 1;
            if first.is_none() {
                first = Some(match outcome {
                    Err(e) => format!("instance {i}: {e}"),
                    _ => format!("instance {i}: sides differ"),
                });
            }
        }
    }
    let status = match first {
        None => RuleStatus::Passed,
        Some(m) => RuleStatus::Failed(m),
    };
    Ok(RuleOutcome { rule: rule.name, statement: rule.statement, instances, failures, status })
}

/// Run every rule whose name contains `filter`.
pub fn run_suite(seed: u64, instances: usize, filter: Option<&str>) -> Result<Vec<RuleOutcome>> {
    RULES
        .iter()
        .filter(|r| filter.map_or(true, |f| r.name.to_lowercase().contains(&f.to_lowercase())))
        .map(|r| check_rule(r.name, seed, instances))
        .collect()
}

// ---------------------------------------------------------------------------
// Sampling helpers

fn small_field(rng: &mut SampleRng, odd_only: bool) -> Field {
    let qs: &[u64] = if odd_only { &[3, 5, 7, 9] } else { &[2, 3, 4, 5, 7, 9] };
    fields::finite_field(*qs.choose(rng).unwrap()).unwrap()
}

fn quadratic_over(k: &Field, var: &str, rng: &mut SampleRng) -> Field {
    Field::ext_unchecked(k, sample::irreducible(k, 2, rng), var).unwrap()
}

fn random_ext(k: &Field, deg: usize, var: &str, label: &str, scaled: bool, rng: &mut SampleRng) -> Extension {
    let f = sample::irreducible(k, deg, rng);
    let f = if scaled { k.pscale(&f, &sample::unit(k, rng)) } else { f };
    Extension::new_trusted(k, &[f], &[var], label).unwrap()
}

fn degree(rng: &mut SampleRng) -> i64 {
    rng.gen_range(-1..=2)
}

fn same(a: &MwElem, b: &MwElem) -> Result<bool> {
    mw_equal(&a.clone().with_twist(None), &b.clone().with_twist(None))
}

/// Substitution `k(t) -> L(t)`, `t -> r(t)`, acting on constants by inclusion.
fn substitution(src: &Field, dst: &Field, image: Elem) -> FieldMap {
    let k = src.base().unwrap();
    let l = dst.base().unwrap();
    FieldMap::Rat { src: src.clone(), dst: dst.clone(), base: Box::new(FieldMap::inclusion(k, l)), image }
}

/// Random function in `k(t)` divisible by `pi` with probability one half.
fn function_near(func: &Field, pi: &Poly, rng: &mut SampleRng) -> Elem {
    let u = sample::unit(func, rng);
    if rng.gen_bool(0.5) {
        let p = func.rat_from_poly(pi);
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        func.mul(&u, &func.powi(&p, e).unwrap())
    } else {
        u
    }
}

/// Unit at the place of `pi`: a random function coprime to `pi`.
fn unit_at(place: &Place, rng: &mut SampleRng) -> Elem {
    loop {
        let u = sample::unit(&place.func, rng);
        if place.valuation(&u).ok() == Some(0) {
            return u;
        }
    }
}

/// Random uniformizer `pi * u` with `u` a unit at the place.
fn uniformizer(place: &Place, rng: &mut SampleRng) -> Place {
    let u = unit_at(place, rng);
    let pi = place.func.mul(&place.uniformizer, &u);
    place.with_uniformizer(&pi).unwrap()
}

// ---------------------------------------------------------------------------
// R1

fn r1a(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let func = Field::rat(&k, "t");
    let l = quadratic_over(&k, "b", rng);
    let lt = Field::rat(&l, "t");
    let r = func.rat_from_poly(&sample::monic_poly(&k, rng.gen_range(1..=2), rng));
    let phi = substitution(&func, &func, r.clone());
    let psi = FieldMap::rat_lift(&func, &lt, FieldMap::inclusion(&k, &l))?;
    let composite = substitution(&func, &lt, psi.apply(&r)?);
    let sigma = sample::mw_elem(&func, degree(rng), rng);
    same(&sigma.map(&composite)?, &sigma.map(&phi)?.map(&psi)?)
}

fn r1b(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let ek = random_ext(&k, 2, "a", "wE", true, rng);
    let le = random_ext(&ek.top, 2, "b", "wLE", true, rng);
    let lk = fields::concatenate(&ek, &le, "wL")?;
    let c = fields::compose_canonical(&lk, &le, &ek)?;
    let sigma = sample::mw_elem(&lk.top, degree(rng), rng);
    let direct = mw_transfer(&lk, &sigma.clone().with_twist(Some("wL".into())))?;
    let upper = mw_transfer(&le, &sigma.times_angle(&c)?.with_twist(Some("wLE".into())))?;
    let stepwise = mw_transfer(&ek, &upper.with_twist(Some("wE".into())))?;
    same(&direct, &stepwise)
}

/// Transfer of an element given in the etale trivialization `omega = F`.
fn etale_transfer(ext: &Extension, sigma: &MwElem) -> Result<MwElem> {
    let u = etale_unit(ext)?;
    mw_transfer(ext, &sigma.times_angle(&u)?.with_twist(Some(ext.label.clone())))
}

fn r1c(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let fk = random_ext(&k, rng.gen_range(2..=3), "a", "wF", false, rng);
    let lk = random_ext(&k, rng.gen_range(1..=3), "b", "wL", false, rng);
    let l = &lk.top;
    let sigma = sample::mw_elem(&fk.top, rng.gen_range(-1..=1), rng);
    let lhs = etale_transfer(&fk, &sigma)?.map(&FieldMap::inclusion(&k, l))?;
    let f_l = FieldMap::inclusion(&k, l).apply_poly(&fk.stage_poly(0))?;
    let mut rhs = MwElem::zero(l, sigma.degree);
    for (j, (g, e)) in factor::factor(l, &f_l)?.factors.into_iter().enumerate() {
        if e != 1 {
            return Err(MwkError::domain("separable polynomial acquired a repeated factor"));
        }
        let kx = Extension::new_trusted(l, &[g], &["x"], &format!("w{j}"))?;
        let to_x = FieldMap::Ext {
            src: fk.top.clone(),
            dst: kx.top.clone(),
            base: Box::new(FieldMap::inclusion(&k, &kx.top)),
            image: kx.top.gen()?,
        };
        rhs = rhs.add(&etale_transfer(&kx, &sigma.map(&to_x)?)?)?;
    }
    same(&lhs, &rhs)
}

// ---------------------------------------------------------------------------
// R2

fn r2a(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let func = Field::rat(&k, "t");
    let l = quadratic_over(&k, "b", rng);
    let lt = Field::rat(&l, "t");
    let image = lt.rat_from_poly(&sample::monic_poly(&l, rng.gen_range(1..=2), rng));
    let phi = substitution(&func, &lt, image);
    let a = sample::mw_elem(&func, degree(rng), rng);
    let b = sample::mw_elem(&func, degree(rng), rng);
    same(&a.mul(&b)?.map(&phi)?, &a.map(&phi)?.mul(&b.map(&phi)?)?)
}

fn projection_setup(rng: &mut SampleRng) -> (Extension, MwElem, MwElem) {
    let k = small_field(rng, false);
    let ext = random_ext(&k, rng.gen_range(2..=3), "a", "w", rng.gen_bool(0.5), rng);
    let s = sample::mw_elem(&k, rng.gen_range(-1..=1), rng);
    let b = sample::mw_elem(&ext.top, rng.gen_range(-1..=1), rng);
    (ext, s, b)
}

fn r2b(rng: &mut SampleRng) -> Result<bool> {
    let (ext, s, b) = projection_setup(rng);
    let phi = FieldMap::inclusion(&ext.base, &ext.top);
    let w = Some(ext.label.clone());
    let lhs = mw_transfer(&ext, &s.map(&phi)?.mul(&b)?.with_twist(w.clone()))?;
    let rhs = s.mul(&mw_transfer(&ext, &b.with_twist(w))?)?;
    same(&lhs, &rhs)
}

fn r2c(rng: &mut SampleRng) -> Result<bool> {
    let (ext, s, b) = projection_setup(rng);
    let phi = FieldMap::inclusion(&ext.base, &ext.top);
    let w = Some(ext.label.clone());
    let lhs = mw_transfer(&ext, &b.mul(&s.map(&phi)?)?.with_twist(w.clone()))?;
    let rhs = mw_transfer(&ext, &b.with_twist(w))?.mul(&s)?;
    same(&lhs, &rhs)
}

// ---------------------------------------------------------------------------
// R3

/// Residue field map `kappa_v -> kappa_w` induced by a constant-field extension.
fn residue_map(v: &Place, w: &Place) -> Result<FieldMap> {
    let k = v.base();
    if v.degree() == 1 {
        return Ok(FieldMap::inclusion(k, &w.residue));
    }
    let t = w.func.gen()?;
    Ok(FieldMap::Ext {
        src: v.residue.clone(),
        dst: w.residue.clone(),
        base: Box::new(FieldMap::inclusion(k, &w.residue)),
        image: w.reduce(&t)?,
    })
}

fn r3a(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let func = Field::rat(&k, "t");
    let l = quadratic_over(&k, "b", rng);
    let lt = Field::rat(&l, "t");
    let phi = FieldMap::rat_lift(&func, &lt, FieldMap::inclusion(&k, &l))?;
    let pi = sample::irreducible(&k, rng.gen_range(1..=2), rng);
    let v = Place::finite(&func, &pi)?;
    let factors = factor::factor(&l, &FieldMap::inclusion(&k, &l).apply_poly(&pi)?)?.factors;
    let (pi_y, _) = factors.choose(rng).unwrap();
    let w = Place::finite(&lt, pi_y)?.with_uniformizer(&phi.apply(&v.uniformizer)?)?;
    let sigma = sample::mw_elem_with(&func, rng.gen_range(0..=2), rng, |r| function_near(&func, &pi, r));
    let lhs = mw::mw_residue_raw(&sigma.map(&phi)?, &w)?;
    let rhs = mw::mw_residue_raw(&sigma, &v)?.map(&residue_map(&v, &w)?)?;
    same(&lhs, &rhs)
}

fn random_place(func: &Field, rng: &mut SampleRng) -> Place {
    let k = func.base().unwrap();
    if rng.gen_bool(0.2) {
        return Place::infinity(func).unwrap();
    }
    let pi = sample::irreducible(k, rng.gen_range(1..=2), rng);
    let p = Place::finite(func, &pi).unwrap();
    if rng.gen_bool(0.5) {
        uniformizer(&p, rng)
    } else {
        p
    }
}

fn r3c(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let func = Field::rat(&k, "t");
    let w = random_place(&func, rng);
    let sigma = sample::mw_elem(&k, degree(rng), rng);
    mw_is_zero(&mw::mw_residue_raw(&sigma.map(&FieldMap::inclusion(&k, &func))?, &w)?)
}

fn r3d(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let func = Field::rat(&k, "t");
    let w = random_place(&func, rng);
    let sigma = sample::mw_elem(&k, degree(rng), rng);
    let lhs = mw::mw_specialize(&sigma.map(&FieldMap::inclusion(&k, &func))?, &w)?;
    same(&lhs, &sigma.map(&FieldMap::inclusion(&k, &w.residue))?)
}

fn r3e(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let func = Field::rat(&k, "t");
    let pi = sample::irreducible(&k, rng.gen_range(1..=2), rng);
    let v = Place::finite(&func, &pi)?;
    let v = if rng.gen_bool(0.5) { uniformizer(&v, rng) } else { v };
    let sigma = sample::mw_elem_with(&func, rng.gen_range(0..=2), rng, |r| function_near(&func, &pi, r));
    let u = unit_at(&v, rng);
    let kv = &v.residue;
    let d = mw::mw_residue_raw(&sigma, &v)?;
    let lhs = mw::mw_residue_raw(&MwElem::bracket(&func, &u)?.mul(&sigma)?, &v)?;
    let rhs = MwElem::eps(kv).mul(&MwElem::bracket(kv, &v.reduce(&u)?)?)?.mul(&d)?;
    let lhs_eta = mw::mw_residue_raw(&MwElem::eta(&func).mul(&sigma)?, &v)?;
    let rhs_eta = MwElem::eta(kv).mul(&d)?;
    Ok(same(&lhs, &rhs)? && same(&lhs_eta, &rhs_eta)?)
}

/// `d^{pi'}_w(phi_* s) = <u> e_eps d^{pi}_v(s)` for `phi(pi) = u pi'^e`.
fn r3a_plus(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    let func = Field::rat(&k, "s");
    let e = if rng.gen_bool(0.6) { 2 } else { rng.gen_range(1..=3) };
    let a = sample::elem(&k, rng);
    let b = sample::elem(&k, rng);
    let c = sample::unit(&k, rng);
    // r(s) = a + c (s - b)^e g(s) with g(b) != 0
    let g = loop {
        let g = sample::monic_poly(&k, rng.gen_range(0..=1), rng);
        if !k.peval(&g, &b).is_zero() {
            break g;
        }
    };
    let sb = k.plinear(&b);
    let r = k.padd(&k.pconst(a.clone()), &k.pscale(&k.pmul(&k.ppow(&sb, e), &g), &c));
    let phi = substitution(&func, &func, func.rat_from_poly(&r));
    let v = Place::rational(&func, &a)?;
    let w = Place::rational(&func, &b)?;
    let w = if rng.gen_bool(0.5) { uniformizer(&w, rng) } else { w };
    let ratio = func.div(&phi.apply(&v.uniformizer)?, &func.powi(&w.uniformizer, e as i64)?)?;
    let ubar = w.reduce(&ratio)?;
    let sigma = sample::mw_elem_with(&func, rng.gen_range(0..=2), rng, |x| function_near(&func, &k.plinear(&a), x));
    let lhs = mw::mw_residue_raw(&sigma.map(&phi)?, &w)?;
    let mult = MwElem::n_eps(&k, e as i64).times_angle(&ubar)?;
    let rhs = mult.mul(&mw::mw_residue_raw(&sigma, &v)?)?;
    same(&lhs, &rhs)
}

// ---------------------------------------------------------------------------
// R4

fn r4a(rng: &mut SampleRng) -> Result<bool> {
    let k = small_field(rng, false);
    if rng.gen_bool(0.5) {
        // Uniformizer change at a place: pi^* -> (u pi)^* has delta = u^{-1}.
        let func = Field::rat(&k, "t");
        let pi = sample::irreducible(&k, rng.gen_range(1..=2), rng);
        let v = Place::finite(&func, &pi)?;
        let v2 = uniformizer(&v, rng);
        let u = func.div(&v2.uniformizer, &v.uniformizer)?;
        let sigma = sample::mw_elem_with(&func, rng.gen_range(0..=2), rng, |r| function_near(&func, &pi, r));
        let lhs = mw::mw_residue_raw(&sigma, &v2)?;
        let rhs = mw::mw_residue_raw(&sigma, &v)?.times_angle(&v.reduce(&u)?)?;
        same(&lhs, &rhs)
    } else {
        // Rescaled presentation: w' = c^{-1} w, computed through Bass-Tate.
        let monic = random_ext(&k, 2, "a", "w", false, rng);
        let c = sample::unit(&k, rng);
        let scaled = Extension::new_trusted(&k, &[k.pscale(&monic.stage_poly(0), &c)], &["a"], "w")?;
        let sigma = sample::mw_elem(&monic.top, rng.gen_range(-1..=1), rng);
        let lhs = mw_transfer_bass_tate(std::slice::from_ref(&scaled), &sigma)?;
        let cinv = k.inv(&c)?;
        let emb = monic.top.embed_from(&k, &cinv)?;
        let rhs = mw_transfer(&monic, &sigma.times_angle(&emb)?.with_twist(Some("w".into())))?;
        same(&lhs, &rhs)
    }
}

// ---------------------------------------------------------------------------
// R1c+

/// `L = E[a]/(f)` over `E = F_p(s)`, base changed along `s -> r^p`.
/// Returns the factor `f_x` of `f(r^p)`, its multiplicity and the image of `a`.
struct Inseparable {
    lk: Extension,
    big: Field,
    factor: Option<Extension>,
    image: Elem,
    mult: i64,
}

fn inseparable_case(rng: &mut SampleRng) -> Inseparable {
    let p = *[2u64, 3].choose(rng).unwrap();
    let fp = Field::fp(p).unwrap();
    let e_field = Field::rat(&fp, "s");
    let f_field = Field::rat(&fp, "r");
    let s = e_field.gen().unwrap();
    let r = f_field.gen().unwrap();
    if rng.gen_bool(0.5) {
        // a^p - g(s): R has one point with kappa = F, a -> g(r).
        let c = sample::elem(&fp, rng);
        let m = sample::unit(&fp, rng);
        let gs = e_field.add(&e_field.mul(&e_field.embed_base(&m), &s), &e_field.embed_base(&c));
        let gr = f_field.add(&f_field.mul(&f_field.embed_base(&m), &r), &f_field.embed_base(&c));
        let mut coeffs = vec![e_field.neg(&gs)];
        coeffs.extend((1..p).map(|_| e_field.zero()));
        coeffs.push(e_field.one());
        let lk = Extension::new_trusted(&e_field, &[Poly::from_coeffs(coeffs)], &["a"], "w").unwrap();
        Inseparable { lk, big: f_field, factor: None, image: gr, mult: p as i64 }
    } else {
        // a^{2p} - s = (a^2 - r)^p over F.
        let mut coeffs = vec![e_field.neg(&s)];
        coeffs.extend((1..2 * p).map(|_| e_field.zero()));
        coeffs.push(e_field.one());
        let lk = Extension::new_trusted(&e_field, &[Poly::from_coeffs(coeffs)], &["a"], "w").unwrap();
        let fx = Poly::from_coeffs(vec![f_field.neg(&r), f_field.zero(), f_field.one()]);
        let kx = Extension::new_trusted(&f_field, &[fx], &["a"], "wx").unwrap();
        let image = kx.top.gen().unwrap();
        Inseparable { lk, big: f_field, factor: Some(kx), image, mult: p as i64 }
    }
}

fn r1c_plus(rng: &mut SampleRng) -> Result<bool> {
    let case = inseparable_case(rng);
    let e_field = &case.lk.base;
    let f_field = &case.big;
    let fp = f_field.base().unwrap().clone();
    let p = fp.char();
    let r = f_field.gen()?;
    let rp = f_field.pow(&r, p);
    let phi = substitution(e_field, f_field, rp.clone());
    let kappa = case.factor.as_ref().map(|x| x.top.clone()).unwrap_or_else(|| f_field.clone());
    let to_kappa = FieldMap::Ext {
        src: case.lk.top.clone(),
        dst: kappa.clone(),
        base: Box::new(FieldMap::Rat {
            src: e_field.clone(),
            dst: kappa.clone(),
            base: Box::new(FieldMap::inclusion(&fp, &kappa)),
            image: kappa.embed_from(f_field, &rp)?,
        }),
        image: case.image.clone(),
    };
    let sigma = sample::mw_elem(&case.lk.top, rng.gen_range(-1..=1), rng);
    let lhs = mw_transfer(&case.lk, &sigma.clone().with_twist(Some("w".into())))?.map(&phi)?;
    let at_x = sigma.map(&to_kappa)?;
    let pushed = match &case.factor {
        None => at_x,
        Some(kx) => mw_transfer(kx, &at_x.with_twist(Some(kx.label.clone())))?,
    };
    let rhs = MwElem::n_eps(f_field, case.mult).mul(&pushed)?;
    same(&lhs, &rhs)
}
