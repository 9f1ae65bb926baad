//! Acceptance run: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::error::Error;
use std::panic;
use std::time::Instant;

use rand::Rng;

use mwk_core::chowwitt::{self, Curve, Pb1Class, Point, QuadraticDivisor};
use mwk_core::exact::factor;
use mwk_core::exact::field::{Elem, Field, Poly};
use mwk_core::fields::{self, Extension, FieldMap, Place};
use mwk_core::gw::{self, GwElem};
use mwk_core::km::KmElem;
use mwk_core::mw::{self, MwElem, Word};
use mwk_core::rules::{self, RuleStatus};
use mwk_core::sample::{self, SampleRng};
use mwk_core::sstrace;
use mwk_core::transfer;

type R<T> = Result<T, Box<dyn Error>>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+).into());
        }
    };
}

// ---------------------------------------------------------------------------
// Shared helpers and oracles

fn poly(k: &Field, c: &[i64]) -> Poly {
    Poly::from_coeffs(c.iter().map(|&x| k.from_i64(x)).collect())
}

fn fq(q: u64) -> Field {
    fields::finite_field(q).unwrap()
}

fn units_of(k: &Field) -> Vec<Elem> {
    fields::enumerate_fq(k).into_iter().filter(|a| !a.is_zero()).collect()
}

fn order(k: &Field) -> u64 {
    fields::enumerate_fq(k).len() as u64
}

/// Euler's criterion in odd characteristic; every unit is a square otherwise.
fn euler_square(k: &Field, u: &Elem) -> bool {
    let q = order(k);
    q % 2 == 0 || k.is_one(&k.pow(u, (q - 1) / 2))
}

/// `<1> + <-1> + <1> + ...` with `n` terms, negated for `n < 0` with the
/// signs shifted by one.
fn alternating(k: &Field, n: i64) -> R<GwElem> {
    let signs: Vec<Elem> = if n >= 0 {
        (0..n).map(|i| if i % 2 == 0 { k.one() } else { k.from_i64(-1) }).collect()
    } else {
        (1..=-n).map(|i| if i % 2 == 0 { k.one() } else { k.from_i64(-1) }).collect()
    };
    let g = GwElem::diag(k, &signs)?;
    Ok(if n >= 0 { g } else { g.neg() })
}

fn gw_zero(x: &GwElem) -> R<bool> {
    Ok(gw::gw_equal(&x.clone().with_twist(None), &GwElem::zero(&x.field))?)
}

fn same(a: &MwElem, b: &MwElem) -> R<bool> {
    if a.field != b.field || a.degree != b.degree {
        return Ok(false);
    }
    Ok(mw::mw_equal(&a.clone().with_twist(None), &b.clone().with_twist(None))?)
}

fn random_form(k: &Field, rng: &mut SampleRng) -> R<GwElem> {
    let mut g = GwElem::zero(k);
    for _ in 0..rng.gen_range(1..=3) {
        g = g.add(&GwElem::angle(k, &sample::unit(k, rng))?.scale(rng.gen_range(-2..=2)));
    }
    Ok(g)
}

fn unit_at(place: &Place, rng: &mut SampleRng) -> R<Elem> {
    loop {
        let u = sample::unit(&place.func, rng);
        if place.valuation(&u)? == 0 {
            return Ok(u);
        }
    }
}

fn map_poly(p: &Poly, src: &Field, dst: &Field) -> R<Poly> {
    Ok(Poly::from_coeffs(p.c.iter().map(|c| dst.embed_from(src, c)).collect::<Result<Vec<_>, _>>()?))
}

/// Gram matrix of `(x, y) -> phi(u x y)` on the power basis, with `phi`
/// given as a closure on elements.
fn gram_of(ext: &Extension, u: &Elem, phi: impl Fn(&Elem) -> Elem) -> Vec<Vec<Elem>> {
    let d = ext.degree();
    let e = &ext.top;
    (0..d)
        .map(|i| (0..d).map(|j| phi(&e.mul(u, &e.mul(&ext.basis_element(i), &ext.basis_element(j))))).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// 1. Grothendieck-Witt rings of finite fields

fn gw_tables() -> R<String> {
    let mut rng = sample::rng(1);
    let mut checks = 0;
    for q in [2, 4] {
        let k = fq(q);
        for u in units_of(&k) {
            ensure!(gw::gw_equal(&GwElem::angle(&k, &u)?, &GwElem::one(&k))?, "<{}> != <1> over F_{q}", k.show(&u));
            checks += 1;
        }
        for _ in 0..20 {
            let (a, b) = (random_form(&k, &mut rng)?, random_form(&k, &mut rng)?);
            ensure!(gw::gw_equal(&a, &b)? == (a.rank() == b.rank()), "equality is not the rank over F_{q}");
            checks += 1;
        }
    }

    let k = fq(5);
    for u in units_of(&k) {
        let x = GwElem::one(&k).sub(&GwElem::angle(&k, &u)?);
        if euler_square(&k, &u) {
            ensure!(gw_zero(&x)?, "1 - <{}> != 0 for a square over F_5", k.show(&u));
        } else {
            ensure!(!gw_zero(&x)?, "1 - <{}> vanishes over F_5", k.show(&u));
            ensure!(gw_zero(&x.mul(&x))?, "(1 - <{}>)^2 != 0 over F_5", k.show(&u));
            ensure!(gw_zero(&x.scale(2))?, "2(1 - <{}>) != 0 over F_5", k.show(&u));
        }
        checks += 1;
    }
    ensure!(gw::witt_equal(&GwElem::from_int(&k, 2), &GwElem::zero(&k))?, "2 != 0 in W(F_5)");

    let k = fq(7);
    let nonsquares: Vec<Elem> = units_of(&k).into_iter().filter(|u| !euler_square(&k, u)).collect();
    ensure!(nonsquares.len() == 3, "F_7 has {} nonsquares by Euler's criterion", nonsquares.len());
    let h = GwElem::h(&k);
    for u in &nonsquares {
        let x = GwElem::one(&k).sub(&GwElem::angle(&k, u)?);
        ensure!(!gw_zero(&x)?, "1 - <{}> vanishes over F_7", k.show(u));
        ensure!(gw_zero(&x.scale(2))?, "1 - <{}> does not have order 2", k.show(u));
        ensure!(gw_zero(&h.mul(&x))?, "h (1 - <{}>) != 0", k.show(u));
        for v in &nonsquares {
            let y = GwElem::one(&k).sub(&GwElem::angle(&k, v)?);
            ensure!(gw_zero(&x.mul(&y))?, "I^2(F_7) != 0");
            checks += 1;
        }
    }
    let zero = GwElem::zero(&k);
    ensure!(!gw::witt_equal(&GwElem::from_int(&k, 2), &zero)?, "2 = 0 in W(F_7)");
    ensure!(gw::witt_equal(&GwElem::from_int(&k, 4), &zero)?, "4 != 0 in W(F_7)");
    Ok(format!("{checks} identities over F_2, F_4, F_5, F_7"))
}

// ---------------------------------------------------------------------------
// 2. Presentation relations

fn presentation() -> R<String> {
    let mut rng = sample::rng(2);
    let mut tuples = 0;
    for k in [fq(3), fq(5), fq(7), fq(9), fq(4), Field::Q] {
        let eta = MwElem::eta(&k);
        let zero2 = MwElem::zero(&k, -1);
        for _ in 0..84 {
            let (u, v) = (sample::unit(&k, &mut rng), sample::unit(&k, &mut rng));
            let (a, b) = (sample::unit(&k, &mut rng), sample::unit(&k, &mut rng));
            let angle = |x: &Elem| GwElem::angle(&k, x);
            ensure!(gw::gw_equal(&angle(&k.mul(&u, &k.mul(&v, &v)))?, &angle(&u)?)?, "GW1 fails over {k}");
            let s = k.add(&u, &v);
            if !s.is_zero() {
                let rhs = GwElem::diag(&k, &[s.clone(), k.mul(&s, &k.mul(&u, &v))])?;
                ensure!(gw::gw_equal(&GwElem::diag(&k, &[u.clone(), v.clone()])?, &rhs)?, "GW2 fails over {k}");
            }
            let hyp = GwElem::diag(&k, &[k.one(), k.from_i64(-1)])?;
            ensure!(gw::gw_equal(&GwElem::diag(&k, &[u.clone(), k.neg(&u)])?, &hyp)?, "GW3 fails over {k}");

            if !k.is_one(&a) {
                let steinberg = MwElem::symbol(&k, &[a.clone(), k.sub(&k.one(), &a)])?;
                ensure!(mw::mw_is_zero(&steinberg)?, "MW1 fails over {k} at {}", k.show(&a));
            }
            let lhs = MwElem::bracket(&k, &k.mul(&a, &b))?;
            let rhs = MwElem::bracket(&k, &a)?
                .add(&MwElem::bracket(&k, &b)?)?
                .add(&eta.mul(&MwElem::symbol(&k, &[a.clone(), b.clone()])?)?)?;
            ensure!(same(&lhs, &rhs)?, "MW2 fails over {k}");
            let ba = MwElem::bracket(&k, &a)?;
            ensure!(same(&eta.mul(&ba)?, &ba.mul(&eta)?)?, "MW3 fails over {k}");
            ensure!(same(&eta.mul(&MwElem::h(&k))?, &zero2)?, "MW4 fails over {k}");
            tuples += 1;
        }
    }
    Ok(format!("{tuples} unit tuples"))
}

// ---------------------------------------------------------------------------
// 3. Quadratic integers

fn eps_arithmetic() -> R<String> {
    let mut checks = 0;
    for k in [fq(3), fq(5), fq(7), fq(9), fq(2), Field::Q] {
        let (one, eps, h) = (GwElem::one(&k), GwElem::eps(&k), GwElem::h(&k));
        ensure!(gw::gw_equal(&eps.mul(&eps), &one)?, "eps^2 != 1 over {k}");
        ensure!(gw::gw_equal(&eps.mul(&h), &h.neg())?, "eps h != -h over {k}");
        let table: Vec<GwElem> = (-400..=400).map(|n| gw::n_eps(&k, n)).collect();
        let at = |n: i64| &table[(n + 400) as usize];
        for n in -60..=60 {
            ensure!(gw::gw_equal(at(n), &alternating(&k, n)?)?, "{n}_eps differs from the alternating sum over {k}");
        }
        for n in -20..=20i64 {
            for m in -20..=20i64 {
                ensure!(gw::gw_equal(&at(n).mul(at(m)), at(n * m))?, "({n}*{m})_eps is not multiplicative over {k}");
                checks += 1;
            }
            let rest = at(n).sub(&GwElem::from_int(&k, n.rem_euclid(2)));
            ensure!(gw::gw_equal(&rest, &h.scale(n.div_euclid(2)))?, "{n}_eps mod h is not {n} mod 2 over {k}");
            let as_mw = MwElem::from_gw(at(n))?;
            ensure!(same(&MwElem::n_eps(&k, n), &as_mw)?, "{n}_eps differs in K^MW_0 over {k}");
        }
    }
    let k = fq(7);
    let two = GwElem::one(&k).add(&GwElem::one(&k));
    ensure!(!gw::gw_equal(&two, &gw::n_eps(&k, 2))?, "1_eps + 1_eps = 2_eps over F_7");
    let one = MwElem::n_eps(&k, 1);
    ensure!(!same(&one.add(&one)?, &MwElem::n_eps(&k, 2))?, "1_eps + 1_eps = 2_eps in K^MW_0(F_7)");
    Ok(format!("{checks} products over six fields"))
}

// ---------------------------------------------------------------------------
// 4. Residues

fn residue_axioms() -> R<String> {
    let mut rng = sample::rng(4);
    let qs = [3u64, 4, 5, 7, 9];
    for i in 0..200 {
        let k = fq(qs[i % qs.len()]);
        let func = Field::rat(&k, "t");
        let pi = sample::irreducible(&k, rng.gen_range(1..=2), &mut rng);
        let place = Place::finite(&func, &pi)?;
        let kappa = place.residue.clone();
        let n = rng.gen_range(-1..=2);
        let sigma = sample::mw_elem(&func, n, &mut rng);
        let res = |x: &MwElem, p: &Place| mw::mw_residue_raw(x, p);
        let d = res(&sigma, &place)?;
        let u = unit_at(&place, &mut rng)?;
        let ub = place.reduce(&u)?;
        let tag = format!("symbol {i} over F_{}(t)", order(&k));

        let lhs = res(&MwElem::eta(&func).mul(&sigma)?, &place)?;
        ensure!(same(&lhs, &MwElem::eta(&kappa).mul(&d)?)?, "d(eta s) != eta d(s) for {tag}");

        let r = rng.gen_range(0..=1u32);
        let m = rng.gen_range(-2..=2);
        let len = rng.gen_range(1..=3usize);
        let vs = (0..len).map(|_| unit_at(&place, &mut rng)).collect::<R<Vec<_>>>()?;
        let mut units = vec![func.mul(&vs[0], &func.powi(&place.uniformizer, m)?)];
        units.extend(vs[1..].iter().cloned());
        let word = MwElem::from_words(&func, len as i64 - r as i64, vec![(Word { eta: r, units }, 1)])?;
        let bars = vs.iter().map(|v| place.reduce(v)).collect::<Result<Vec<_>, _>>()?;
        let tail = if len == 1 { MwElem::one(&kappa) } else { MwElem::symbol(&kappa, &bars[1..])? };
        let expected = MwElem::eta_pow(&kappa, r)
            .mul(&MwElem::n_eps(&kappa, m))?
            .mul(&MwElem::angle(&kappa, &bars[0])?)?
            .mul(&tail)?;
        ensure!(same(&res(&word, &place)?, &expected)?, "residue of a leading {m}-th power differs for {tag}");

        let moved = place.with_uniformizer(&func.mul(&u, &place.uniformizer))?;
        ensure!(same(&res(&sigma, &moved)?, &d.times_angle(&ub)?)?, "d^(u pi) != <u> d^pi for {tag}");
        ensure!(same(&res(&sigma.times_angle(&u)?, &place)?, &d.times_angle(&ub)?)?, "d(<u> s) != <u> d(s) for {tag}");
        let lhs = res(&MwElem::bracket(&func, &u)?.mul(&sigma)?, &place)?;
        let rhs = MwElem::eps(&kappa).mul(&MwElem::bracket(&kappa, &ub)?)?.mul(&d)?;
        ensure!(same(&lhs, &rhs)?, "d([u] s) != eps [u] d(s) for {tag}");

        let s = mw::mw_specialize(&sigma, &place)?;
        let minus_one = MwElem::bracket(&kappa, &kappa.from_i64(-1))?;
        let via_pi = res(&MwElem::bracket(&func, &place.uniformizer)?.mul(&sigma)?, &place)?.sub(&minus_one.mul(&d)?)?;
        ensure!(same(&s, &via_pi)?, "s^pi != d([pi] s) - [-1] d(s) for {tag}");
        let neg_pi = func.neg(&place.uniformizer);
        let via_neg = MwElem::eps(&kappa).mul(&res(&MwElem::bracket(&func, &neg_pi)?.mul(&sigma)?, &place)?)?.neg();
        ensure!(same(&s, &via_neg)?, "s^pi != -eps d([-pi] s) for {tag}");

        for (big, small) in [(MwElem::eps(&func), MwElem::eps(&kappa)), (MwElem::h(&func), MwElem::h(&kappa))] {
            ensure!(same(&res(&big.mul(&sigma)?, &place)?, &small.mul(&d)?)?, "residue is not linear for {tag}");
        }
    }
    Ok("200 symbols".into())
}

// ---------------------------------------------------------------------------
// 5. Reciprocity

fn q_linear(a: i64, b: i64) -> Poly {
    // b t + a
    poly(&Field::Q, &[a, b])
}

fn reciprocity() -> R<String> {
    let mut rng = sample::rng(5);
    let qs = [3u64, 4, 5, 7, 9];
    let mut count = 0;
    while count < 200 {
        let k = fq(qs[count % qs.len()]);
        let func = Field::rat(&k, "t");
        let num = sample::poly(&k, rng.gen_range(1..=4), &mut rng);
        if num.is_zero() {
            continue;
        }
        let den = sample::monic_poly(&k, rng.gen_range(0..=3), &mut rng);
        let f = func.rat_from_parts(num, den)?;
        let report = transfer::reciprocity_check(&MwElem::bracket(&func, &f)?)?;
        ensure!(report.ok, "sum over places is {} for f = {} over F_{}", mw::show_mw(&report.sum), func.show(&f), order(&k));
        count += 1;
    }

    let q = Field::Q;
    let func = Field::rat(&q, "t");
    let p = |c: &[i64]| func.rat_from_poly(&poly(&q, c));
    let prod = |fs: &[Elem]| fs.iter().fold(func.one(), |acc, f| func.mul(&acc, f));
    let quo = |a: Elem, b: Elem| func.div(&a, &b).unwrap();
    let t = p(&[0, 1]);
    let half = func.rat_from_poly(&q.plinear(&fields::q_elem(1, 2)));
    let cases = vec![
        t.clone(),
        p(&[1, 0, 1]),
        quo(p(&[-2, 0, 1]), func.rat_from_poly(&q_linear(1, 1))),
        prod(&[func.from_i64(3), p(&[1, 1, 1])]),
        prod(&[p(&[1, 0, 1]), p(&[-3, 1])]),
        prod(&[func.from_i64(-2), t.clone(), p(&[-5, 0, 1])]),
        quo(p(&[2, 0, 1]), prod(&[p(&[-1, 1]), p(&[2, 1])])),
        prod(&[p(&[3, 0, 1]), p(&[3, 0, 1]), half]),
        quo(prod(&[func.from_i64(5), p(&[-7, 0, 1])]), p(&[1, 0, 1])),
        prod(&[p(&[-1, -1, 1]), p(&[5, 0, 1])]),
        quo(func.from_i64(6), prod(&[p(&[0, 1]), p(&[-2, 0, 1])])),
    ];
    for f in &cases {
        let report = transfer::reciprocity_check(&MwElem::bracket(&func, f)?)?;
        ensure!(report.ok, "sum over places is {} for f = {} over Q", mw::show_mw(&report.sum), func.show(f));
    }
    Ok(format!("{count} functions over finite fields, {} over Q", cases.len()))
}

// ---------------------------------------------------------------------------
// 6. Degree formula

fn check_degree(ext: &Extension) -> R<()> {
    let got = transfer::degree_class(ext)?;
    let want = MwElem::from_gw(&alternating(&ext.base, ext.degree() as i64)?)?;
    ensure!(same(&got, &want)?, "Tr(<1> w) = {} over {}, expected {}", mw::show_mw(&got), ext.base, mw::show_mw(&want));
    Ok(())
}

/// `x^p - a` over `F_p(s)`.
fn root_extension(base: &Field, p: u64, a: &Elem, var: &str, label: &str) -> R<Extension> {
    let mut c = vec![base.zero(); p as usize + 1];
    c[0] = base.neg(a);
    c[p as usize] = base.one();
    Ok(Extension::simple(base, &Poly::from_coeffs(c), var, label)?)
}

fn degree_formula() -> R<String> {
    let mut rng = sample::rng(6);
    let mut cases = 0;
    for q in [2u64, 3, 4, 5, 7] {
        let k = fq(q);
        for d in 1..=4 {
            for _ in 0..2 {
                let f = sample::irreducible(&k, d, &mut rng);
                check_degree(&Extension::simple(&k, &f, "a", "w")?)?;
                cases += 1;
            }
        }
    }
    for p in [2u64, 3] {
        let base = Field::rat(&Field::fp(p)?, "s");
        let s = base.gen()?;
        let radicands = [s.clone(), base.add(&s, &base.one()), base.add(&base.mul(&s, &base.mul(&s, &s)), &s)];
        for a in &radicands {
            let ext = root_extension(&base, p, a, "x", "w")?;
            ensure!(!ext.is_separable(), "x^{p} - a should be inseparable");
            check_degree(&ext)?;
            cases += 1;
        }
    }
    for (q, d1, d2) in [(2u64, 2, 2), (3, 2, 2), (3, 2, 3), (5, 3, 2), (4, 2, 2), (7, 2, 2)] {
        let k = fq(q);
        let ek = Extension::simple(&k, &sample::irreducible(&k, d1, &mut rng), "a", "wE")?;
        let le = Extension::simple(&ek.top, &sample::irreducible(&ek.top, d2, &mut rng), "b", "wLE")?;
        check_degree(&fields::concatenate(&ek, &le, "wL")?)?;
        cases += 1;
    }
    for p in [2u64, 3] {
        // x^p = s, y^p = x: purely inseparable of degree p^2.
        let base = Field::rat(&Field::fp(p)?, "s");
        let ek = root_extension(&base, p, &base.gen()?, "x", "wE")?;
        let x = ek.top.gen()?;
        let mut c = vec![ek.top.zero(); p as usize + 1];
        c[0] = ek.top.neg(&x);
        c[p as usize] = ek.top.one();
        let le = Extension::new_trusted(&ek.top, &[Poly::from_coeffs(c)], &["y"], "wLE")?;
        check_degree(&fields::concatenate(&ek, &le, "wL")?)?;
        cases += 1;
    }
    Ok(format!("{cases} presentations"))
}

// ---------------------------------------------------------------------------
// 7. Glued transfer against Bass-Tate

fn compare_chain(chain: &[Extension], joined: &Extension, sigma: &MwElem) -> R<MwElem> {
    let glued = transfer::mw_transfer_chain(chain, sigma)?;
    let whole = transfer::mw_transfer(joined, &sigma.clone().with_twist(Some(joined.label.clone())))?;
    let bt = transfer::mw_transfer_bass_tate(chain, sigma)?;
    ensure!(same(&glued, &bt)?, "stepwise glued transfer {} != Bass-Tate {}", mw::show_mw(&glued), mw::show_mw(&bt));
    ensure!(same(&whole, &bt)?, "glued transfer {} != Bass-Tate {}", mw::show_mw(&whole), mw::show_mw(&bt));
    Ok(bt)
}

fn transfer_comparison() -> R<String> {
    let mut rng = sample::rng(7);
    let mut elements = 0;
    let setups: [(u64, &[usize]); 6] = [(2, &[3]), (3, &[2]), (5, &[3]), (4, &[2]), (3, &[2, 2]), (7, &[2])];
    for (i, (q, degrees)) in setups.iter().cycle().take(12).enumerate() {
        let k = fq(*q);
        let mut chain: Vec<Extension> = Vec::new();
        for (j, d) in degrees.iter().enumerate() {
            let below = chain.last().map(|e| e.top.clone()).unwrap_or_else(|| k.clone());
            let f = sample::irreducible(&below, *d, &mut rng);
            let f = if i % 2 == 1 { below.pscale(&f, &sample::unit(&below, &mut rng)) } else { f };
            chain.push(Extension::simple(&below, &f, ["a", "b"][j], &format!("w{j}"))?);
        }
        let joined = if chain.len() == 1 { chain[0].clone() } else { fields::concatenate(&chain[0], &chain[1], "w")? };
        let joined = Extension { label: "w".into(), ..joined };
        for n in [-1, 0, 1, 0, 1] {
            compare_chain(&chain, &joined, &sample::mw_elem(&joined.top, n, &mut rng))?;
            elements += 1;
        }
    }

    // F_81 / F_3: one quartic generator against a tower through F_9.
    let f3 = fq(3);
    for _ in 0..2 {
        let g = sample::irreducible(&f3, 4, &mut rng);
        let quartic = Extension::simple(&f3, &g, "c", "wA")?;
        let ek = Extension::simple(&f3, &poly(&f3, &[1, 0, 1]), "a", "wE")?;
        let le = Extension::simple(&ek.top, &sample::irreducible(&ek.top, 2, &mut rng), "b", "wLE")?;
        let tower = fields::concatenate(&ek, &le, "wB")?;
        let big = tower.top.clone();
        let root = factor::roots_fq(&big, &map_poly(&g, &f3, &big)?)
            .into_iter()
            .next()
            .ok_or("quartic has no root in the tower")?;
        let iso = FieldMap::Ext {
            src: quartic.top.clone(),
            dst: big.clone(),
            base: Box::new(FieldMap::inclusion(&f3, &big)),
            image: root.clone(),
        };
        // phi(w_A) = f'(a) h'(b) / g'(phi c) w_B under the trace identification.
        let fa = big.embed_from(&ek.top, &fields::etale_unit(&ek)?)?;
        let hb = fields::etale_unit(&le)?;
        let gc = f3.peval_in(&f3.pderiv(&g), &big, &root)?;
        let change = big.div(&big.mul(&fa, &hb), &gc)?;
        let chain_b = [ek.clone(), le.clone()];
        for n in [-1, 0, 1, 0, 1, -1, 0, 1, 0, 1, 1, 0, -1, 0, 1, 0, 1, 1, 0, 1] {
            let sigma = sample::mw_elem(&quartic.top, n, &mut rng);
            let via_a = compare_chain(std::slice::from_ref(&quartic), &quartic, &sigma)?;
            let moved = sigma.map(&iso)?.times_angle(&change)?;
            let via_b = compare_chain(&chain_b, &tower, &moved)?;
            ensure!(same(&via_a, &via_b)?, "F_81 chains disagree: {} vs {}", mw::show_mw(&via_a), mw::show_mw(&via_b));
            elements += 1;
        }
    }
    Ok(format!("{elements} elements"))
}

// ---------------------------------------------------------------------------
// 8. Example transfers

fn example_transfers() -> R<String> {
    let mut rng = sample::rng(8);
    let mut checks = 0;
    for (q, d) in [(3u64, 2), (5, 3), (7, 2), (9, 2), (3, 3), (5, 2)] {
        let k = fq(q);
        let ext = Extension::simple(&k, &sample::irreducible(&k, d, &mut rng), "a", "w")?;
        let e = &ext.top;
        let to_trace = sstrace::linear_form_to_omega(&ext, &sstrace::trace_form(&ext))?;
        for _ in 0..3 {
            let u = sample::unit(e, &mut rng);
            let want = gw::gram_to_gw(&k, &gram_of(&ext, &u, |x| ext.trace(x)))?;
            let scaled = GwElem::angle(e, &e.mul(&u, &to_trace))?;
            ensure!(gw::gw_equal(&sstrace::gw_transfer(&ext, &scaled)?, &want)?, "differential transfer is not the scaled trace form");
            ensure!(gw::gw_equal(&sstrace::scharlau_transfer(&ext, &GwElem::angle(e, &u)?)?, &want)?, "Scharlau transfer differs");
            let mw_side = transfer::mw_transfer(&ext, &MwElem::from_gw(&scaled)?.with_twist(Some("w".into())))?;
            ensure!(same(&mw_side, &MwElem::from_gw(&want)?)?, "K^MW_0 transfer differs from the scaled trace form");
            checks += 1;
        }
    }

    for (q, d) in [(2u64, 2), (3, 2), (3, 3), (4, 2), (5, 2), (7, 3), (9, 2)] {
        let k = fq(q);
        let ext = Extension::simple(&k, &sample::irreducible(&k, d, &mut rng), "a", "w")?;
        let e = &ext.top;
        let w0 = sstrace::linear_form_to_omega(&ext, &sstrace::dual_basis_form(&ext, 0))?;
        for _ in 0..3 {
            let u = sample::unit(e, &mut rng);
            // N(u) = u^(1 + q + ... + q^(d-1))
            let exp = (0..d as u32).map(|i| q.pow(i)).sum::<u64>();
            let coords = ext.coords(&e.pow(&u, exp));
            ensure!(coords[1..].iter().all(|c| c.is_zero()), "norm is not in the base field");
            let got = transfer::mw_transfer(&ext, &MwElem::bracket(e, &u)?.times_angle(&w0)?.with_twist(Some("w".into())))?;
            ensure!(same(&got, &MwElem::bracket(&k, &coords[0])?)?, "Tr([u] w') != [N(u)] over F_{q}");
            checks += 1;
        }
    }
    // Over Q the norm formula is exact when u generates the presentation
    // defining w'; for other units it only holds modulo I^2.
    let qq = Field::Q;
    for (p, c) in [(0i64, 1i64), (0, -2), (1, 1), (-1, -1), (3, 5)] {
        for (a, b) in [(1i64, 1i64), (2, -1), (0, 3), (-5, 2)] {
            // u = a + b r with r^2 + p r + c = 0 has minimal polynomial
            // x^2 - (2a - p b) x + (a^2 - p a b + c b^2).
            let trace = 2 * a - p * b;
            let norm = a * a - p * a * b + c * b * b;
            let ext = Extension::simple(&qq, &poly(&qq, &[norm, -trace, 1]), "u", "w")?;
            let e = &ext.top;
            let w0 = sstrace::linear_form_to_omega(&ext, &sstrace::dual_basis_form(&ext, 0))?;
            let sigma = MwElem::bracket(e, &e.gen()?)?.times_angle(&w0)?.with_twist(Some("w".into()));
            let got = transfer::mw_transfer(&ext, &sigma)?;
            ensure!(
                same(&got, &MwElem::bracket(&qq, &qq.from_i64(norm))?)?,
                "Tr([u] w') = {} != [{norm}] over Q for u^2 - {trace} u + {norm}",
                mw::show_mw(&got)
            );
            checks += 1;
        }
    }

    for p in [2u64, 3] {
        let base = Field::rat(&Field::fp(p)?, "s");
        let s = base.gen()?;
        for a in [s.clone(), base.add(&s, &base.one())] {
            let ext = root_extension(&base, p, &a, "x", "w")?;
            let top = p as usize - 1;
            for _ in 0..3 {
                let u = sample::unit(&ext.top, &mut rng);
                let want = gw::gram_to_gw(&base, &gram_of(&ext, &u, |x| ext.coords(x)[top].clone()))?;
                let got = sstrace::gw_transfer(&ext, &GwElem::angle(&ext.top, &u)?)?;
                ensure!(gw::gw_equal(&got, &want)?, "inseparable transfer is not the Tate form over F_{p}(s)");
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} transfers"))
}

// ---------------------------------------------------------------------------
// 9. Scheja-Storch forms

/// Coefficient of `x^(d-1)` in `b mod f`.
fn top_coefficient(k: &Field, f: &Poly, b: &Poly) -> Elem {
    let d = f.deg().unwrap();
    k.prem(b, f).c.get(d - 1).cloned().unwrap_or_else(|| k.zero())
}

fn scheja_storch() -> R<String> {
    let mut rng = sample::rng(9);
    let mut checks = 0;
    let mut exts = Vec::new();
    for q in [2u64, 3, 4, 5, 7, 9] {
        let k = fq(q);
        for d in 2..=4 {
            exts.push(Extension::simple(&k, &sample::irreducible(&k, d, &mut rng), "a", "w")?);
        }
    }
    for p in [2u64, 3] {
        let base = Field::rat(&Field::fp(p)?, "s");
        exts.push(root_extension(&base, p, &base.gen()?, "x", "w")?);
    }
    for ext in &exts {
        let k = &ext.base;
        let d = ext.degree();
        let tau = sstrace::ss_trace(ext)?;
        ensure!(tau == sstrace::dual_basis_form(ext, d - 1), "tau_f is not the last dual basis form over {k}");
        let g = gram_of(ext, &ext.top.one(), |x| ext.coords(x)[d - 1].clone());
        ensure!(g == sstrace::scaled_gram(ext, &tau, &ext.top.one()), "Gram matrices differ over {k}");
        for i in 0..d {
            for j in 0..d {
                if i + j + 1 < d {
                    ensure!(g[i][j].is_zero(), "Gram matrix is not antitriangular over {k}");
                } else if i + j + 1 == d {
                    ensure!(k.is_one(&g[i][j]), "antidiagonal entry is not one over {k}");
                }
            }
        }
        ensure!(gw::gw_equal(&gw::gram_to_gw(k, &g)?, &alternating(k, d as i64)?)?, "Gram class is not d_eps over {k}");
        checks += 1;

        if ext.is_separable() {
            let fa = fields::etale_unit(ext)?;
            ensure!(sstrace::linear_form_to_omega(ext, &sstrace::trace_form(ext))? == fa, "trace is not f'(a) w over {k}");
            for _ in 0..3 {
                let lambda = sample::elem(&ext.top, &mut rng);
                let lhs = ext.trace(&ext.top.div(&lambda, &fa)?);
                ensure!(lhs == sstrace::diff_trace(ext, &lambda)?, "Euler formula fails over {k}");
                checks += 1;
            }
        }
    }

    for q in [2u64, 3, 5, 7, 9] {
        let k = fq(q);
        for _ in 0..4 {
            let mut factors: Vec<Poly> = Vec::new();
            while factors.len() < rng.gen_range(2..=3) {
                let f = sample::irreducible(&k, rng.gen_range(1..=3), &mut rng);
                if !factors.contains(&f) {
                    factors.push(f);
                }
            }
            let f = factors.iter().fold(poly(&k, &[1]), |acc, g| k.pmul(&acc, g));
            let found = factor::factor(&k, &f)?;
            ensure!(found.factors.len() == factors.len() && found.factors.iter().all(|(_, m)| *m == 1), "factorization of a squarefree product");
            let b = sample::poly(&k, f.deg().unwrap() - 1, &mut rng);
            let direct = top_coefficient(&k, &f, &b);
            let mut sum = k.zero();
            for (fi, _) in &found.factors {
                let ext = Extension::simple(&k, fi, "a", "w")?;
                let cofactor = k.pdiv_exact(&f, fi);
                let e = &ext.top;
                let local = e.div(&e.ext_from_poly(&k.prem(&b, fi)), &e.ext_from_poly(&k.prem(&cofactor, fi)))?;
                sum = k.add(&sum, &sstrace::diff_trace(&ext, &local)?);
            }
            ensure!(sum == direct, "CRT decomposition of tau_f fails over F_{q}");
            checks += 1;
        }
    }
    Ok(format!("{checks} forms"))
}

// ---------------------------------------------------------------------------
// 10. Homotopy invariance

fn point_degree(p: &Point) -> usize {
    match p {
        Point::Finite(pi) => pi.deg().unwrap(),
        Point::Infinity => 1,
    }
}

fn subtract_at(pending: &mut Vec<(Point, MwElem)>, p: Point, c: &MwElem) -> R<()> {
    match pending.iter().position(|(x, _)| *x == p) {
        Some(i) => pending[i].1 = pending[i].1.sub(c)?,
        None => pending.push((p, c.neg())),
    }
    Ok(())
}

/// Inverse of the splitting: lift divisor coefficients from the highest
/// degree points down, then correct the value at `t = 0`.
fn reconstruct(func: &Field, constant: &MwElem, divisor: &QuadraticDivisor) -> R<MwElem> {
    let k = func.base().unwrap();
    let mut pending: Vec<(Point, MwElem)> =
        divisor.entries.iter().map(|(p, c)| (p.clone(), c.clone().with_twist(None))).collect();
    let mut lifted = MwElem::zero(func, divisor.q + 1);
    loop {
        let mut live = Vec::new();
        for (p, c) in pending {
            if !mw::mw_is_zero(&c)? {
                live.push((p, c));
            }
        }
        pending = live;
        let Some(i) = (0..pending.len()).max_by_key(|&i| point_degree(&pending[i].0)) else { break };
        let (p, c) = pending[i].clone();
        let Point::Finite(pi) = &p else { return Err("divisor on A^1 has a point at infinity".into()) };
        let place = Place::finite(func, pi)?;
        let words = c.words().ok_or("coefficient is not given by words")?;
        let mut lam = MwElem::zero(func, divisor.q + 1);
        for (w, n) in words {
            lam = lam.add(&chowwitt::lift_generator(&place, w)?.scale(*n))?;
        }
        lifted = lifted.add(&lam)?;
        for (p2, c2) in chowwitt::tdiv(&lam, &Curve::affine(func))?.entries {
            subtract_at(&mut pending, p2, &c2.with_twist(None))?;
        }
    }
    let at_zero = mw::mw_specialize(&lifted, &Place::rational(func, &k.zero())?)?;
    let correction = constant.sub(&at_zero)?.map(&chowwitt::constant_map(func))?;
    Ok(lifted.add(&correction)?)
}

fn divisors_agree(a: &QuadraticDivisor, b: &QuadraticDivisor) -> R<bool> {
    let mut points: Vec<Point> = a.entries.iter().chain(&b.entries).map(|(p, _)| p.clone()).collect();
    points.sort();
    points.dedup();
    for p in points {
        let find = |d: &QuadraticDivisor| d.entries.iter().find(|(x, _)| *x == p).map(|(_, c)| c.clone().with_twist(None));
        let (x, y) = (find(a), find(b));
        let ok = match (x, y) {
            (Some(x), Some(y)) => same(&x, &y)?,
            (Some(z), None) | (None, Some(z)) => mw::mw_is_zero(&z)?,
            (None, None) => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn homotopy_invariance() -> R<String> {
    let mut rng = sample::rng(10);
    let qs = [3u64, 5, 7, 4];
    for i in 0..100 {
        let k = fq(qs[i % qs.len()]);
        let func = Field::rat(&k, "t");
        let sigma = sample::mw_elem(&func, rng.gen_range(-1..=2), &mut rng);
        let (constant, divisor) = chowwitt::a1_decompose(&sigma)?;
        let back = reconstruct(&func, &constant, &divisor)?;
        let (constant2, divisor2) = chowwitt::a1_decompose(&back)?;
        ensure!(same(&constant, &constant2)?, "constant part does not round-trip for {}", mw::show_mw(&sigma));
        ensure!(divisors_agree(&divisor, &divisor2)?, "divisor does not round-trip for {}", mw::show_mw(&sigma));
        ensure!(same(&back, &sigma)?, "reconstruction differs from {}", mw::show_mw(&sigma));

        let tau = sample::mw_elem(&k, rng.gen_range(-1..=2), &mut rng);
        let pulled = tau.map(&chowwitt::constant_map(&func))?;
        let a = sample::elem(&k, &mut rng);
        ensure!(same(&mw::mw_specialize(&pulled, &Place::rational(&func, &a)?)?, &tau)?, "s o phi_* != id");
        let pi = sample::irreducible(&k, rng.gen_range(1..=3), &mut rng);
        let place = Place::finite(&func, &pi)?;
        ensure!(mw::mw_is_zero(&mw::mw_residue_raw(&pulled, &place)?)?, "constants have a residue");

        let g = sample::word(&place.residue, rng.gen_range(-1..=1), &mut rng);
        let lift = chowwitt::lift_generator(&place, &g)?;
        let want = MwElem::from_words(&place.residue, g.degree(), vec![(g.clone(), 1)])?;
        ensure!(same(&mw::mw_residue_raw(&lift, &place)?, &want)?, "generator does not lift");
    }
    Ok("100 symbols".into())
}

// ---------------------------------------------------------------------------
// 11. Projective line

/// Random degree-zero divisor together with its rank-degree.
fn random_cycle(curve: &Curve, rng: &mut SampleRng) -> R<(QuadraticDivisor, i64)> {
    let k = curve.base().clone();
    let mut d = QuadraticDivisor::zero(curve, 0);
    let mut degree = 0;
    for _ in 0..rng.gen_range(1..=3) {
        let p = if rng.gen_bool(0.2) { Point::Infinity } else { Point::Finite(sample::irreducible(&k, rng.gen_range(1..=2), rng)) };
        let kappa = curve.place(&p)?.residue;
        let mut c = MwElem::zero(&kappa, 0);
        let mut rank = 0;
        for _ in 0..rng.gen_range(1..=2) {
            let n = rng.gen_range(-2..=2);
            c = c.add(&MwElem::angle(&kappa, &sample::unit(&kappa, rng))?.scale(n))?;
            rank += n;
        }
        degree += point_degree(&p) as i64 * rank;
        d.add_at(p, &c)?;
    }
    Ok((d, degree))
}

fn projective_line() -> R<String> {
    let mut rng = sample::rng(11);
    let mut principal = 0;
    for q in [3u64, 5] {
        let k = fq(q);
        let func = Field::rat(&k, "t");
        for _ in 0..30 {
            let rho = sample::mw_elem(&func, rng.gen_range(1..=2), &mut rng);
            for d in -2..=2 {
                let div = chowwitt::tdiv(&rho, &Curve::projective(&func, d))?;
                let class = chowwitt::pb1_class(&div)?;
                ensure!(class.is_zero()?, "principal divisor has class {} on O({d}) over F_{q}", class.show());
            }
            principal += 1;
        }
        for _ in 0..20 {
            let sigma = sample::mw_elem(&k, rng.gen_range(-1..=2), &mut rng);
            for d in [-2, 0, 2] {
                match chowwitt::pb1_class(&chowwitt::push_infinity(&Curve::projective(&func, d), &sigma)?)? {
                    Pb1Class::Even(m) => ensure!(same(&m, &sigma)?, "class of the point at infinity is not the identity on O({d})"),
                    Pb1Class::Odd(_) => return Err("even twist gave an odd class".into()),
                }
            }
        }
        for _ in 0..20 {
            for d in [-1, 1] {
                let (div, degree) = random_cycle(&Curve::projective(&func, d), &mut rng)?;
                match chowwitt::pb1_class(&div)? {
                    Pb1Class::Odd(n) => ensure!(n.as_int() == degree, "odd class {} != degree {degree}", n.as_int()),
                    Pb1Class::Even(_) => return Err("odd twist gave an even class".into()),
                }
            }
            let canonical = Curve::projective(&func, -2);
            let (div, degree) = random_cycle(&canonical, &mut rng)?;
            let forgotten = chowwitt::forget_divisor(&div)?;
            ensure!(chowwitt::cycle_degree(&forgotten) == degree, "forgetful divisor has the wrong degree");
            let tdeg = chowwitt::quadratic_degree(&div)?;
            ensure!(mw::mw_normalize(&tdeg)?.witt.rank() == degree, "rank of the quadratic degree != degree");
            let ranks: Vec<(Point, KmElem)> =
                forgotten.iter().map(|(p, c)| (p.clone(), KmElem::int(&c.field, c.as_int()))).collect();
            let hyper = chowwitt::hyper_divisor(&canonical, 0, &ranks)?;
            ensure!(same(&chowwitt::quadratic_degree(&hyper)?, &MwElem::h(&k).scale(degree))?, "degree of a hyperbolic cycle != n h");
        }
    }
    Ok(format!("{principal} principal divisors"))
}

// ---------------------------------------------------------------------------
// 12. Rules

fn rules_suite() -> R<String> {
    let outcomes = rules::run_suite(1, 50, None)?;
    let mut passed = 0;
    for o in &outcomes {
        if o.rule == "R3b" {
            ensure!(o.status == RuleStatus::NotImplemented("deferred by the paper"), "R3b status {:?}", o.status);
            continue;
        }
        ensure!(o.passed() && o.instances >= 50, "{} {:?} ({} failures)", o.rule, o.status, o.failures);
        passed += 1;
    }
    ensure!(passed == 13, "only {passed} rules ran");
    Ok(format!("{passed} rules x 50 instances, R3b not implemented (deferred by the paper)"))
}

// ---------------------------------------------------------------------------

type Criterion = (u32, &'static str, f64, fn() -> R<String>);

const CRITERIA: [Criterion; 12] = [
    (1, "gw-structure-tables", 1.0, gw_tables),
    (2, "presentation-relations", 30.0, presentation),
    (3, "eps-arithmetic", 1.0, eps_arithmetic),
    (4, "residue-axioms", 30.0, residue_axioms),
    (5, "weil-reciprocity", 60.0, reciprocity),
    (6, "degree-formula", 10.0, degree_formula),
    (7, "transfer-comparison", 30.0, transfer_comparison),
    (8, "example-transfers", 5.0, example_transfers),
    (9, "scheja-storch", 10.0, scheja_storch),
    (10, "homotopy-invariance", 20.0, homotopy_invariance),
    (11, "pb1", 60.0, projective_line),
    (12, "rules-suite", 60.0, rules_suite),
];

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (n, name, budget, check) in CRITERIA {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check);
        let secs = start.elapsed().as_secs_f64();
        let verdict = match outcome {
            Ok(Ok(_)) if secs > budget => Err(format!("over the {budget}s budget")),
            Ok(Ok(detail)) => Ok(detail),
            Ok(Err(e)) => Err(e.to_string()),
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .map(|m| format!("panic: {m}"))
                .unwrap_or_else(|| "panic".into())),
        };
        match verdict {
            Ok(detail) => println!("criterion {n} {name}: PASS ({secs:.2}s; {detail})"),
            Err(e) => {
                failures += 1;
                println!("criterion {n} {name}: FAIL ({secs:.2}s; {e})");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
