//! Seeded random fields elements, polynomials and Milnor-Witt symbols.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::factor::{is_irreducible_fq, random_fq};
use crate::exact::field::{Elem, Field, Poly};
use crate::fields::q_elem;
use crate::mw::{MwElem, Word};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random element, drawn with small height over infinite fields.
pub fn elem(k: &Field, rng: &mut SampleRng) -> Elem {
    match k {
        Field::Fp(_) => random_fq(k, rng),
        Field::Q => q_elem(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
        Field::Ext(e) if k.is_finite() => {
            let _ = e;
            random_fq(k, rng)
        }
        Field::Ext(e) => {
            let d = e.modulus.deg().unwrap();
            let p = Poly::from_coeffs((0..d).map(|i| if i < 2 { elem(&e.base, rng) } else { e.base.zero() }).collect());
            k.ext_from_poly(&p)
        }
        Field::Rat(r) => {
            let num = poly(&r.base, rng.gen_range(0..=2), rng);
            let den = monic_poly(&r.base, rng.gen_range(0..=1), rng);
            if num.is_zero() {
                return k.zero();
            }
            k.rat_from_parts(num, den).unwrap_or_else(|_| k.zero())
        }
    }
}

/// Random nonzero element.
pub fn unit(k: &Field, rng: &mut SampleRng) -> Elem {
    loop {
        let a = elem(k, rng);
        if !a.is_zero() {
            return a;
        }
    }
}

/// Random polynomial of degree at most `deg`.
pub fn poly(k: &Field, deg: usize, rng: &mut SampleRng) -> Poly {
    Poly::from_coeffs((0..=deg).map(|_| small(k, rng)).collect())
}

/// Random monic polynomial of degree exactly `deg`.
pub fn monic_poly(k: &Field, deg: usize, rng: &mut SampleRng) -> Poly {
    let mut c: Vec<Elem> = (0..deg).map(|_| small(k, rng)).collect();
    c.push(k.one());
    Poly::from_coeffs(c)
}

fn small(k: &Field, rng: &mut SampleRng) -> Elem {
    match k {
        Field::Rat(_) | Field::Q => k.from_i64(rng.gen_range(-3..=3)),
        _ => elem(k, rng),
    }
}

/// Random monic irreducible polynomial of the given degree over a finite field.
pub fn irreducible(k: &Field, deg: usize, rng: &mut SampleRng) -> Poly {
    loop {
        let f = monic_poly(k, deg, rng);
        if is_irreducible_fq(k, &f) {
            return f;
        }
    }
}

/// Random word of degree `n` with at most one `eta`.
pub fn word(k: &Field, n: i64, rng: &mut SampleRng) -> Word {
    let min_eta = (-n).max(0) as u32;
    let eta = min_eta + if n >= 0 && n < 2 { rng.gen_range(0..=1) } else { 0 };
    let m = (n + eta as i64) as usize;
    Word { eta, units: (0..m).map(|_| unit(k, rng)).collect() }
}

/// Random sum of one or two words of degree `n`.
pub fn mw_elem(k: &Field, n: i64, rng: &mut SampleRng) -> MwElem {
    let terms = rng.gen_range(1..=2);
    let words = (0..terms).map(|_| (word(k, n, rng), rng.gen_range(-2i64..=2))).collect();
    MwElem::from_words(k, n, words).unwrap()
}

/// Random word of degree `n` whose units are given by the closure.
pub fn mw_elem_with(k: &Field, n: i64, rng: &mut SampleRng, mut u: impl FnMut(&mut SampleRng) -> Elem) -> MwElem {
    let terms = rng.gen_range(1..=2);
    let mut words = Vec::new();
    for _ in 0..terms {
        let w = word(k, n, rng);
        let units = w.units.iter().map(|_| u(rng)).collect();
        words.push((Word { eta: w.eta, units }, rng.gen_range(-2i64..=2)));
    }
    MwElem::from_words(k, n, words).unwrap()
}
