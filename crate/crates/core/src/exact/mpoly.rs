//! Sparse multivariate polynomials and reduction modulo triangular systems.

use std::collections::BTreeMap;

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field};

/// Exponent vector to nonzero coefficient. Variable names live with the caller.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Elem>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(k: &Field, nvars: usize, c: Elem) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        let _ = k;
        p
    }

    pub fn var(k: &Field, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, k.one());
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Elem) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// Highest variable index that occurs.
    pub fn top_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|e| e.iter().rposition(|&x| x > 0)).max()
    }

    fn add_term(&mut self, k: &Field, e: Vec<u32>, c: &Elem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = k.add(v, c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn add(&self, k: &Field, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(k, e.clone(), c);
        }
        r
    }

    pub fn neg(&self, k: &Field) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), k.neg(c))).collect() }
    }

    pub fn sub(&self, k: &Field, o: &MPoly) -> MPoly {
        self.add(k, &o.neg(k))
    }

    pub fn mul(&self, k: &Field, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(k, e, &k.mul(c1, c2));
            }
        }
        r
    }

    pub fn scale(&self, k: &Field, s: &Elem) -> MPoly {
        let mut r = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            r.add_term(k, e.clone(), &k.mul(c, s));
        }
        r
    }

    /// Leading coefficient in variable `i`, as a polynomial in the others.
    pub fn lead_in(&self, i: usize) -> MPoly {
        let d = self.deg_in(i).unwrap_or(0);
        let mut r = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == d {
                let mut e2 = e.clone();
                e2[i] = 0;
                r.terms.insert(e2, c.clone());
            }
        }
        r
    }

    /// Evaluate at a point of an extension field containing the coefficients.
    pub fn eval_in(&self, k: &Field, big: &Field, pt: &[Elem]) -> Result<Elem> {
        let mut acc = big.zero();
        for (e, c) in &self.terms {
            let mut t = big.embed_from(k, c)?;
            for (x, &p) in pt.iter().zip(e) {
                if p > 0 {
                    t = big.mul(&t, &big.pow(x, p as u64));
                }
            }
            acc = big.add(&acc, &t);
        }
        Ok(acc)
    }
}

/// Check that `sys[i]` is monic in variable `i` and involves only variables `0..=i`.
pub fn check_triangular(k: &Field, sys: &[MPoly]) -> Result<()> {
    for (i, f) in sys.iter().enumerate() {
        if f.top_var() != Some(i) {
            return Err(MwkError::domain(format!("stage {} is not triangular in its own variable", i + 1)));
        }
        let lead = f.lead_in(i);
        let one = MPoly::constant(k, f.nvars, k.one());
        if lead != one {
            return Err(MwkError::domain(format!("stage {} is not monic in its variable", i + 1)));
        }
    }
    Ok(())
}

/// Reduce `p` modulo a triangular system; the result has degree in each
/// `t_i` strictly below `deg_{t_i}(f_i)`.
pub fn normal_form(k: &Field, p: &MPoly, sys: &[MPoly]) -> Result<MPoly> {
    check_triangular(k, sys)?;
    let mut r = p.clone();
    for i in (0..sys.len()).rev() {
        let f = &sys[i];
        let d = f.deg_in(i).unwrap();
        loop {
            let hit = r.terms.iter().rev().find(|(e, _)| e[i] >= d).map(|(e, c)| (e.clone(), c.clone()));
            let Some((e, c)) = hit else { break };
            let mut shift = e.clone();
            shift[i] -= d;
            let m = MPoly::monomial(r.nvars, shift, c);
            r = r.sub(k, &m.mul(k, f));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable_reduction() {
        let k = Field::fp(3).unwrap();
        let t = MPoly::var(&k, 1, 0);
        let f = t.mul(&k, &t).add(&k, &MPoly::constant(&k, 1, k.one()));
        let r = normal_form(&k, &t.mul(&k, &t), &[f]).unwrap();
        assert_eq!(r, MPoly::constant(&k, 1, k.from_i64(-1)));
    }

    #[test]
    fn two_stage_reduction_over_f5() {
        let k = Field::fp(5).unwrap();
        let t1 = MPoly::var(&k, 2, 0);
        let t2 = MPoly::var(&k, 2, 1);
        let f1 = t1.mul(&k, &t1).sub(&k, &MPoly::constant(&k, 2, k.from_i64(2)));
        let f2 = t2.mul(&k, &t2).sub(&k, &t1);
        let p = t2.mul(&k, &t1).mul(&k, &t1);
        let r = normal_form(&k, &p, &[f1.clone(), f2.clone()]).unwrap();
        assert_eq!(r, t2.scale(&k, &k.from_i64(2)));
        let c = MPoly::constant(&k, 2, k.from_i64(3));
        assert_eq!(normal_form(&k, &c, &[f1, f2]).unwrap(), c);
    }

    #[test]
    fn rejects_non_triangular_systems() {
        let k = Field::fp(5).unwrap();
        let t1 = MPoly::var(&k, 2, 0);
        let t2 = MPoly::var(&k, 2, 1);
        let bad = t2.mul(&k, &t2);
        assert!(normal_form(&k, &t1, &[bad]).is_err());
        let nonmonic = t1.scale(&k, &k.from_i64(2));
        assert!(normal_form(&k, &t1, &[nonmonic]).is_err());
    }
}
