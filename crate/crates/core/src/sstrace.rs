//! Bezoutians, Scheja-Storch trace forms, Grothendieck residue symbols,
//! usual traces and differential transfers on Grothendieck-Witt groups.

use crate::error::{MwkError, Result};
use crate::exact::field::Elem;
use crate::exact::linalg::{self, Matrix};
use crate::exact::mpoly::MPoly;
use crate::fields::Extension;
use crate::gw::{self, GwElem};

/// Element `sum_a m_a (x) r_a` of `B (x)_A B`, `m_a` the monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bezoutian {
    pub right: Vec<Elem>,
}

/// A-linear form on B given by its values on the monomial basis.
pub type LinearForm = Vec<Elem>;

fn tensor_mul(ext: &Extension, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
    let b = &ext.top;
    let d = ext.degree();
    let mut out = vec![b.zero(); d];
    for (i, ri) in x.iter().enumerate() {
        if ri.is_zero() {
            continue;
        }
        for (j, sj) in y.iter().enumerate() {
            if sj.is_zero() {
                continue;
            }
            let prod = b.mul(&ext.basis_element(i), &ext.basis_element(j));
            let right = b.mul(ri, sj);
            for (e, c) in ext.coords(&prod).iter().enumerate() {
                if !c.is_zero() {
                    out[e] = b.add(&out[e], &b.mul(&ext.embed(c), &right));
                }
            }
        }
    }
    out
}

/// `Delta_f = prod_i c_ii` with `c_ii = (f_i(y_<i, x_i) - f_i(y_<i, y_i)) / (x_i - y_i)`,
/// computed on the monic stage polynomials.
pub fn bezoutian(ext: &Extension) -> Result<Bezoutian> {
    let b = &ext.top;
    let d = ext.degree();
    let mut acc = vec![b.zero(); d];
    acc[0] = b.one();
    let gens = ext.generators();
    for (i, stage) in ext.stages.iter().enumerate() {
        let below = if i == 0 { &ext.base } else { &ext.stages[i - 1] };
        let f = match stage {
            crate::exact::field::Field::Ext(e) => e.modulus.clone(),
            _ => unreachable!(),
        };
        let alpha = &gens[i];
        let mut c = vec![b.zero(); d];
        for (k, g) in f.c.iter().enumerate().skip(1) {
            if g.is_zero() {
                continue;
            }
            let gk = b.embed_from(below, g)?;
            for a in 0..k {
                let left = ext.coords(&b.pow(alpha, a as u64));
                let right = b.mul(&gk, &b.pow(alpha, (k - 1 - a) as u64));
                for (e, le) in left.iter().enumerate() {
                    if !le.is_zero() {
                        c[e] = b.add(&c[e], &b.mul(&ext.embed(le), &right));
                    }
                }
            }
        }
        acc = tensor_mul(ext, &acc, &c);
    }
    Ok(Bezoutian { right: acc })
}

/// Tate trace of the monic presentation: the form `tau` with `Phi(Delta)(tau) = 1`.
fn ss_trace_monic(ext: &Extension) -> Result<LinearForm> {
    let k = &ext.base;
    let d = ext.degree();
    let delta = bezoutian(ext)?;
    // sum_a tau_a coords(r_a)_b = delta_{b0}
    let cols: Vec<Vec<Elem>> = delta.right.iter().map(|r| ext.coords(r)).collect();
    let m = linalg::transpose(&cols);
    let mut rhs = vec![k.zero(); d];
    rhs[0] = k.one();
    linalg::solve(k, &m, &rhs).map_err(|_| MwkError::domain("singular Bezoutian system: invalid presentation"))
}

/// The Scheja-Storch form `tau_f` of the presentation as supplied: for a
/// stage scaled by a unit `c`, `tau` is divided by `c`.
pub fn ss_trace(ext: &Extension) -> Result<LinearForm> {
    let tau = ss_trace_monic(ext)?;
    let s = ext.scale_unit();
    if ext.top.is_one(&s) {
        return Ok(tau);
    }
    let sinv = ext.top.inv(&s)?;
    Ok((0..ext.degree()).map(|i| apply_form(ext, &tau, &ext.top.mul(&sinv, &ext.basis_element(i)))).collect())
}

pub fn apply_form(ext: &Extension, phi: &[Elem], b: &Elem) -> Elem {
    let k = &ext.base;
    ext.coords(b).iter().zip(phi).fold(k.zero(), |acc, (c, t)| k.add(&acc, &k.mul(c, t)))
}

/// `Tr^omega(b w) = tau_f(b)`.
pub fn diff_trace(ext: &Extension, b: &Elem) -> Result<Elem> {
    Ok(apply_form(ext, &ss_trace(ext)?, b))
}

/// `Res[lambda dt ; f]`, with `lambda` a polynomial in the presentation variables.
pub fn residue_symbol(ext: &Extension, lambda: &MPoly) -> Result<Elem> {
    let b = lambda.eval_in(&ext.base, &ext.top, &ext.generators())?;
    diff_trace(ext, &b)
}

/// Gram matrix `(x, y) -> phi(u x y)` on the monomial basis.
pub fn scaled_gram(ext: &Extension, phi: &[Elem], u: &Elem) -> Matrix {
    let d = ext.degree();
    let basis: Vec<Elem> = (0..d).map(|i| ext.basis_element(i)).collect();
    (0..d)
        .map(|i| (0..d).map(|j| apply_form(ext, phi, &ext.top.mul(u, &ext.top.mul(&basis[i], &basis[j])))).collect())
        .collect()
}

pub fn usual_trace(ext: &Extension, b: &Elem) -> Elem {
    ext.trace(b)
}

/// Usual trace as a linear form.
pub fn trace_form(ext: &Extension) -> LinearForm {
    (0..ext.degree()).map(|i| ext.trace(&ext.basis_element(i))).collect()
}

/// Non-degeneracy of the trace form.
pub fn is_etale(ext: &Extension) -> bool {
    let g = scaled_gram(ext, &trace_form(ext), &ext.top.one());
    !linalg::det(&ext.base, &g).is_zero()
}

/// Differential transfer `GW(E, omega_{E/k}) -> GW(k)`.
pub fn gw_transfer(ext: &Extension, a: &GwElem) -> Result<GwElem> {
    if a.field != ext.top {
        return Err(MwkError::domain(format!("form lives on {}, extension top is {}", a.field, ext.top)));
    }
    if let Some(l) = &a.twist {
        if *l != ext.label {
            return Err(MwkError::domain(format!("form is twisted by {l}, transfer expects {}", ext.label)));
        }
    }
    let k = &ext.base;
    let tau = ss_trace(ext)?;
    let mut out = GwElem::zero(k);
    for (u, n) in &a.terms {
        let g = gw::gram_to_gw(k, &scaled_gram(ext, &tau, u))?;
        out = out.add(&g.scale(*n));
    }
    Ok(out)
}

/// Scharlau transfer `<u> -> [Tr(u x y)]` along the usual trace.
pub fn scharlau_transfer(ext: &Extension, a: &GwElem) -> Result<GwElem> {
    let k = &ext.base;
    let tr = trace_form(ext);
    let mut out = GwElem::zero(k);
    for (u, n) in &a.terms {
        out = out.add(&gw::gram_to_gw(k, &scaled_gram(ext, &tr, u))?.scale(*n));
    }
    Ok(out)
}

/// The unit `b` with `phi = tau_f(b .)`, i.e. the omega-element `b w`.
pub fn linear_form_to_omega(ext: &Extension, phi: &[Elem]) -> Result<Elem> {
    let k = &ext.base;
    let tau = ss_trace(ext)?;
    let g = scaled_gram(ext, &tau, &ext.top.one());
    let c = linalg::solve(k, &g, phi)?;
    Ok(ext.from_coords(&c))
}

/// The dual basis form `(alpha^i)^*` of a monogenic presentation.
pub fn dual_basis_form(ext: &Extension, i: usize) -> LinearForm {
    let k = &ext.base;
    (0..ext.degree()).map(|j| if i == j { k.one() } else { k.zero() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::field::{Field, Poly};

    fn poly(k: &Field, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| k.from_i64(x)).collect())
    }

    #[test]
    fn f9_trace_and_gram() {
        let k = Field::fp(3).unwrap();
        let e = Extension::simple(&k, &poly(&k, &[1, 0, 1]), "a", "w").unwrap();
        let tau = ss_trace(&e).unwrap();
        assert_eq!(tau, vec![k.zero(), k.one()]);
        let g = scaled_gram(&e, &tau, &e.top.one());
        assert_eq!(g, vec![vec![k.zero(), k.one()], vec![k.one(), k.zero()]]);
        assert_eq!(usual_trace(&e, &e.top.one()), k.from_i64(2));
        assert!(is_etale(&e));
    }

    #[test]
    fn bezoutian_of_square_root() {
        let k = Field::fp(5).unwrap();
        let e = Extension::simple(&k, &poly(&k, &[-2, 0, 1]), "a", "w").unwrap();
        let d = bezoutian(&e).unwrap();
        // t (x) 1 + 1 (x) t
        assert_eq!(d.right, vec![e.top.gen().unwrap(), e.top.one()]);
    }

    #[test]
    fn inseparable_tate_form() {
        let f2 = Field::fp(2).unwrap();
        let k = Field::rat(&f2, "s");
        let s = k.gen().unwrap();
        let f = Poly::from_coeffs(vec![k.neg(&s), k.zero(), k.one()]);
        let e = Extension::simple(&k, &f, "a", "w").unwrap();
        assert!(!is_etale(&e));
        let h = gw_transfer(&e, &GwElem::one(&e.top)).unwrap();
        assert!(gw::gw_equal(&h, &GwElem::h(&k)).unwrap());
    }

    #[test]
    fn omega_of_first_dual_basis_vector() {
        let k = Field::fp(3).unwrap();
        let e = Extension::simple(&k, &poly(&k, &[1, 0, 1]), "a", "w").unwrap();
        let tau = ss_trace(&e).unwrap();
        assert_eq!(linear_form_to_omega(&e, &tau).unwrap(), e.top.one());
        let b = linear_form_to_omega(&e, &dual_basis_form(&e, 0)).unwrap();
        assert_eq!(diff_trace(&e, &b).unwrap(), k.one());
        assert_eq!(diff_trace(&e, &e.top.mul(&b, &e.top.gen().unwrap())).unwrap(), k.zero());
    }
}
