//! Dense linear algebra over an exact field.

use crate::error::{MwkError, Result};
use crate::exact::field::{Elem, Field};

pub type Matrix = Vec<Vec<Elem>>;

pub fn zeros(k: &Field, r: usize, c: usize) -> Matrix {
    vec![vec![k.zero(); c]; r]
}

pub fn identity(k: &Field, n: usize) -> Matrix {
    let mut m = zeros(k, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = k.one();
    }
    m
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(k: &Field, a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let inner = b.len();
    let mut out = zeros(k, n, m);
    for i in 0..n {
        for l in 0..inner {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if b[l][j].is_zero() {
                    continue;
                }
                out[i][j] = k.add(&out[i][j], &k.mul(&a[i][l], &b[l][j]));
            }
        }
    }
    out
}

pub fn mat_vec(k: &Field, a: &Matrix, v: &[Elem]) -> Vec<Elem> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y))))
        .collect()
}

pub fn det(k: &Field, m: &Matrix) -> Elem {
    let n = m.len();
    let mut a = m.clone();
    let mut d = k.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return k.zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = k.neg(&d);
        }
        d = k.mul(&d, &a[col][col]);
        let inv = k.inv(&a[col][col]).unwrap();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = k.mul(&a[r][col], &inv);
            for c in col..n {
                let t = k.mul(&f, &a[col][c]);
                a[r][c] = k.sub(&a[r][c], &t);
            }
        }
    }
    d
}

/// Solve `a x = b` for square invertible `a`.
pub fn solve(k: &Field, a: &Matrix, b: &[Elem]) -> Result<Vec<Elem>> {
    let n = a.len();
    let mut m: Matrix = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| MwkError::domain("singular linear system"))?;
        m.swap(piv, col);
        let inv = k.inv(&m[col][col])?;
        for c in col..=n {
            m[col][c] = k.mul(&m[col][c], &inv);
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..=n {
                let t = k.mul(&f, &m[col][c]);
                m[r][c] = k.sub(&m[r][c], &t);
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn inverse(k: &Field, a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let cols: Result<Vec<Vec<Elem>>> = (0..n)
        .map(|j| {
            let e: Vec<Elem> = (0..n).map(|i| if i == j { k.one() } else { k.zero() }).collect();
            solve(k, a, &e)
        })
        .collect();
    Ok(transpose(&cols?))
}

pub fn rank(k: &Field, m: &Matrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(piv, r);
        let inv = k.inv(&a[r][c]).unwrap();
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = k.mul(&a[i][c], &inv);
            for j in c..cols {
                let t = k.mul(&f, &a[r][j]);
                a[i][j] = k.sub(&a[i][j], &t);
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn is_symmetric(m: &Matrix) -> bool {
    let n = m.len();
    (0..n).all(|i| m[i].len() == n && (0..i).all(|j| m[i][j] == m[j][i]))
}
