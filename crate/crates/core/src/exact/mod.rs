//! Arithmetic kernel: integers, rationals, finite fields, polynomials,
//! rational functions, factorization and dense linear algebra.

pub mod factor;
pub mod field;
pub mod integer;
pub mod linalg;
pub mod mpoly;
pub mod poly;

pub use factor::{factor, gf, Factorization};
pub use field::{Elem, Field, Poly};
pub use mpoly::{normal_form, MPoly};
