//! Exact computations in Grothendieck-Witt rings, Milnor K-theory and
//! twisted Milnor-Witt K-theory of concrete fields.

pub mod error;
pub mod exact;
pub mod fields;
pub mod gw;
pub mod km;
pub mod mw;
pub mod sstrace;
pub mod transfer;
pub mod chowwitt;
pub mod rules;
pub mod sample;

pub use error::{MwkError, Result};
