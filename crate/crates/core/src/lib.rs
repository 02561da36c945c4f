//! Torsion degrees of CM elliptic curves and the classification of new
//! torsion subgroups over number fields of degree `2p`.

pub mod arith;
pub mod classification;
pub mod degrees;
pub mod error;
pub mod orders;
pub mod parse;
pub mod verify;

pub use error::{Error, Result};
