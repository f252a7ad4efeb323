//! Computational tools for the mod-p Dyer-Lashof algebra, Dickson-Mui invariants
//! and the Hopf ring structure on the homology of QS^k.
// sparse classes expose is_zero rather than is_empty; index loops read better in the matrix code
#![allow(clippy::len_without_is_empty, clippy::needless_range_loop)]

pub mod biv;
pub mod dyer_lashof;
pub mod error;
pub mod fp;
pub mod hopf;
pub mod invariants;
pub mod linalg;
pub mod series;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use fp::{binom_mod_p, koszul_sign, FpScalar, Prime};
