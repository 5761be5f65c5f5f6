//! Galois module structure of holomorphic differentials of A4 covers of the
//! projective line in characteristic two.

pub mod artin_schreier;
pub mod decomp;
pub mod error;
pub mod families;
pub mod gen;
pub mod gf;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod ramification;
pub mod ratfunc;
pub mod repbuilder;
pub mod report;
pub mod zoo;

pub use error::{Error, Result};
pub use gf::{Fe, Gf};
