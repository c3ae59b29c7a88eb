//! Formal and sectorial normal forms of doubly-resonant saddle-node vector
//! fields `x^2 d/dx + f1 d/dy1 + f2 d/dy2` in three complex variables.

pub mod borel;
pub mod error;
pub mod io;
pub mod maps;
pub mod normalization;
pub mod painleve;
pub mod random;
pub mod saddle_node;
pub mod sectorial;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
