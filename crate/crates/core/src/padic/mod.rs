//! Truncated unramified p-adic arithmetic.

pub mod fp_poly;
pub mod matrix;
pub mod ring;
pub mod witt;

pub use matrix::{Frobenius, Matrix, Ring, WittMatrix};
pub use ring::RingSpec;
pub use witt::{Embedding, Val, WittElement};
