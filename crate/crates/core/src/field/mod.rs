//! Exact arithmetic for subspaces of field extensions `K ⊆ L`, with `K` a
//! prime field or the rationals and `L` finite over `K` or equal to `K(t)`.

pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod subspace;
pub mod tower;

pub use scalar::{Field, PrimeField, Rationals};
pub use subspace::{annihilator, Ambient, Subspace};
pub use tower::{AnyTower, Extension, Tower};
