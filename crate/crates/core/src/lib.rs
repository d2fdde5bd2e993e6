//! Exact rational verification of the Bruhat, orbit-space, torus and Weyl
//! machinery attached to the Levi `GL_r x Sp_2m` of `Sp_2n`.
//!
//! Everything is computed over the rationals; there are no tolerances.

pub mod bruhat;
pub mod cutoff;
pub mod dual;
pub mod error;
pub mod mat;
pub mod measure;
pub mod orbit;
pub mod rat;
pub mod sample;
pub mod suite;
pub mod symplectic;
pub mod torus;
pub mod weyl;

pub use error::{Error, Result};
pub use mat::Mat;
pub use rat::Rat;
pub use symplectic::{GroupShape, NilpotentPair};
