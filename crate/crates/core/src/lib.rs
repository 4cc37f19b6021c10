//! State-aware query complexity for Hermitian operators.
//!
//! Given `H` and an initial state `psi0`, the crate builds the Krylov
//! decomposition, the spectral measure of `psi0` and the Favard expansion
//! of a target function, and reports the minimal polynomial degree needed
//! to prepare `f(H)|psi0>` to a given accuracy.

pub mod chebyshev;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod family;
pub mod favard;
pub mod lanczos;
pub mod linalg;
pub mod measure;
pub mod random;
pub mod scenario;

pub use error::{KrylovError, Result};
