//! Two-qubit tetrahedron (SIC-POVM) tomography and discrete Wigner phase space.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: 2x2 / 4x4 complex matrices and a Hermitian eigenvalue kernel.
//! - [`pauli`]: displacement operators, Bell states, Bloch rotations.
//! - [`sic`]: tetrahedron and anti-tetrahedron measurement frames.
//! - [`wigner`]: Weyl/Wigner distributions, phase-point operators, striations.
//! - [`correlations`]: the 24 top permutations and symmetric-correlation candidates.
//! - [`sim`]: Born statistics, noise, seeded sampling and linear reconstruction.
//! - [`qkd`]: the three-party key distribution protocol with a-posteriori grant.

pub mod correlations;
pub mod error;
pub mod numerics;
pub mod pauli;
pub mod qkd;
pub mod sic;
pub mod sim;
pub mod wigner;

pub use error::{Error, Result};
