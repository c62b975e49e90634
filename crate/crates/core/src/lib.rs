//! Security figures of merit for quantum-cryptographic primitives driven by
//! quantum-dot and Poisson photon sources.

pub mod bitcommit;
pub mod coinflip;
pub mod error;
pub mod fock;
pub mod numlin;
pub mod qkd;
pub mod sources;
pub mod sweep;
pub mod tokens;

pub use error::{Error, Result};
