//! Determinant representations for scalar products and form factors of
//! quantum integrable models solvable by the algebraic Bethe Ansatz:
//! the quantum nonlinear Schroedinger gas and the XXX/XXZ spin-1/2 chains.
//!
//! Every determinant formula in this crate is verified, in the test suites
//! and in the `verify` CLI subcommand, against a brute-force oracle that
//! builds the monodromy matrix explicitly on small Hilbert spaces.

pub mod bethe;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod qnls;
pub mod scalar;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};

/// Shorthand used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Library version, embedded in all serialized outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
