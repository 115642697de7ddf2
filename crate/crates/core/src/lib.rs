//! Certified quantum-dimension lower bounds for the prepare-and-measure
//! dimension test.
//!
//! The test: a verifier encodes a uniformly random n-bit string into n qubits,
//! in either the computational (Z) or Hadamard (X) basis, sends them to an
//! untrusted device, later announces the basis and asks for the string back.
//! Passing with probability p at mismatch threshold t certifies a lower bound
//! on the dimension of the device's quantum register.
//!
//! The crate provides:
//!
//! - [`entropy`] — binary entropy, exact binomial tail sums, and related
//!   scalar kernels (all logarithms base 2 throughout the crate);
//! - [`linalg`] — dense complex Hermitian linear algebra with a Jacobi
//!   eigensolver, for density matrices up to 64x64;
//! - [`density`] — density matrices, bipartite states, measurement bases,
//!   single-qubit channels, von Neumann and conditional entropies;
//! - [`bounds`] — the certified-dimension lower bounds (exact, Stirling,
//!   multi-basis corollaries, MUB extractor) and threshold optimization;
//! - [`noise`] — the honest-device noise pipeline and analytic pass
//!   probabilities, plus the certified-qubits-vs-n sweep;
//! - [`sim`] — seeded Monte-Carlo execution of the protocol with honest and
//!   adversarial prover strategies, and one-sided confidence bounds;
//! - [`oracle`] — brute-force numerical verification of the entropy
//!   inequalities the bounds rest on, on small instances.

pub mod bounds;
pub mod density;
pub mod entropy;
pub mod error;
pub mod format;
pub mod linalg;
pub mod noise;
pub mod oracle;
pub mod sim;

pub use error::{Error, Result};
