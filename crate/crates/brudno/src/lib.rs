//! Desk-scale experiments connecting algorithmic complexity with entropy,
//! for classical symbolic dynamics and for quantum spin chains.
//!
//! The library realizes, at explicitly computable scale, both halves of the
//! complexity–entropy bridge:
//!
//! * **Classical.** Ergodic symbolic sources (Bernoulli, Markov, encoded
//!   orbits) have a Kolmogorov–Sinai entropy rate `h = lim H_n/n`. Replacing
//!   uncomputable universal semi-measures by explicit weighted mixtures
//!   ([`semimeasure`]) turns the Gacs complexity `−log₂ μ` into something a
//!   desk machine can evaluate, and [`classical`] measures how fast its
//!   block averages approach `h`, including the typical-set and counting
//!   arguments behind that convergence.
//!
//! * **Quantum.** Translation-invariant chain states have a von Neumann
//!   entropy rate `s = lim S(ρ⁽ⁿ⁾)/n` ([`spin`]). Semi-density matrices and
//!   explicit universal mixtures give quantum Gacs functionals `H̄, H̲`
//!   ([`gacs`]), and [`typicality`] verifies the finite-n content of the
//!   quantum Brudno-style theorem: typical projections built from the joint
//!   spectral data of the state and the mixture have the right trace,
//!   dimension, and per-projection complexity up to measured slack.
//!
//! [`encoding`] fixes the Gödel-style numberings everything else refers to,
//! and all logarithms throughout the crate are base 2.

pub mod classical;
pub mod encoding;
pub mod error;
pub mod gacs;
pub mod linalg;
pub mod semimeasure;
pub mod spin;
pub mod symbolic;
pub mod typicality;

pub use error::{Error, Result};
