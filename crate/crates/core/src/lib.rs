//! Finite-dimensional spectral triples, inductive systems of triples and
//! numerical diagnostics for their inductive limits.
//!
//! The crate is organised bottom-up:
//!
//! * [`operator`] dense complex matrices, Hermitian eigendecomposition,
//!   operator norms, resolvents and functional calculus;
//! * [`algebra`] finite C*-algebras `M_{n_1} ⊕ … ⊕ M_{n_s}`, states,
//!   *-homomorphisms and the GNS construction;
//! * [`triple`] finite spectral triples, isometric morphisms, commutator
//!   seminorms, grading checks and the spectral distance;
//! * [`inductive`] inductive systems of triples and their level-`J`
//!   truncated realizations;
//! * [`diagnostics`] resolvent/function gap sequences and commutator
//!   sequences together with heuristic verdicts;
//! * [`generators`] the Cantor-set and AF-algebra example systems;
//! * [`config`] and [`cli`] the JSON configuration and command-line front end.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod inductive;
pub mod operator;
pub mod tolerance;
pub mod triple;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tolerance::Tolerances;
