//! Exact finite Weyl-Heisenberg and Clifford group structures for single and
//! composite N-level quantum systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`numtheory`]: factorization, the `|SL(2,Z_N)|` order formula and the
//!   per-prime (elementary divisor) grouping of dimension lists.
//! - [`weylheis`]: the Weyl-Heisenberg group `H(N)` as an abstract group with
//!   exact phase bookkeeping, its center, phase space and symplectic form.
//! - [`dense`]: a small complex-matrix oracle used to check every abstract
//!   statement against actual unitaries.
//! - [`clifford1`]: `SL(2,Z_N)`, the Clifford quotient group
//!   `(Z_N x Z_N) ⋊ SL(2,Z_N)`, the Fourier/phase generators and word lifting.
//! - [`multipartite`]: block matrices over mixed moduli, the symmetry groups
//!   `Sp_[n1,...,nk]` and their decomposition into elementary blocks.
//! - [`stabsim`]: a Heisenberg-picture Clifford circuit simulator working on
//!   phase-space labels.
//!
//! Data-parallel loops (enumeration, closure, batch verification) go through
//! [`exec::Strategy`]; with the default `parallel` feature they run on rayon,
//! without it everything runs sequentially and produces identical results.

pub mod clifford1;
pub mod dense;
pub mod error;
pub mod exec;
pub mod multipartite;
pub mod numtheory;
pub mod stabsim;
pub mod weylheis;

pub use error::{Error, Result};
pub use exec::Strategy;
pub use num_complex::Complex64;
