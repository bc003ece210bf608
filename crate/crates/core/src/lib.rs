//! Mutually unbiased bases, quantum-coherence quantifiers and the
//! uncertainty bounds relating them.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: Hermitian eigendecomposition, spectral functions, norms.
//! - [`states`]: density matrices, entropies, reproducible random sampling.
//! - [`field`] and [`mub`]: finite fields and MUB construction / validation.
//! - [`measures`]: probabilities, entropies, relative entropy of coherence,
//!   fidelity and geometric coherence.
//! - [`bounds`]: closed-form right-hand sides of every inequality.
//! - [`harness`]: Monte-Carlo sweeps, Table 1 crossover, comparisons.
//! - [`cli`]: the `mubcoh` command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod field;
pub mod harness;
pub mod io;
pub mod measures;
pub mod mub;
pub mod numerics;
pub mod states;

pub use error::{Error, Result};
pub use mub::{construct_mub, Basis, MubSet};
pub use numerics::ComplexMatrix;
pub use states::{DensityMatrix, PureState};

pub use num_complex::Complex64;
