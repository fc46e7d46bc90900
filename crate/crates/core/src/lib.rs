//! Mutually unbiased bases in dimension six.
//!
//! * [`linalg`], [`phase`], [`equivalence`], [`haagerup`]: complex 6x6 algebra,
//!   unbiasedness predicates and Hadamard equivalence.
//! * [`fourier`]: the generalized Fourier family `F(a, b)` and the reduced
//!   unbiasedness system.
//! * [`analytic`]: closed-form MUB triplets.
//! * [`vecsearch`]: numerical search for all vectors unbiased to `(Id, F(a, b))`.
//! * [`certify`]: interval-certified exhaustive search ruling out quartets
//!   `(Id, F(a, b), C, D)`.
//! * [`families`]: degeneracy matrices, continuation and symmetry orbits.

pub mod analytic;
pub mod certify;
pub mod clique;
pub mod equivalence;
pub mod error;
pub mod families;
pub mod fourier;
pub mod haagerup;
pub mod linalg;
pub mod phase;
pub mod vecsearch;

pub use error::{Error, Result};
pub use fourier::FourierParams;
pub use linalg::{Complex, ComplexMatrix6, Vector6};
pub use phase::PhaseVector;
