//! Closed-form MUB triplets: the one-parameter family `(Id, F(0, b(t)), C(t))`
//! and the circulant-block construction `(Id, E1(x), E2(x))`.

mod triplet;
mod zauner;

pub use triplet::{
    admissible_interval, build_c, build_triplet, derivation_trace, inequivalence_report, simple_system_residuals,
    triplet_params, DerivationTrace, InequivalenceReport, SecondSolution, TripletParams,
    SIN_BETA_THRESHOLD,
};
pub use zauner::{zauner_construction, zauner_t, ZaunerBlocks};
