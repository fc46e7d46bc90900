//! Interval-certified exhaustive search for quartets `(Id, F(a, b), C, D)`.
//!
//! Every parameter cell and every phase box is covered; a cell is eliminated
//! when no box-level candidate for `D` survives.

pub mod bounds;
pub mod grid;
pub mod multiscale;
pub mod ort;
pub mod region;
pub mod search;

pub use bounds::{bound, improved_bound, midpoint_sum, trivial_bound, BoundKind, CertBoundReport, Interval, Target};
pub use grid::{daughters, triangle_cells, CellParams, GridSpec, GridVector};
pub use multiscale::{survives_multiscale, ColumnGroup, MultiscaleEngine, PreparedColumn};
pub use ort::{are_nprime_orthogonal, compute_difference_base, compute_ort, compute_ort_base, Bitset, OrtTable};
pub use search::{
    certify_cell, compute_fub, enumerate_ctilde, f_column_intervals, for_each_ctilde, search_dtilde, CellReport,
    CounterexampleCandidate, DtildeFilter, DtildeOutcome, DtildeSearcher,
};
pub use region::{cell_block, certify_region, checkpoint_path, RegionManifest, RegionOptions};
