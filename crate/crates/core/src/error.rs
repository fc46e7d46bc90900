use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is not unit norm (norm {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("diagonal entry {index} is not unimodular (modulus {modulus})")]
    NotUnimodular { index: usize, modulus: f64 },

    #[error("{0} is not a permutation of 0..6")]
    NotPermutation(String),

    #[error("t = {t} outside the admissible interval [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("sin(beta) = {sin_beta} at t = {t}: the triplet formulas are singular here")]
    Singular { t: f64, sin_beta: f64 },

    #[error("2x2 block {block} does not factor as a unitary S(beta0..beta3)")]
    Factorization { block: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("vector is degenerate: rank of N is {rank}, expected 5")]
    Degenerate { rank: usize },

    #[error("continuation broke down at (a, b) = ({a}, {b})")]
    ContinuationBreakdown { a: f64, b: f64 },

    #[error("grid infeasible: interval budget {budget} is not below 1/pi")]
    InfeasibleGrid { budget: f64 },

    #[error("ORT table mismatch: table has N' = {table}, vectors use N' = {requested}")]
    TableMismatch { table: u32, requested: u32 },

    #[error("bad ORT table file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
