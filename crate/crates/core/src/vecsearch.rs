//! Numerical search for every vector unbiased to both `Id` and `F(a, b)`.
//!
//! A phase vector `u` is unbiased to `Id` by construction, and unbiased to
//! the columns `h_j` of `F(a, b)` iff `sum_j |<u, h_j>|` reaches its maximum
//! `sqrt 6`. Each trial climbs that sum from a random start and then polishes
//! the limit with Gauss-Newton on `|<u, h_j>|^2 - 1/6`.

use std::f64::consts::TAU;

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clique::Graph;
use crate::error::{Error, Result};
use crate::fourier::{build_f, FourierParams};
use crate::linalg::{inner_product, Complex, ComplexMatrix6, Vector6, DIM, INV_SQRT6, NUMERIC_TOL};
use crate::phase::PhaseVector;

const SQRT6: f64 = 2.449_489_742_783_178;

/// A climb that stalls further than this below `sqrt 6` is a non-global
/// local maximum and is discarded.
const BASIN_GAP: f64 = 1e-6;
const POLISH_STEPS: usize = 30;
/// A root whose residual Jacobian has a singular value below this is
/// degenerate and may be a coalescence of several roots.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Parameter offset used to split a degenerate root into its neighbours.
const SPLIT_STEP: f64 = 1e-6;
const SPLIT_STARTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub trials: usize,
    pub opt_tolerance: f64,
    /// In turns.
    pub dedupe_tolerance: f64,
    pub rng_seed: u64,
    pub max_iterations: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self { trials: 5000, opt_tolerance: 1e-9, dedupe_tolerance: 1e-5, rng_seed: 0, max_iterations: 2000 }
    }
}

impl SearchSettings {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if !(self.opt_tolerance > 0.0 && self.dedupe_tolerance > 0.0) {
            return Err(Error::Precondition("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnbiasedCatalog {
    pub params: FourierParams,
    /// Sorted by [`PhaseVector::canonical_cmp`].
    pub vectors: Vec<PhaseVector>,
    /// Each basis lists six indices into `vectors`, increasing.
    pub bases: Vec<[usize; DIM]>,
    /// `extension_matrix[i][j]`: bases `i` and `j` are mutually unbiased.
    pub extension_matrix: Vec<Vec<bool>>,
    /// How many simple roots each vector splits into under a small generic
    /// change of `(a, b)`; 1 for non-degenerate vectors.
    pub multiplicities: Vec<usize>,
    /// Trials whose climb reached the global maximum.
    pub converged_trials: usize,
}

impl UnbiasedCatalog {
    pub fn new(params: FourierParams, vectors: Vec<PhaseVector>) -> Self {
        let multiplicities = vec![1; vectors.len()];
        Self { params, vectors, bases: Vec::new(), extension_matrix: Vec::new(), multiplicities, converged_trials: 0 }
    }

    pub fn vector_count_with_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Product of the multiplicities of the basis members.
    pub fn basis_multiplicity(&self, basis: usize) -> usize {
        self.bases[basis].iter().map(|&i| self.multiplicities[i]).product()
    }

    pub fn basis_count_with_multiplicity(&self) -> usize {
        (0..self.bases.len()).map(|i| self.basis_multiplicity(i)).sum()
    }

    /// Largest `| |<u, f_j>| - 1/sqrt 6 |` over all vectors and columns.
    pub fn max_unbiasedness_residual(&self) -> f64 {
        let f = build_f(self.params);
        self.vectors
            .iter()
            .flat_map(|u| {
                let u = u.to_vector();
                f.columns().map(|c| (inner_product(&u, &c).norm() - INV_SQRT6).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn basis_matrix(&self, basis: usize) -> ComplexMatrix6 {
        ComplexMatrix6::from_columns(&self.bases[basis].map(|i| self.vectors[i].to_vector()))
    }
}

/// The conjugated columns of `F(a, b)`, laid out for the inner products.
struct Columns {
    conj: [Vector6; DIM],
}

impl Columns {
    fn new(h: &ComplexMatrix6) -> Self {
        Self { conj: h.columns().map(|c| c.map(|z| z.conj())) }
    }

    /// `<u, h_j>` for all `j`, and `u` itself.
    fn products(&self, phases: &[f64; 5]) -> ([Complex; DIM], Vector6) {
        let mut u = [Complex::new(INV_SQRT6, 0.0); DIM];
        for k in 0..5 {
            u[k + 1] = Complex::from_polar(INV_SQRT6, TAU * phases[k]);
        }
        let z = std::array::from_fn(|j| (0..DIM).map(|i| u[i] * self.conj[j][i]).sum());
        (z, u)
    }

    /// `dz_j / dphi_k = 2 pi i u_k conj(h_kj)`.
    fn derivative(&self, u: &Vector6, j: usize, k: usize) -> Complex {
        Complex::new(0.0, TAU) * u[k + 1] * self.conj[j][k + 1]
    }

    fn objective(&self, phases: &[f64; 5]) -> f64 {
        self.products(phases).0.iter().map(|z| z.norm()).sum()
    }

    fn objective_and_gradient(&self, phases: &[f64; 5]) -> (f64, [f64; 5]) {
        let (z, u) = self.products(phases);
        let mut grad = [0.0; 5];
        let mut value = 0.0;
        for j in 0..DIM {
            let r = z[j].norm();
            value += r;
            if r == 0.0 {
                continue;
            }
            for (k, g) in grad.iter_mut().enumerate() {
                *g += (z[j].conj() * self.derivative(&u, j, k)).re / r;
            }
        }
        (value, grad)
    }

    /// Gradient ascent with Armijo backtracking and an adaptive step.
    fn climb(&self, mut x: [f64; 5], max_iterations: usize) -> ([f64; 5], f64) {
        let (mut fx, mut g) = self.objective_and_gradient(&x);
        let mut step = 0.05;
        for _ in 0..max_iterations {
            let gg: f64 = g.iter().map(|v| v * v).sum();
            if gg < 1e-24 {
                break;
            }
            let mut accepted = false;
            while step > 1e-14 {
                let y: [f64; 5] = std::array::from_fn(|k| x[k] + step * g[k]);
                let (fy, gy) = self.objective_and_gradient(&y);
                if fy >= fx + 1e-4 * step * gg {
                    x = y;
                    fx = fy;
                    g = gy;
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (x, fx)
    }

    /// Gauss-Newton on `r_j = |<u, h_j>|^2 - 1/6`.
    fn polish(&self, mut x: [f64; 5]) -> [f64; 5] {
        for _ in 0..POLISH_STEPS {
            let (z, u) = self.products(&x);
            let r = SVector::<f64, DIM>::from_fn(|j, _| z[j].norm_sqr() - 1.0 / 6.0);
            if r.amax() < 1e-16 {
                break;
            }
            let jac = SMatrix::<f64, DIM, 5>::from_fn(|j, k| 2.0 * (z[j].conj() * self.derivative(&u, j, k)).re);
            let Ok(dx) = jac.svd(true, true).solve(&r, 1e-12) else {
                break;
            };
            for k in 0..5 {
                x[k] -= dx[k];
            }
        }
        x
    }

    fn min_singular_value(&self, x: &[f64; 5]) -> f64 {
        let (z, u) = self.products(x);
        let jac = SMatrix::<f64, DIM, 5>::from_fn(|j, k| 2.0 * (z[j].conj() * self.derivative(&u, j, k)).re);
        jac.singular_values().min()
    }

    fn max_residual(&self, phases: &[f64; 5]) -> f64 {
        self.products(phases).0.iter().map(|z| (z.norm() - INV_SQRT6).abs()).fold(0.0, f64::max)
    }
}

/// `sum_j |<u, h_j>|` over the columns `h_j` of `F(a, b)`; at most `sqrt 6`.
pub fn objective(phases: &[f64; 5], params: FourierParams) -> f64 {
    Columns::new(&build_f(params)).objective(phases)
}

/// Analytic gradient of [`objective`] with respect to the five phases (turns).
pub fn objective_gradient(phases: &[f64; 5], params: FourierParams) -> [f64; 5] {
    Columns::new(&build_f(params)).objective_and_gradient(phases).1
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// One local search from a random start; `None` unless it reaches a vector
/// unbiased within `opt_tolerance`.
fn run_trial(cols: &Columns, settings: &SearchSettings, trial: usize) -> Option<PhaseVector> {
    let mut rng = trial_rng(settings.rng_seed, trial);
    let start: [f64; 5] = std::array::from_fn(|_| rng.gen::<f64>());
    let (x, fx) = cols.climb(start, settings.max_iterations);
    if SQRT6 - fx > BASIN_GAP {
        return None;
    }
    let x = cols.polish(x);
    (cols.max_residual(&x) < settings.opt_tolerance).then(|| PhaseVector::new(x))
}

/// Number of distinct roots near `roots[index]` after moving `(a, b)` a small
/// step in a few generic directions, maximized over the directions. Nearness
/// is decided by the closest member of `roots`.
fn split_count(params: FourierParams, roots: &[PhaseVector], index: usize, seed: u64) -> usize {
    let v = roots[index];
    let reach = 10.0 * SPLIT_STEP.sqrt();
    let directions = [(1.0, 0.37), (-1.0, -0.37), (0.37, -1.0), (-0.37, 1.0)];
    let mut best = 1;
    for (d, (da, db)) in directions.into_iter().enumerate() {
        let moved = FourierParams::new(params.a + SPLIT_STEP * da, params.b + SPLIT_STEP * db);
        let cols = Columns::new(&build_f(moved));
        let mut rng = trial_rng(seed ^ 0x5eed, index * directions.len() + d);
        let near: Vec<PhaseVector> = (0..SPLIT_STARTS)
            .filter_map(|_| {
                let start: [f64; 5] = std::array::from_fn(|k| v.phases()[k] + reach * (2.0 * rng.gen::<f64>() - 1.0));
                let x = cols.polish(start);
                let w = PhaseVector::new(x);
                let closest = roots
                    .iter()
                    .enumerate()
                    .min_by(|(_, p), (_, q)| p.distance(&w).total_cmp(&q.distance(&w)))
                    .map(|(i, _)| i);
                (cols.max_residual(&x) < 1e-12 && closest == Some(index)).then_some(w)
            })
            .collect();
        best = best.max(dedupe(near, 1e-7).len());
    }
    best
}

/// Sorts canonically and keeps the first member of each cluster of vectors
/// within `tol` of each other.
pub fn dedupe(mut found: Vec<PhaseVector>, tol: f64) -> Vec<PhaseVector> {
    found.sort_by(|a, b| a.canonical_cmp(b));
    let mut kept: Vec<PhaseVector> = Vec::new();
    for v in found {
        if !kept.iter().any(|k| k.approx_eq(&v, tol)) {
            kept.push(v);
        }
    }
    kept
}

/// Multistart search followed by [`assemble_bases`]. The result does not depend on the thread count: each
/// trial owns an RNG stream and the merge sorts before deduplicating.
pub fn find_unbiased_vectors(params: FourierParams, settings: &SearchSettings) -> Result<UnbiasedCatalog> {
    let f = build_f(params);
    let (vectors, converged) = find_unbiased_to(&f, settings)?;
    let cols = Columns::new(&f);
    let multiplicities = (0..vectors.len())
        .into_par_iter()
        .map(|i| {
            if cols.min_singular_value(vectors[i].phases()) < DEGENERACY_TOL {
                split_count(params, &vectors, i, settings.rng_seed)
            } else {
                1
            }
        })
        .collect();
    let mut catalog = UnbiasedCatalog::new(params, vectors);
    catalog.multiplicities = multiplicities;
    catalog.converged_trials = converged;
    Ok(assemble_bases(catalog))
}

/// The same search against the columns of an arbitrary Hadamard matrix `h`.
/// Returns the deduplicated vectors and the number of converged trials.
pub fn find_unbiased_to(h: &ComplexMatrix6, settings: &SearchSettings) -> Result<(Vec<PhaseVector>, usize)> {
    settings.validate()?;
    let cols = Columns::new(h);
    let found: Vec<PhaseVector> =
        (0..settings.trials).into_par_iter().filter_map(|t| run_trial(&cols, settings, t)).collect();
    let converged = found.len();
    Ok((dedupe(found, settings.dedupe_tolerance), converged))
}

/// Fills `bases` with every orthonormal 6-set of catalog vectors and
/// `extension_matrix` with the pairwise unbiasedness of those bases.
pub fn assemble_bases(mut catalog: UnbiasedCatalog) -> UnbiasedCatalog {
    let vs: Vec<Vector6> = catalog.vectors.iter().map(|v| v.to_vector()).collect();
    let g = Graph::from_fn(vs.len(), |i, j| inner_product(&vs[i], &vs[j]).norm() < NUMERIC_TOL);
    catalog.bases = g.cliques(DIM).into_iter().map(|c| std::array::from_fn(|i| c[i])).collect();
    let n = catalog.bases.len();
    let mats: Vec<ComplexMatrix6> = (0..n).map(|i| catalog.basis_matrix(i)).collect();
    catalog.extension_matrix = (0..n)
        .map(|i| (0..n).map(|j| i != j && mats[i].unbiasedness_residual(&mats[j]) < NUMERIC_TOL).collect())
        .collect();
    catalog
}

/// True iff two catalog bases are mutually unbiased, i.e. the catalog holds
/// a numerical quartet `(Id, F(a, b), C, D)`.
pub fn quartet_extension_scan(catalog: &UnbiasedCatalog) -> bool {
    catalog.extension_matrix.iter().any(|row| row.iter().any(|&b| b))
}
