//! Per-cell search: boxes quasi-unbiased to `F(a, b)` on the cell, box
//! candidates for a second basis `C`, and elimination of a third basis `D`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clique::Graph;
use crate::error::{Error, Result};
use crate::fourier::{entry_phase, EntryParam, ENTRY_PHASES};

use super::bounds::{BoundKind, Interval, Target};
use super::grid::{CellParams, GridSpec, GridVector};
use super::multiscale::{ColumnGroup, MultiscaleEngine, PreparedColumn};
use super::ort::OrtTable;

/// Counterexample candidates stored per cell beyond this are only counted.
pub const MAX_STORED_CANDIDATES: usize = 16;

/// Column `j` of `F` on the cell: parameter-carrying entries get the
/// cell width `1/N`, the others are exact.
pub fn f_column_intervals(cell: &CellParams, j: usize) -> [Interval; 5] {
    let mid = cell.midpoint();
    let width = 1.0 / cell.n as f64;
    std::array::from_fn(|k| {
        let phase = entry_phase(k + 1, j, mid);
        match ENTRY_PHASES[k + 1][j].1 {
            EntryParam::None => Interval::point(phase),
            _ => Interval::new(phase, width),
        }
    })
}

fn check_grid(grid: &GridSpec, cell: &CellParams) -> Result<()> {
    grid.validate()?;
    if cell.n != grid.n {
        return Err(Error::Precondition(format!("cell uses N = {} but grid has N = {}", cell.n, grid.n)));
    }
    Ok(())
}

fn check_table(grid: &GridSpec, table: &OrtTable) -> Result<()> {
    if table.nprime != grid.nprime {
        return Err(Error::TableMismatch { table: table.nprime, requested: grid.nprime });
    }
    if table.generations != grid.generations {
        return Err(Error::Precondition(format!(
            "table built with {} generations, grid uses {}",
            table.generations, grid.generations
        )));
    }
    Ok(())
}

/// Root boxes surviving the multiscale improved unbiasedness test against
/// all six columns of `F` on the cell, in lexicographic order.
pub fn compute_fub(cell: &CellParams, grid: &GridSpec) -> Result<Vec<GridVector>> {
    check_grid(grid, cell)?;
    let engine = MultiscaleEngine::new(grid.nprime, grid.generations);
    let cols: Vec<PreparedColumn> = (0..6).map(|j| PreparedColumn::new(&f_column_intervals(cell, j))).collect();
    let n = grid.nprime as usize;
    let chunk = n.pow(3);
    let found: Vec<Vec<GridVector>> = (0..n * n)
        .into_par_iter()
        .map(|c| {
            (c * chunk..(c + 1) * chunk)
                .map(|i| GridVector::from_linear_index(i, grid.nprime))
                .filter(|v| engine.survives(v, &cols, BoundKind::Improved, Target::Unbiased))
                .collect()
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// The N'-orthogonality graph on `fub`.
pub fn orthogonality_graph(fub: &[GridVector], table: &OrtTable) -> Graph {
    Graph::from_fn(fub.len(), |i, j| table.orthogonal_indices(&fub[i].indices, &fub[j].indices))
}

/// Visits every 6-clique of `fub`, as ascending index tuples, in
/// lexicographic order. Returns whether the enumeration ran to completion.
pub fn for_each_ctilde(fub: &[GridVector], table: &OrtTable, mut visit: impl FnMut(&[usize; 6]) -> bool) -> bool {
    let g = orthogonality_graph(fub, table);
    g.for_each_clique(6, |c| visit(&[c[0], c[1], c[2], c[3], c[4], c[5]]))
}

pub fn enumerate_ctilde(fub: &[GridVector], table: &OrtTable) -> Vec<[GridVector; 6]> {
    let mut out = Vec::new();
    for_each_ctilde(fub, table, |c| {
        out.push(c.map(|i| fub[i]));
        true
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DtildeOutcome {
    pub found: bool,
    pub col_d_size: usize,
}

/// Which chain test admits a box as a column of the third basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtildeFilter {
    /// Trivial bound against the six second-basis boxes only.
    CtildeOnly,
    /// The same, with the improved test against `F` on the cell required on
    /// the same chain of boxes. An exact column passes both at every level
    /// of the chain containing its phases, so this is still necessary.
    #[default]
    JointWithF,
}

/// Elimination of the third basis for a fixed box candidate of the second.
///
/// Survival against all six columns implies survival against each column
/// alone, so the single-column results are computed once per cell and used
/// to discard candidates before the full test.
pub struct DtildeSearcher<'a> {
    fub: &'a [GridVector],
    graph: Graph,
    engine: MultiscaleEngine,
    filter: DtildeFilter,
    f_columns: Vec<PreparedColumn>,
    columns: Vec<PreparedColumn>,
    pair_survives: Vec<Vec<bool>>,
}

impl<'a> DtildeSearcher<'a> {
    pub fn new(fub: &'a [GridVector], table: &OrtTable, cell: &CellParams, grid: &GridSpec, filter: DtildeFilter) -> Self {
        let engine = MultiscaleEngine::new(grid.nprime, grid.generations);
        let f_columns = match filter {
            DtildeFilter::CtildeOnly => Vec::new(),
            DtildeFilter::JointWithF => (0..6).map(|j| PreparedColumn::new(&f_column_intervals(cell, j))).collect(),
        };
        let columns: Vec<PreparedColumn> = fub.iter().map(|c| PreparedColumn::new(&c.intervals(grid.nprime))).collect();
        let mut searcher = Self {
            fub,
            graph: orthogonality_graph(fub, table),
            engine,
            filter,
            f_columns,
            columns,
            pair_survives: Vec::new(),
        };
        searcher.pair_survives = (0..fub.len())
            .into_par_iter()
            .map(|u| (0..fub.len()).map(|c| searcher.survives(u, std::slice::from_ref(&searcher.columns[c]))).collect())
            .collect();
        searcher
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn filter(&self) -> DtildeFilter {
        self.filter
    }

    fn survives(&self, u: usize, cols: &[PreparedColumn]) -> bool {
        let c = ColumnGroup { columns: cols, bound: BoundKind::Trivial, target: Target::Unbiased };
        let f = ColumnGroup { columns: &self.f_columns, bound: BoundKind::Improved, target: Target::Unbiased };
        self.engine.survives_groups(&self.fub[u], &[f, c])
    }

    /// Indices of `fub` members admitted as columns of the third basis.
    pub fn col_dtilde(&self, ctilde: &[usize; 6]) -> Vec<usize> {
        let cols = ctilde.map(|c| self.columns[c]);
        (0..self.fub.len())
            .filter(|&u| ctilde.iter().all(|&c| self.pair_survives[u][c]))
            .filter(|&u| self.survives(u, &cols))
            .collect()
    }

    /// A 6-clique of the column set, if one exists.
    pub fn dtilde(&self, ctilde: &[usize; 6]) -> (Vec<usize>, Option<[usize; 6]>) {
        let col = self.col_dtilde(ctilde);
        if col.len() < 6 {
            return (col, None);
        }
        let sub = Graph::from_fn(col.len(), |i, j| self.graph.adjacent(col[i], col[j]));
        let clique = sub.first_clique(6).map(|c| std::array::from_fn(|k| col[c[k]]));
        (col, clique)
    }

    pub fn search(&self, ctilde: &[usize; 6]) -> DtildeOutcome {
        let (col, clique) = self.dtilde(ctilde);
        DtildeOutcome { found: clique.is_some(), col_d_size: col.len() }
    }
}

/// One-shot form of [`DtildeSearcher::search`] for boxes given directly;
/// the column set is drawn from `fub`.
pub fn search_dtilde(
    ctilde: &[GridVector; 6],
    fub: &[GridVector],
    table: &OrtTable,
    cell: &CellParams,
    grid: &GridSpec,
    filter: DtildeFilter,
) -> Result<DtildeOutcome> {
    check_grid(grid, cell)?;
    check_table(grid, table)?;
    let mut all: Vec<GridVector> = fub.to_vec();
    all.extend_from_slice(ctilde);
    all.sort();
    all.dedup();
    let idx = ctilde.map(|c| all.binary_search(&c).expect("ctilde boxes were inserted"));
    let searcher = DtildeSearcher::new(&all, table, cell, grid, filter);
    let col: Vec<usize> = searcher.col_dtilde(&idx).into_iter().filter(|&u| fub.contains(&all[u])).collect();
    if col.len() < 6 {
        return Ok(DtildeOutcome { found: false, col_d_size: col.len() });
    }
    let sub = Graph::from_fn(col.len(), |i, j| searcher.graph.adjacent(col[i], col[j]));
    Ok(DtildeOutcome { found: sub.first_clique(6).is_some(), col_d_size: col.len() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleCandidate {
    pub ctilde: [GridVector; 6],
    pub dtilde: [GridVector; 6],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: CellParams,
    pub grid: GridSpec,
    pub filter: DtildeFilter,
    pub fub_size: usize,
    pub fub: Vec<GridVector>,
    pub ctilde_count: u64,
    pub dtilde_found: bool,
    /// Number of `(C, D)` box pairs passing every test.
    pub candidate_count: u64,
    /// The first [`MAX_STORED_CANDIDATES`] of them.
    pub counterexample_candidates: Vec<CounterexampleCandidate>,
    /// Largest column set seen for the third basis.
    pub max_col_d_size: usize,
    pub wall_time_secs: f64,
}

impl CellReport {
    /// Equality of everything except wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        Self { wall_time_secs: 0.0, ..self.clone() } == Self { wall_time_secs: 0.0, ..other.clone() }
    }
}

pub fn certify_cell(cell: &CellParams, grid: &GridSpec, table: &OrtTable, filter: DtildeFilter) -> Result<CellReport> {
    let start = Instant::now();
    check_grid(grid, cell)?;
    check_table(grid, table)?;
    let fub = compute_fub(cell, grid)?;
    let searcher = DtildeSearcher::new(&fub, table, cell, grid, filter);

    // cliques are streamed in blocks so the third-basis searches run in
    // parallel without holding every clique in memory
    const BLOCK: usize = 4096;
    let mut ctilde_count = 0u64;
    let mut candidate_count = 0u64;
    let mut candidates = Vec::new();
    let mut max_col_d_size = 0;
    let mut block: Vec<[usize; 6]> = Vec::with_capacity(BLOCK);
    let mut flush = |block: &mut Vec<[usize; 6]>| {
        let results: Vec<(Vec<usize>, Option<[usize; 6]>)> = block.par_iter().map(|c| searcher.dtilde(c)).collect();
        for (c, (col, clique)) in block.iter().zip(results) {
            max_col_d_size = max_col_d_size.max(col.len());
            if let Some(d) = clique {
                candidate_count += 1;
                if candidates.len() < MAX_STORED_CANDIDATES {
                    candidates.push(CounterexampleCandidate { ctilde: c.map(|i| fub[i]), dtilde: d.map(|i| fub[i]) });
                }
            }
        }
        block.clear();
    };
    searcher.graph().for_each_clique(6, |c| {
        ctilde_count += 1;
        block.push([c[0], c[1], c[2], c[3], c[4], c[5]]);
        if block.len() == BLOCK {
            flush(&mut block);
        }
        true
    });
    flush(&mut block);

    Ok(CellReport {
        cell: *cell,
        grid: *grid,
        filter,
        fub_size: fub.len(),
        fub,
        ctilde_count,
        dtilde_found: candidate_count > 0,
        candidate_count,
        counterexample_candidates: candidates,
        max_col_d_size,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_columns_carry_parameter_width() {
        let cell = CellParams::new(3, 1, 180);
        for j in [0, 2, 4] {
            assert!(f_column_intervals(&cell, j).iter().all(|i| i.len == 0.0));
        }
        for j in [1, 3, 5] {
            let c = f_column_intervals(&cell, j);
            assert_eq!(c.iter().filter(|i| i.len > 0.0).count(), 4);
            assert_eq!(c[2].len, 0.0);
        }
    }

    #[test]
    fn grid_mismatches_rejected() {
        let grid = GridSpec::new(90, 19, 2).unwrap();
        assert!(compute_fub(&CellParams::new(0, 0, 180), &grid).is_err());
        let table = OrtTable::from_base(&super::super::ort::Bitset::new(7usize.pow(5)), 7, 2);
        assert!(matches!(
            certify_cell(&CellParams::new(0, 0, 90), &grid, &table, DtildeFilter::default()),
            Err(Error::TableMismatch { table: 7, requested: 19 })
        ));
    }
}
