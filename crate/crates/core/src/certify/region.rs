//! Certification of a set of parameter cells with per-cell checkpoints.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grid::{CellParams, GridSpec};
use super::ort::OrtTable;
use super::search::{certify_cell, CellReport, DtildeFilter};

#[derive(Clone, Debug, Default)]
pub struct RegionOptions {
    /// One JSON report per cell is written here; cells with a matching
    /// report already present are not recomputed.
    pub checkpoint_dir: Option<PathBuf>,
    pub filter: DtildeFilter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionManifest {
    pub grid: GridSpec,
    pub filter: DtildeFilter,
    pub ort_count: u64,
    pub cells: Vec<CellParams>,
    /// True iff no cell admits a third basis.
    pub certified: bool,
    pub uncertified_cells: Vec<CellParams>,
    /// Sum of the per-cell wall times, so a resumed run reports the same total.
    pub total_wall_time_secs: f64,
}

impl RegionManifest {
    pub fn from_reports(grid: GridSpec, filter: DtildeFilter, ort_count: u64, reports: &[CellReport]) -> Self {
        let uncertified_cells: Vec<CellParams> = reports.iter().filter(|r| r.dtilde_found).map(|r| r.cell).collect();
        Self {
            grid,
            filter,
            ort_count,
            cells: reports.iter().map(|r| r.cell).collect(),
            certified: uncertified_cells.is_empty(),
            uncertified_cells,
            total_wall_time_secs: reports.iter().map(|r| r.wall_time_secs).sum(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json_atomic(path, self)
    }
}

pub fn checkpoint_path(dir: &Path, cell: &CellParams) -> PathBuf {
    dir.join(format!("cell_n{}_a{}_b{}.json", cell.n, cell.a_index, cell.b_index))
}

fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(value)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// A usable checkpoint for this cell, grid and filter; unreadable or
/// mismatched files are recomputed.
fn load_checkpoint(path: &Path, cell: &CellParams, grid: &GridSpec, filter: DtildeFilter) -> Option<CellReport> {
    let report: CellReport = serde_json::from_slice(&std::fs::read(path).ok()?).ok()?;
    (report.cell == *cell && report.grid == *grid && report.filter == filter).then_some(report)
}

/// Reports in the order of `cells`, independent of scheduling.
pub fn certify_region(cells: &[CellParams], grid: &GridSpec, table: &OrtTable, opts: &RegionOptions) -> Result<Vec<CellReport>> {
    grid.validate()?;
    if let Some(c) = cells.iter().find(|c| c.n != grid.n || !c.meets_fundamental_domain()) {
        return Err(Error::Precondition(format!("cell {c:?} is not a triangle cell of the N = {} grid", grid.n)));
    }
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }
    cells
        .par_iter()
        .map(|cell| {
            let path = opts.checkpoint_dir.as_ref().map(|d| checkpoint_path(d, cell));
            if let Some(r) = path.as_ref().and_then(|p| load_checkpoint(p, cell, grid, opts.filter)) {
                return Ok(r);
            }
            let report = certify_cell(cell, grid, table, opts.filter)?;
            if let Some(p) = &path {
                write_json_atomic(p, &report)?;
            }
            Ok(report)
        })
        .collect()
}

/// The `rows x cols` block of triangle cells starting at `(a_index, b_index)`.
pub fn cell_block(a_index: u32, b_index: u32, rows: u32, cols: u32, n: u32) -> Vec<CellParams> {
    let mut out = Vec::new();
    for i in a_index..a_index + rows {
        for j in b_index..b_index + cols {
            out.push(CellParams::new(i, j, n));
        }
    }
    out
}
