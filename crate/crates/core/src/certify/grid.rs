//! Phase grids, dyadic refinement and parameter cells.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierParams;
use crate::phase::wrap_turns;

use super::bounds::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    /// Parameter grid for `a` and `b`.
    pub n: u32,
    /// Phase grid.
    pub nprime: u32,
    /// Refinements below the root box; the deepest level is `generations`.
    pub generations: u32,
}

impl GridSpec {
    pub const STANDARD: GridSpec = GridSpec { n: 180, nprime: 19, generations: 7 };

    /// Rejects grids where the improved bound is not applicable to the
    /// parameter-carrying columns, i.e. `5/N' + 4/N >= 1/pi`.
    pub fn new(n: u32, nprime: u32, generations: u32) -> Result<Self> {
        if n < 1 || nprime < 2 || generations < 1 {
            return Err(Error::Precondition(format!(
                "grid needs N >= 1, N' >= 2, generations >= 1 (got {n}, {nprime}, {generations})"
            )));
        }
        let g = Self { n, nprime, generations };
        let budget = g.budget();
        if budget >= 1.0 / PI {
            return Err(Error::InfeasibleGrid { budget });
        }
        Ok(g)
    }

    pub fn budget(&self) -> f64 {
        5.0 / self.nprime as f64 + 4.0 / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.n, self.nprime, self.generations).map(|_| ())
    }

    /// `N'^5`.
    pub fn grid_size(&self) -> usize {
        (self.nprime as usize).pow(5)
    }
}

/// The box `prod_k [j_k / R, (j_k + 1) / R]` with `R = N' 2^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridVector {
    pub indices: [u32; 5],
    pub level: u32,
}

impl GridVector {
    pub fn root(indices: [u32; 5]) -> Self {
        Self { indices, level: 0 }
    }

    pub fn resolution(&self, nprime: u32) -> u64 {
        (nprime as u64) << self.level
    }

    pub fn intervals(&self, nprime: u32) -> [Interval; 5] {
        let r = self.resolution(nprime) as f64;
        self.indices.map(|j| Interval::new((j as f64 + 0.5) / r, 1.0 / r))
    }

    pub fn midpoint(&self, nprime: u32) -> [f64; 5] {
        self.intervals(nprime).map(|i| i.mid)
    }

    /// The box at `level` containing the phases, taken mod 1.
    pub fn containing(phases: &[f64; 5], nprime: u32, level: u32) -> Self {
        let r = (nprime as u64) << level;
        let indices = phases.map(|p| ((wrap_turns(p) * r as f64).floor() as u64).min(r - 1) as u32);
        Self { indices, level }
    }

    /// Root-level (`level 0`) ancestor.
    pub fn root_ancestor(&self) -> Self {
        Self { indices: self.indices.map(|j| j >> self.level), level: 0 }
    }

    /// `j_1 N'^4 + ... + j_5` for a root box.
    pub fn linear_index(&self, nprime: u32) -> usize {
        debug_assert_eq!(self.level, 0);
        self.indices.iter().fold(0usize, |acc, &j| acc * nprime as usize + j as usize)
    }

    pub fn from_linear_index(mut index: usize, nprime: u32) -> Self {
        let mut indices = [0u32; 5];
        for k in (0..5).rev() {
            indices[k] = (index % nprime as usize) as u32;
            index /= nprime as usize;
        }
        Self::root(indices)
    }
}

/// The 32 half-size boxes of `v`, in lexicographic order of their indices.
pub fn daughters(v: &GridVector) -> [GridVector; 32] {
    std::array::from_fn(|e| GridVector {
        indices: std::array::from_fn(|k| 2 * v.indices[k] + ((e >> (4 - k)) & 1) as u32),
        level: v.level + 1,
    })
}

/// A cell of the `(a, b)` parameter grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellParams {
    pub a_index: u32,
    pub b_index: u32,
    pub n: u32,
}

impl CellParams {
    pub fn new(a_index: u32, b_index: u32, n: u32) -> Self {
        Self { a_index, b_index, n }
    }

    /// `((2 a_index + 1) / 2N, (2 b_index + 1) / 2N)`.
    pub fn midpoint(&self) -> FourierParams {
        let n2 = 2.0 * self.n as f64;
        FourierParams::new((2 * self.a_index + 1) as f64 / n2, (2 * self.b_index + 1) as f64 / n2)
    }

    /// The cell containing `(a, b)`.
    pub fn containing(params: FourierParams, n: u32) -> Self {
        let idx = |x: f64| ((wrap_turns(x) * n as f64).floor() as u32).min(n - 1);
        Self { a_index: idx(params.a), b_index: idx(params.b), n }
    }

    /// Whether the closed cell meets the closed triangle
    /// `(0, 0), (1/6, 0), (1/6, 1/12)`.
    pub fn meets_fundamental_domain(&self) -> bool {
        let (i, j, n) = (self.a_index as u64, self.b_index as u64, self.n as u64);
        6 * i <= n && 2 * j <= i + 1 && 12 * j <= n
    }
}

/// All cells meeting the closed fundamental triangle, in `(a, b)` order.
pub fn triangle_cells(n: u32) -> Vec<CellParams> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = CellParams::new(i, j, n);
            if c.meets_fundamental_domain() {
                out.push(c);
            }
        }
    }
    out
}
