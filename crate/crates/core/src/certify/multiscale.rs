//! Depth-first multiscale survival of phase boxes.
//!
//! A box survives at its level iff the bound passes against every opposing
//! column and, above the deepest level, some daughter survives.
//!
//! Box endpoints and midpoints are integer multiples of `1 / Q` with
//! `Q = N' 2^(G + 1)`, so `e^{2 i pi x}` for the `u` side is a table lookup.

use std::f64::consts::{FRAC_1_PI, TAU};

use crate::linalg::Complex;

use super::bounds::{corner_radius, passes, trivial_radius, BoundKind, Interval, Target};
use super::grid::{daughters, GridVector};

/// An opposing vector, as the conjugated unit terms of its interval
/// midpoints and endpoints.
#[derive(Clone, Copy, Debug)]
pub struct PreparedColumn {
    mid: [Complex; 5],
    lo: [Complex; 5],
    hi: [Complex; 5],
    total_len: f64,
}

impl PreparedColumn {
    pub fn new(intervals: &[Interval; 5]) -> Self {
        let c = |x: f64| Complex::from_polar(1.0, -TAU * x);
        let mut total_len = 0.0;
        for iv in intervals {
            total_len += iv.len;
        }
        Self {
            mid: intervals.map(|i| c(i.mid)),
            lo: intervals.map(|i| c(i.lo())),
            hi: intervals.map(|i| c(i.hi())),
            total_len,
        }
    }

    pub fn total_len(&self) -> f64 {
        self.total_len
    }
}

/// Columns tested with a common bound and target.
#[derive(Clone, Copy, Debug)]
pub struct ColumnGroup<'a> {
    pub columns: &'a [PreparedColumn],
    pub bound: BoundKind,
    pub target: Target,
}

struct BoxTerms {
    mid: [Complex; 5],
    lo: [Complex; 5],
    hi: [Complex; 5],
    total_len: f64,
}

#[derive(Clone, Debug)]
pub struct MultiscaleEngine {
    nprime: u32,
    max_level: u32,
    q: u64,
    table: Vec<Complex>,
}

impl MultiscaleEngine {
    pub fn new(nprime: u32, max_level: u32) -> Self {
        let q = (nprime as u64) << (max_level + 1);
        let table = (0..q).map(|i| Complex::from_polar(1.0, TAU * i as f64 / q as f64)).collect();
        Self { nprime, max_level, q, table }
    }

    pub fn nprime(&self) -> u32 {
        self.nprime
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    #[inline]
    fn cis(&self, i: u64) -> Complex {
        self.table[(i % self.q) as usize]
    }

    fn terms(&self, v: &GridVector) -> BoxTerms {
        debug_assert!(v.level <= self.max_level);
        let edge = self.max_level + 1 - v.level;
        let half = edge - 1;
        let mut total_len = 0.0;
        let len = 1.0 / v.resolution(self.nprime) as f64;
        for _ in 0..5 {
            total_len += len;
        }
        BoxTerms {
            mid: v.indices.map(|j| self.cis((2 * j as u64 + 1) << half)),
            lo: v.indices.map(|j| self.cis((j as u64) << edge)),
            hi: v.indices.map(|j| self.cis((j as u64 + 1) << edge)),
            total_len,
        }
    }

    #[inline]
    fn passes_column(&self, t: &BoxTerms, c: &PreparedColumn, bound: BoundKind, target: Target) -> bool {
        let mid: [Complex; 5] = std::array::from_fn(|k| t.mid[k] * c.mid[k]);
        let s = (Complex::new(1.0, 0.0) + mid[0] + mid[1] + mid[2] + mid[3] + mid[4]) / 6.0;
        let d = target.distance(s);
        let trivial = trivial_radius(t.total_len + c.total_len);
        // the improved radius never exceeds the trivial one
        if !passes(d, trivial) {
            return false;
        }
        match bound {
            BoundKind::Trivial => true,
            // outside the improved bound's hypothesis only the trivial one is sound
            BoundKind::Improved if t.total_len + c.total_len >= FRAC_1_PI => true,
            BoundKind::Improved => {
                let plus: [Complex; 5] = std::array::from_fn(|k| t.hi[k] * c.lo[k]);
                let minus: [Complex; 5] = std::array::from_fn(|k| t.lo[k] * c.hi[k]);
                passes(d, corner_radius(&mid, &plus, &minus))
            }
        }
    }

    /// The bound at `v` alone, against every column.
    pub fn passes(&self, v: &GridVector, cols: &[PreparedColumn], bound: BoundKind, target: Target) -> bool {
        self.passes_groups(v, &[ColumnGroup { columns: cols, bound, target }])
    }

    pub fn survives(&self, v: &GridVector, cols: &[PreparedColumn], bound: BoundKind, target: Target) -> bool {
        self.survives_groups(v, &[ColumnGroup { columns: cols, bound, target }])
    }

    pub fn passes_groups(&self, v: &GridVector, groups: &[ColumnGroup<'_>]) -> bool {
        let t = self.terms(v);
        groups.iter().all(|g| g.columns.iter().all(|c| self.passes_column(&t, c, g.bound, g.target)))
    }

    /// Survival with every group tested on the same chain of boxes.
    pub fn survives_groups(&self, v: &GridVector, groups: &[ColumnGroup<'_>]) -> bool {
        if !self.passes_groups(v, groups) {
            return false;
        }
        v.level >= self.max_level || daughters(v).iter().any(|d| self.survives_groups(d, groups))
    }

    /// Whether the bound passes at every level for the chain of boxes
    /// containing `phases`.
    pub fn chain_passes(&self, phases: &[f64; 5], cols: &[PreparedColumn], bound: BoundKind, target: Target) -> Vec<bool> {
        (0..=self.max_level)
            .map(|level| self.passes(&GridVector::containing(phases, self.nprime, level), cols, bound, target))
            .collect()
    }
}

/// Multiscale survival of `v` against `columns` down to level `generations`.
pub fn survives_multiscale(
    v: &GridVector,
    nprime: u32,
    columns: &[[Interval; 5]],
    target: Target,
    bound: BoundKind,
    generations: u32,
) -> bool {
    let engine = MultiscaleEngine::new(nprime, generations);
    let cols: Vec<PreparedColumn> = columns.iter().map(PreparedColumn::new).collect();
    engine.survives(v, &cols, bound, target)
}
