//! The Haagerup invariant `{ h_ij h_kl conj(h_il) conj(h_kj) }` of a Hadamard
//! matrix, kept as a multiset. It does not change under Hadamard equivalence
//! (swapping `i` and `k` conjugates a value, so the set is closed under
//! conjugation as well).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::linalg::{Complex, ComplexMatrix6, DIM};

/// Values within this distance are merged into one class.
pub const MERGE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HaagerupSet {
    /// Distinct values with multiplicities, sorted by argument in `[0, 2pi)`
    /// and then by modulus.
    pub classes: Vec<(Complex, usize)>,
}

impl HaagerupSet {
    /// Number of quadruples counted, always `6^4`.
    pub fn multiset_size(&self) -> usize {
        self.classes.iter().map(|(_, m)| m).sum()
    }

    pub fn distinct(&self) -> usize {
        self.classes.len()
    }

    /// Multiset equality: same values (within `tol`) with equal multiplicities.
    pub fn same_multiset(&self, other: &Self, tol: f64) -> bool {
        self.classes.len() == other.classes.len()
            && self.classes.iter().all(|(z, m)| {
                other.classes.iter().any(|(w, n)| m == n && (z - w).norm() <= tol)
            })
    }

    /// Set equality, ignoring multiplicities.
    pub fn same_set(&self, other: &Self, tol: f64) -> bool {
        let covers = |a: &Self, b: &Self| {
            a.classes.iter().all(|(z, _)| b.classes.iter().any(|(w, _)| (z - w).norm() <= tol))
        };
        covers(self, other) && covers(other, self)
    }
}

fn canonical_angle(z: Complex) -> f64 {
    let a = z.im.atan2(z.re).rem_euclid(TAU);
    if TAU - a < 1e-12 {
        0.0
    } else {
        a
    }
}

pub fn haagerup_invariant(m: &ComplexMatrix6) -> HaagerupSet {
    let mut classes: Vec<(Complex, usize)> = Vec::new();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let v = m[(i, j)] * m[(k, l)] * m[(i, l)].conj() * m[(k, j)].conj();
                    match classes.iter_mut().find(|(z, _)| (*z - v).norm() <= MERGE_TOL) {
                        Some((_, count)) => *count += 1,
                        None => classes.push((v, 1)),
                    }
                }
            }
        }
    }
    classes.sort_by(|(a, _), (b, _)| {
        canonical_angle(*a)
            .total_cmp(&canonical_angle(*b))
            .then(a.norm().total_cmp(&b.norm()))
    });
    HaagerupSet { classes }
}
