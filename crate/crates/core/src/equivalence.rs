//! Hadamard equivalence: `D1 P1 H^(*) P2 D2` with unitary diagonals,
//! permutations and an optional entrywise conjugation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix6, DIM};

const UNIMODULAR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceOp {
    pub left_diag: [Complex; DIM],
    /// Row `i` of the result is row `left_perm[i]` of the input.
    pub left_perm: [usize; DIM],
    pub right_diag: [Complex; DIM],
    /// Column `j` of the result is column `right_perm[j]` of the input.
    pub right_perm: [usize; DIM],
    pub conjugate: bool,
}

impl Default for EquivalenceOp {
    fn default() -> Self {
        Self::identity()
    }
}

fn check_perm(p: &[usize; DIM]) -> Result<()> {
    let mut seen = [false; DIM];
    for &i in p {
        if i >= DIM || seen[i] {
            return Err(Error::NotPermutation(format!("{p:?}")));
        }
        seen[i] = true;
    }
    Ok(())
}

fn check_diag(d: &[Complex; DIM]) -> Result<()> {
    for (index, z) in d.iter().enumerate() {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > UNIMODULAR_TOL || !modulus.is_finite() {
            return Err(Error::NotUnimodular { index, modulus });
        }
    }
    Ok(())
}

impl EquivalenceOp {
    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        Self {
            left_diag: [one; DIM],
            left_perm: std::array::from_fn(|i| i),
            right_diag: [one; DIM],
            right_perm: std::array::from_fn(|i| i),
            conjugate: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_diag(&self.left_diag)?;
        check_diag(&self.right_diag)?;
        check_perm(&self.left_perm)?;
        check_perm(&self.right_perm)
    }

    /// The op that swaps columns `a` and `b`.
    pub fn swap_columns(a: usize, b: usize) -> Self {
        let mut op = Self::identity();
        op.right_perm.swap(a, b);
        op
    }
}

/// Conjugation is applied first, then the permutations, then the diagonals.
pub fn apply_equivalence(m: &ComplexMatrix6, op: &EquivalenceOp) -> Result<ComplexMatrix6> {
    op.validate()?;
    let base = if op.conjugate { m.conj() } else { *m };
    Ok(ComplexMatrix6::from_fn(|i, j| {
        op.left_diag[i] * base[(op.left_perm[i], op.right_perm[j])] * op.right_diag[j]
    }))
}

/// Scales rows and columns so the first row and first column are all
/// `m[0][0]`-modulus reals, returning the dephased matrix and the op used.
pub fn dephase(m: &ComplexMatrix6) -> Result<(ComplexMatrix6, EquivalenceOp)> {
    let unit = |z: Complex| {
        let r = z.norm();
        if r == 0.0 {
            Err(Error::Precondition("cannot dephase a matrix with a zero entry".into()))
        } else {
            Ok(z.conj() / r)
        }
    };
    let mut op = EquivalenceOp::identity();
    for i in 0..DIM {
        op.left_diag[i] = unit(m[(i, 0)])?;
    }
    for j in 0..DIM {
        op.right_diag[j] = unit(op.left_diag[0] * m[(0, j)])?;
    }
    Ok((apply_equivalence(m, &op)?, op))
}
