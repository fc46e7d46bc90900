//! Dense 6x6 complex linear algebra and the MUB predicates built on it.
//!
//! Inner products are linear in the first argument and conjugate-linear in
//! the second: `<u, v> = sum_i u_i * conj(v_i)`.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;
pub type Vector6 = [Complex; 6];

pub const DIM: usize = 6;

/// `1/sqrt(6)`, the modulus of every entry of a 6x6 complex Hadamard matrix.
pub const INV_SQRT6: f64 = 0.408_248_290_463_863_016_4;

/// Tolerance used for identities that hold exactly in real arithmetic.
pub const ANALYTIC_TOL: f64 = 1e-10;
/// Tolerance used for objects produced by numerical search.
pub const NUMERIC_TOL: f64 = 1e-6;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// `e^{2 i pi turns}`.
#[inline]
pub fn cis_turns(turns: f64) -> Complex {
    let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
    Complex::new(c, s)
}

/// `e^{2 i pi / 3}`.
pub fn omega() -> Complex {
    cis_turns(1.0 / 3.0)
}

pub fn inner_product(u: &Vector6, v: &Vector6) -> Complex {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(u: &Vector6) -> f64 {
    inner_product(u, u).re.sqrt()
}

pub fn basis_vector(k: usize) -> Vector6 {
    let mut e = [ZERO; DIM];
    e[k] = ONE;
    e
}

fn check_unit(u: &Vector6, tol: f64) -> Result<()> {
    let n = norm(u);
    if (n - 1.0).abs() > tol {
        return Err(Error::NotUnitNorm { norm: n });
    }
    Ok(())
}

/// `| |<u, v>| - 1/sqrt(6) |`.
pub fn unbiasedness_residual(u: &Vector6, v: &Vector6) -> f64 {
    (inner_product(u, v).norm() - INV_SQRT6).abs()
}

/// True iff `| |<u,v>| - 1/sqrt(6) | <= tol`. Both inputs must be unit norm.
pub fn is_unbiased(u: &Vector6, v: &Vector6, tol: f64) -> Result<bool> {
    check_unit(u, tol)?;
    check_unit(v, tol)?;
    Ok(unbiasedness_residual(u, v) <= tol)
}

/// Max deviation of the Gram matrix of `columns` from the identity.
pub fn gram_residual(columns: &[Vector6]) -> f64 {
    let mut worst = 0.0f64;
    for (i, u) in columns.iter().enumerate() {
        for (j, v) in columns.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((inner_product(u, v) - target).norm());
        }
    }
    worst
}

pub fn is_orthonormal_basis(columns: &[Vector6], tol: f64) -> bool {
    columns.len() == DIM && gram_residual(columns) <= tol
}

/// Dense 6x6 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix6 {
    entries: [[Complex; DIM]; DIM],
}

impl Default for ComplexMatrix6 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl ComplexMatrix6 {
    pub fn zeros() -> Self {
        Self { entries: [[ZERO; DIM]; DIM] }
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_rows(entries: [[Complex; DIM]; DIM]) -> Self {
        Self { entries }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                m.entries[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_columns(columns: &[Vector6; DIM]) -> Self {
        Self::from_fn(|i, j| columns[j][i])
    }

    pub fn rows(&self) -> &[[Complex; DIM]; DIM] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vector6 {
        self.entries[i]
    }

    pub fn column(&self, j: usize) -> Vector6 {
        std::array::from_fn(|i| self.entries[i][j])
    }

    pub fn columns(&self) -> [Vector6; DIM] {
        std::array::from_fn(|j| self.column(j))
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::from_fn(|i, j| self.entries[i][j] * s)
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.entries[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i].conj())
    }

    pub fn mul_vec(&self, v: &Vector6) -> Vector6 {
        std::array::from_fn(|i| (0..DIM).map(|k| self.entries[i][k] * v[k]).sum())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc * *self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in 0..DIM {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |M* M - I|` entrywise.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// `max | |m_ij| - 1/sqrt(6) |`.
    pub fn flatness_residual(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| (z.norm() - INV_SQRT6).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite() && self.unitarity_residual() <= tol
    }

    /// Unitary with every entry of modulus `1/sqrt(6)`.
    pub fn is_complex_hadamard(&self, tol: f64) -> bool {
        self.is_unitary(tol) && self.flatness_residual() <= tol
    }

    /// Largest `| |<a_i, b_j>| - 1/sqrt(6) |` over column pairs: zero iff the
    /// column bases of `self` and `other` are mutually unbiased.
    pub fn unbiasedness_residual(&self, other: &Self) -> f64 {
        let (a, b) = (self.columns(), other.columns());
        let mut worst = 0.0f64;
        for u in &a {
            for v in &b {
                worst = worst.max(unbiasedness_residual(u, v));
            }
        }
        worst
    }

    /// Nested `[re, im]` pairs, the JSON form used for result documents.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }

    /// Finds `p` with `self.column(p[j]) ~ other.column(j)` within `tol`.
    pub fn find_column_permutation(&self, other: &Self, tol: f64) -> Option<[usize; DIM]> {
        let mine = self.columns();
        let theirs = other.columns();
        let mut perm = [usize::MAX; DIM];
        let mut used = [false; DIM];
        fn close(u: &Vector6, v: &Vector6, tol: f64) -> bool {
            u.iter().zip(v).all(|(a, b)| (a - b).norm() <= tol)
        }
        fn assign(
            j: usize,
            mine: &[Vector6; DIM],
            theirs: &[Vector6; DIM],
            perm: &mut [usize; DIM],
            used: &mut [bool; DIM],
            tol: f64,
        ) -> bool {
            if j == DIM {
                return true;
            }
            for i in 0..DIM {
                if !used[i] && close(&mine[i], &theirs[j], tol) {
                    used[i] = true;
                    perm[j] = i;
                    if assign(j + 1, mine, theirs, perm, used, tol) {
                        return true;
                    }
                    used[i] = false;
                }
            }
            false
        }
        assign(0, &mine, &theirs, &mut perm, &mut used, tol).then_some(perm)
    }
}

impl Index<(usize, usize)> for ComplexMatrix6 {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.entries[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix6 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.entries[i][j]
    }
}

impl Mul for ComplexMatrix6 {
    type Output = ComplexMatrix6;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..DIM).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum())
    }
}

/// The 6x6 DFT matrix `(1/sqrt 6)[e^{2 i pi jk/6}]`.
pub fn dft6() -> ComplexMatrix6 {
    ComplexMatrix6::from_fn(|j, k| cis_turns((j * k) as f64 / 6.0) * INV_SQRT6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inv_sqrt6_constant() {
        assert!((INV_SQRT6 - 1.0 / 6f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn standard_basis_products() {
        let (e1, e2) = (basis_vector(0), basis_vector(1));
        assert_eq!(inner_product(&e1, &e1), ONE);
        assert_eq!(inner_product(&e1, &e2), ZERO);
    }

    #[test]
    fn inner_product_is_sesquilinear() {
        let u: Vector6 = std::array::from_fn(|i| Complex::new(i as f64, 1.0 - i as f64));
        let v: Vector6 = std::array::from_fn(|i| Complex::new(0.5 * i as f64, 2.0));
        let s = Complex::new(0.3, -1.7);
        let su: Vector6 = std::array::from_fn(|i| s * u[i]);
        let sv: Vector6 = std::array::from_fn(|i| s * v[i]);
        assert!((inner_product(&su, &v) - s * inner_product(&u, &v)).norm() < 1e-12);
        assert!((inner_product(&u, &sv) - s.conj() * inner_product(&u, &v)).norm() < 1e-12);
    }

    #[test]
    fn dft_column_has_unit_norm() {
        let f0 = dft6().column(0);
        // six terms of modulus 1/6 each
        assert!((inner_product(&f0, &f0) - ONE).norm() < 1e-15);
    }

    #[test]
    fn unbiasedness_predicate() {
        let f = dft6();
        let e1 = basis_vector(0);
        assert!(is_unbiased(&e1, &f.column(3), 1e-12).unwrap());
        assert!(!is_unbiased(&e1, &basis_vector(1), 1e-12).unwrap());
        let long: Vector6 = std::array::from_fn(|_| ONE);
        assert!(matches!(is_unbiased(&e1, &long, 1e-6), Err(Error::NotUnitNorm { .. })));
    }

    #[test]
    fn hadamard_predicate() {
        assert!(dft6().is_complex_hadamard(1e-12));
        assert!(!ComplexMatrix6::identity().is_complex_hadamard(1e-6));
    }

    #[test]
    fn orthonormal_basis_predicate() {
        assert!(is_orthonormal_basis(&dft6().columns(), 1e-12));
        let copies = [basis_vector(0); 6];
        assert!(!is_orthonormal_basis(&copies, 1e-6));
        assert!(!is_orthonormal_basis(&dft6().columns()[..5], 1e-6));
    }

    #[test]
    fn column_permutation_search() {
        let f = dft6();
        let order = [3, 0, 5, 1, 4, 2];
        let shuffled = ComplexMatrix6::from_fn(|i, j| f[(i, order[j])]);
        assert_eq!(f.find_column_permutation(&shuffled, 1e-12), Some(order));
        assert_eq!(f.find_column_permutation(&ComplexMatrix6::identity(), 1e-6), None);
    }
}
