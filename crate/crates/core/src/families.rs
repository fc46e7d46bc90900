//! Non-degeneracy of common unbiased vectors, their continuation along
//! `(a, b)`, and the orthogonal families generated by clock and shift.

use std::f64::consts::TAU;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{build_f, FourierParams};
use crate::linalg::{cis_turns, Complex, inner_product, unbiasedness_residual, ComplexMatrix6, Vector6, DIM, INV_SQRT6, NUMERIC_TOL};
use crate::phase::PhaseVector;

/// Singular values of `N` at or below this count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Halvings of a continuation step before giving up.
pub const MAX_BISECTIONS: u32 = 20;

const NEWTON_ITERATIONS: usize = 40;
/// Newton steps longer than this (in turns, max norm) are treated as a jump
/// to another root and rejected.
const MAX_NEWTON_STEP: f64 = 0.05;

type Real6 = SMatrix<f64, 6, 6>;
type Real5 = SMatrix<f64, 5, 5>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyMatrices {
    /// `M_kl = <b, e_k> <e_k, f_l> <f_l, b>`.
    pub m: ComplexMatrix6,
    /// `Im M`.
    pub n: [[f64; 6]; 6],
    pub singular_values: [f64; 6],
    pub rank_n: usize,
}

impl DegeneracyMatrices {
    pub fn is_non_degenerate(&self) -> bool {
        self.rank_n == DIM - 1
    }

    /// Largest `|sum_k N_kl|` over `l`.
    pub fn column_sum_residual(&self) -> f64 {
        (0..DIM).map(|l| (0..DIM).map(|k| self.n[k][l]).sum::<f64>().abs()).fold(0.0, f64::max)
    }
}

pub fn degeneracy_matrices(b: &Vector6, f: &ComplexMatrix6) -> DegeneracyMatrices {
    let cols = f.columns();
    let fb: [_; DIM] = std::array::from_fn(|l| inner_product(&cols[l], b));
    let m = ComplexMatrix6::from_fn(|k, l| b[k] * cols[l][k].conj() * fb[l]);
    let n: [[f64; 6]; 6] = std::array::from_fn(|k| std::array::from_fn(|l| m[(k, l)].im));
    let nm = Real6::from_fn(|k, l| n[k][l]);
    let sv = nm.singular_values();
    let mut singular_values = [0.0; 6];
    singular_values.copy_from_slice(sv.as_slice());
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let rank_n = singular_values.iter().filter(|&&s| s > RANK_TOL).count();
    DegeneracyMatrices { m, n, singular_values, rank_n }
}

/// Residuals `|<f_j, v>| - 1/sqrt 6` and their Jacobian in the five phases
/// (turns), for all six columns.
fn residuals_and_jacobian(x: &[f64; 5], f: &ComplexMatrix6) -> ([f64; 6], [[f64; 5]; 6]) {
    let v = PhaseVector::new(*x).to_vector();
    let cols = f.columns();
    let mut r = [0.0; 6];
    let mut jac = [[0.0; 5]; 6];
    for j in 0..DIM {
        let z = inner_product(&cols[j], &v);
        let a = z.norm();
        r[j] = a - INV_SQRT6;
        for k in 0..5 {
            // d|z|/dx_k = -Im(<v, e_k><e_k, f_j><f_j, v>) / |z|, x_k in radians
            let m = v[k + 1] * cols[j][k + 1].conj() * z;
            jac[j][k] = -TAU * m.im / a;
        }
    }
    (r, jac)
}

/// The column of `F` whose omission leaves the best-conditioned 5x5
/// Jacobian, chosen by largest `|det|`.
fn dropped_column(jac: &[[f64; 5]; 6]) -> usize {
    (0..DIM)
        .map(|drop| {
            let rows: Vec<usize> = (0..DIM).filter(|&j| j != drop).collect();
            (drop, Real5::from_fn(|i, k| jac[rows[i]][k]).determinant().abs())
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(d, _)| d)
        .unwrap()
}

fn max_abs(r: &[f64; 6]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton on five of the six residuals from `x0`. `None` if it diverges,
/// jumps or meets a singular Jacobian.
fn newton(x0: &[f64; 5], f: &ComplexMatrix6, tol: f64) -> Option<[f64; 5]> {
    let mut x = *x0;
    for _ in 0..NEWTON_ITERATIONS {
        let (r, jac) = residuals_and_jacobian(&x, f);
        if max_abs(&r) <= tol {
            return Some(x);
        }
        let drop = dropped_column(&jac);
        let rows: Vec<usize> = (0..DIM).filter(|&j| j != drop).collect();
        let j5 = Real5::from_fn(|i, k| jac[rows[i]][k]);
        let svd = j5.svd(true, true);
        if svd.singular_values.min() <= RANK_TOL {
            return None;
        }
        let rhs = SVector::<f64, 5>::from_fn(|i, _| -r[rows[i]]);
        let dx = svd.solve(&rhs, 0.0).ok()?;
        if dx.amax() > MAX_NEWTON_STEP || !dx.iter().all(|d| d.is_finite()) {
            return None;
        }
        for k in 0..5 {
            x[k] += dx[k];
        }
    }
    let (r, _) = residuals_and_jacobian(&x, f);
    (max_abs(&r) <= tol).then_some(x)
}

fn lerp(p: FourierParams, q: FourierParams, s: f64) -> FourierParams {
    FourierParams::new(p.a + s * (q.a - p.a), p.b + s * (q.b - p.b))
}

/// Follows `b0` along `path`, one output per path point. Newton from the
/// previous solution at each point; a failed step is halved up to
/// [`MAX_BISECTIONS`] times.
pub fn continue_vector(b0: &PhaseVector, path: &[FourierParams], tol: f64) -> Result<Vec<PhaseVector>> {
    let Some(&start) = path.first() else {
        return Ok(Vec::new());
    };
    let v0 = b0.to_vector();
    let f0 = build_f(start);
    let res = f0.columns().iter().map(|c| unbiasedness_residual(&v0, c)).fold(0.0, f64::max);
    if res > tol {
        return Err(Error::Precondition(format!("start vector has unbiasedness residual {res:e} > {tol:e}")));
    }
    let dm = degeneracy_matrices(&v0, &f0);
    if !dm.is_non_degenerate() {
        return Err(Error::Degenerate { rank: dm.rank_n });
    }
    // polish to well below tol so the error does not accumulate along the path
    let inner_tol = (tol * 1e-3).max(1e-14);
    let mut x = newton(b0.phases(), &f0, inner_tol).unwrap_or(*b0.phases());
    let mut out = vec![PhaseVector::new(x)];
    for w in path.windows(2) {
        let (mut from, to) = (w[0], w[1]);
        while from != to {
            let mut s = 1.0;
            let mut halvings = 0;
            let (next, p) = loop {
                let p = lerp(from, to, s);
                let f = build_f(p);
                let ok = newton(&x, &f, inner_tol)
                    .filter(|y| degeneracy_matrices(&PhaseVector::new(*y).to_vector(), &f).is_non_degenerate());
                if let Some(y) = ok {
                    break (y, p);
                }
                halvings += 1;
                if halvings > MAX_BISECTIONS {
                    return Err(Error::ContinuationBreakdown { a: p.a, b: p.b });
                }
                s *= 0.5;
            };
            x = next;
            from = if s == 1.0 { to } else { p };
        }
        out.push(PhaseVector::new(x));
    }
    Ok(out)
}

/// Clock `U e_k = e^{2 i pi k / 6} e_k` and shift `V e_k = e_{k-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryOps {
    pub u: ComplexMatrix6,
    pub v: ComplexMatrix6,
}

pub fn symmetry_ops() -> SymmetryOps {
    let u = ComplexMatrix6::from_fn(|i, j| if i == j { cis_turns(i as f64 / 6.0) } else { Default::default() });
    let v = ComplexMatrix6::from_fn(|i, j| if j == (i + 1) % DIM { Complex::new(1.0, 0.0) } else { Default::default() });
    SymmetryOps { u, v }
}

/// `[[b, U^2 b, U^4 b], [V^3 b, U^2 V^3 b, U^4 V^3 b]]`.
pub fn orbit_table(b: &Vector6, params: FourierParams) -> Result<[[Vector6; 3]; 2]> {
    let f = build_f(params);
    let res = f
        .columns()
        .iter()
        .chain(ComplexMatrix6::identity().columns().iter())
        .map(|c| unbiasedness_residual(b, c))
        .fold(0.0, f64::max);
    if res > NUMERIC_TOL {
        return Err(Error::Precondition(format!("vector has unbiasedness residual {res:e}")));
    }
    let ops = symmetry_ops();
    let u2 = ops.u.pow(2);
    let v3b = ops.v.pow(3).mul_vec(b);
    let row = |x: Vector6| {
        let y = u2.mul_vec(&x);
        [x, y, u2.mul_vec(&y)]
    };
    Ok([row(*b), row(v3b)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, ANALYTIC_TOL};

    fn fourier_column(j: usize) -> Vector6 {
        build_f(FourierParams::new(0.0, 0.0)).column(j)
    }

    #[test]
    fn clock_and_shift_relations() {
        let SymmetryOps { u, v } = symmetry_ops();
        let id = ComplexMatrix6::identity();
        assert!(u.pow(6).max_abs_diff(&id) < 1e-12);
        assert!(v.pow(6).max_abs_diff(&id) < 1e-12);
        assert!((v * u).max_abs_diff(&(u * v).scale(cis_turns(1.0 / 6.0))) < 1e-12);
        assert_eq!(v.mul_vec(&basis_vector(3)), basis_vector(2));
        for k in 0..6 {
            let uf = u.mul_vec(&fourier_column(k));
            let next = fourier_column((k + 1) % 6);
            assert!(uf.iter().zip(&next).all(|(a, b)| (a - b).norm() < 1e-12));
            let vf = v.mul_vec(&fourier_column(k));
            let scaled = fourier_column(k).map(|z| z * cis_turns(k as f64 / 6.0));
            assert!(vf.iter().zip(&scaled).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn square_clock_and_cube_shift_permute_any_f() {
        let ops = symmetry_ops();
        let (u2, v3) = (ops.u.pow(2), ops.v.pow(3));
        for p in [FourierParams::new(0.07, 0.02), FourierParams::new(0.16, 0.081)] {
            let f = build_f(p);
            for k in 0..6 {
                let a = u2.mul_vec(&f.column(k));
                let b = f.column((k + 2) % 6);
                assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-12));
                let c = v3.mul_vec(&f.column(k));
                let d = f.column(k).map(|z| z * cis_turns(3.0 * k as f64 / 6.0));
                assert!(c.iter().zip(&d).all(|(x, y)| (x - y).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn n_columns_sum_to_zero_and_m_has_full_rank() {
        let b = PhaseVector::new([0.13, 0.71, 0.4, 0.05, 0.92]).to_vector();
        let f = build_f(FourierParams::new(0.03, 0.11));
        let dm = degeneracy_matrices(&b, &f);
        assert!(dm.column_sum_residual() < 1e-12);
        assert!(dm.rank_n <= 5);
        // M = D1 H D2 with D1, D2 diagonal of nonzero overlaps
        let d1: Vec<Complex> = (0..6).map(|k| inner_product(&b, &basis_vector(k))).collect();
        let d2: Vec<Complex> = f.columns().iter().map(|c| inner_product(c, &b)).collect();
        let mm = nalgebra::SMatrix::<Complex, 6, 6>::from_fn(|k, l| dm.m[(k, l)]);
        let det_h = nalgebra::SMatrix::<Complex, 6, 6>::from_fn(|k, l| f[(k, l)].conj()).determinant();
        let expect = d1.iter().chain(&d2).product::<Complex>() * det_h;
        assert!((mm.determinant() - expect).norm() < ANALYTIC_TOL);
        assert!(mm.determinant().norm() > ANALYTIC_TOL * 1e-3);
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let f = build_f(FourierParams::new(0.05, 0.02));
        let x = [0.2, 0.45, 0.9, 0.33, 0.61];
        let (_, jac) = residuals_and_jacobian(&x, &f);
        let h = 1e-7;
        for k in 0..5 {
            let (mut xp, mut xm) = (x, x);
            xp[k] += h;
            xm[k] -= h;
            let (rp, _) = residuals_and_jacobian(&xp, &f);
            let (rm, _) = residuals_and_jacobian(&xm, &f);
            for j in 0..6 {
                assert!(((rp[j] - rm[j]) / (2.0 * h) - jac[j][k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn off_root_start_rejected() {
        let b = PhaseVector::new([0.1, 0.2, 0.3, 0.4, 0.5]);
        let path = [FourierParams::new(0.0, 0.0), FourierParams::new(0.01, 0.0)];
        assert!(matches!(continue_vector(&b, &path, 1e-10), Err(Error::Precondition(_))));
        assert!(matches!(orbit_table(&b.to_vector(), path[0]), Err(Error::Precondition(_))));
    }
}
