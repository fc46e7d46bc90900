//! A `2m x 2m` Hadamard matrix built from four `m x m` circulant blocks can be
//! written `T = E1* E2` with `E1`, `E2` Hadamard, giving the MUB triplet
//! `(Id, E1, E2)`. Here `m = 3` and `T = T(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix6, INV_SQRT6};

type Mat3 = [[Complex; 3]; 3];

const M: usize = 3;

/// The one-parameter Hadamard family `T(x)`, `x` in radians.
pub fn zauner_t(x: f64) -> ComplexMatrix6 {
    let e = Complex::from_polar(1.0, x);
    let eb = e.conj();
    let i = Complex::i();
    let one = Complex::new(1.0, 0.0);
    let rows = [
        [one, -eb, e, -one, i * eb, i * e],
        [e, one, -eb, i * e, -one, i * eb],
        [-eb, e, one, i * eb, i * e, -one],
        [one, i * eb, i * e, one, eb, -e],
        [i * e, one, i * eb, -e, one, eb],
        [i * eb, i * e, one, eb, -e, one],
    ];
    ComplexMatrix6::from_rows(rows).scale(Complex::new(INV_SQRT6, 0.0))
}

fn fourier3() -> Mat3 {
    let s = 1.0 / 3f64.sqrt();
    std::array::from_fn(|j| std::array::from_fn(|k| Complex::from_polar(s, std::f64::consts::TAU * (j * k) as f64 / 3.0)))
}

fn mul3(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..M).map(|k| a[i][k] * b[k][j]).sum()))
}

fn adjoint3(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].conj()))
}

fn diag3(d: [Complex; 3]) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { d[i] } else { Complex::default() }))
}

fn block(t: &ComplexMatrix6, bi: usize, bj: usize) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| t[(bi * M + i, bj * M + j)]))
}

fn assemble(blocks: [[Mat3; 2]; 2]) -> ComplexMatrix6 {
    ComplexMatrix6::from_fn(|i, j| blocks[i / M][j / M][i % M][j % M])
}

/// The unitary `S(b0, b1, b2, b3)` with `e_k = e^{i b_k}`.
pub fn s_matrix(e: [Complex; 4]) -> [[Complex; 2]; 2] {
    let (p, m) = (e[0] + e[1], e[0] - e[1]);
    [[p * 0.5, e[3] * m * 0.5], [e[2] * m * 0.5, e[2] * e[3] * p * 0.5]]
}

/// Writes a unitary 2x2 matrix as `S(b0, b1, b2, b3)`, returning the four
/// unimodular factors `e^{i b_k}`.
fn factor_s(s: [[Complex; 2]; 2], block: usize) -> Result<[Complex; 4]> {
    const TOL: f64 = 1e-12;
    let [[p, q], [r, d]] = s;
    let unit = |z: Complex| z / z.norm();
    let e3 = if q.norm() > TOL && p.norm() > TOL {
        // choose e3 with conj(p) q conj(e3) purely imaginary
        unit(p.conj() * q) * Complex::new(0.0, -1.0)
    } else {
        Complex::new(1.0, 0.0)
    };
    let e0 = p + q * e3.conj();
    let e1 = p - q * e3.conj();
    let e2 = if q.norm() > TOL { r * e3 / q } else { d / (e3 * p) };
    let factors = [e0, e1, e2, e3];
    if factors.iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::Factorization { block });
    }
    let factors = factors.map(unit);
    let back = s_matrix(factors);
    let err = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (back[i][j] - s[i][j]).norm())
        .fold(0.0, f64::max);
    if err > 1e-9 {
        return Err(Error::Factorization { block });
    }
    Ok(factors)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZaunerBlocks {
    pub x: f64,
    /// Diagonals of `U0..U3`.
    pub u: [[Complex; 3]; 4],
    pub e1: ComplexMatrix6,
    pub e2: ComplexMatrix6,
    pub t: ComplexMatrix6,
}

impl ZaunerBlocks {
    /// `max |T - E1* E2|`.
    pub fn factorization_residual(&self) -> f64 {
        self.t.max_abs_diff(&(self.e1.adjoint() * self.e2))
    }

    /// Largest unbiasedness residual over the pairs of `(Id, E1, E2)`.
    pub fn triplet_residual(&self) -> f64 {
        let id = ComplexMatrix6::identity();
        id.unbiasedness_residual(&self.e1)
            .max(id.unbiasedness_residual(&self.e2))
            .max(self.e1.unbiasedness_residual(&self.e2))
    }
}

pub fn zauner_construction(x: f64) -> Result<ZaunerBlocks> {
    let t = zauner_t(x);
    let f = fourier3();
    let fa = adjoint3(&f);
    // A = F* Abar F, so Abar = F A F*
    let bars: [[Mat3; 2]; 2] =
        std::array::from_fn(|i| std::array::from_fn(|j| mul3(&mul3(&f, &block(&t, i, j)), &fa)));
    for (bi, row) in bars.iter().enumerate() {
        for (bj, bar) in row.iter().enumerate() {
            for i in 0..M {
                for j in 0..M {
                    if i != j && bar[i][j].norm() > 1e-12 {
                        return Err(Error::Precondition(format!("block ({bi},{bj}) of T is not circulant")));
                    }
                }
            }
        }
    }
    let mut u = [[Complex::default(); 3]; 4];
    for k in 0..M {
        let s = [[bars[0][0][k][k], bars[0][1][k][k]], [bars[1][0][k][k], bars[1][1][k][k]]];
        let e = factor_s(s, k)?;
        for l in 0..4 {
            u[l][k] = e[l];
        }
    }
    let [u0, u1, u2, u3] = u.map(diag3);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let scale = |a: Mat3, s: f64| -> Mat3 { a.map(|r| r.map(|z| z * s)) };
    let u2f = mul3(&adjoint3(&u2), &f);
    let e1 = assemble([[scale(f, h), scale(u2f, h)], [scale(f, h), scale(u2f, -h)]]);
    let u3f = mul3(&u3, &f);
    let e2 = assemble([
        [scale(mul3(&u0, &f), h), scale(mul3(&u0, &u3f), h)],
        [scale(mul3(&u1, &f), h), scale(mul3(&u1, &u3f), -h)],
    ]);
    Ok(ZaunerBlocks { x, u, e1, e2, t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_entries() {
        let x = 0.7;
        let t = zauner_t(x).scale(Complex::new(6f64.sqrt(), 0.0));
        assert!((t[(0, 0)] - 1.0).norm() < 1e-15);
        assert!((t[(0, 1)] + Complex::from_polar(1.0, -x)).norm() < 1e-15);
    }

    #[test]
    fn t_is_hadamard() {
        for x in [0.0, 0.3, 1.1] {
            assert!(zauner_t(x).is_complex_hadamard(1e-12));
        }
    }

    #[test]
    fn construction_reproduces_t() {
        for x in [0.0, 0.3, 1.1, 2.5, -0.8] {
            let z = zauner_construction(x).unwrap();
            assert!(z.factorization_residual() < 1e-12, "x = {x}");
            assert!(z.e1.is_complex_hadamard(1e-12));
            assert!(z.e2.is_complex_hadamard(1e-12));
            assert!(z.triplet_residual() < 1e-10);
        }
    }

    #[test]
    fn s_factorization_round_trip() {
        let e = [0.3, 1.9, -2.2, 0.7].map(|b: f64| Complex::from_polar(1.0, b));
        let s = s_matrix(e);
        let back = s_matrix(factor_s(s, 0).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                assert!((back[i][j] - s[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_unitary_block_rejected() {
        let z = Complex::new(0.9, 0.0);
        assert!(factor_s([[z, z], [z, z]], 1).is_err());
    }
}
