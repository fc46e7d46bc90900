//! The generalized Fourier family `F(a, b)`, its fundamental parameter
//! triangle, and the reduced system characterizing vectors unbiased to both
//! the standard basis and `F(a, b)`.

use serde::{Deserialize, Serialize};

use crate::linalg::{cis_turns, omega, Complex, ComplexMatrix6, INV_SQRT6};
use crate::phase::PhaseVector;

/// Parameters `(a, b)` in turns; `x = e^{2 i pi a}`, `y = e^{2 i pi b}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierParams {
    pub a: f64,
    pub b: f64,
}

impl FourierParams {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn x(&self) -> Complex {
        cis_turns(self.a)
    }

    pub fn y(&self) -> Complex {
        cis_turns(self.b)
    }

    pub fn in_fundamental_domain(&self) -> bool {
        in_fundamental_domain(*self)
    }
}

/// Which parameter an entry of `sqrt(6) F(a, b)` carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryParam {
    None,
    A,
    B,
}

/// Phase of entry `(row, col)` of `sqrt(6) F(a, b)` as `base + a` or `base + b`:
/// `(base turns, parameter)`.
pub const ENTRY_PHASES: [[(f64, EntryParam); 6]; 6] = {
    use EntryParam::{None as N, A, B};
    const S: f64 = 1.0 / 6.0;
    [
        [(0.0, N), (0.0, N), (0.0, N), (0.0, N), (0.0, N), (0.0, N)],
        [(0.0, N), (S, A), (2.0 * S, N), (3.0 * S, A), (4.0 * S, N), (5.0 * S, A)],
        [(0.0, N), (2.0 * S, B), (4.0 * S, N), (0.0, B), (2.0 * S, N), (4.0 * S, B)],
        [(0.0, N), (3.0 * S, N), (0.0, N), (3.0 * S, N), (0.0, N), (3.0 * S, N)],
        [(0.0, N), (4.0 * S, A), (2.0 * S, N), (0.0, A), (4.0 * S, N), (2.0 * S, A)],
        [(0.0, N), (5.0 * S, B), (4.0 * S, N), (3.0 * S, B), (2.0 * S, N), (S, B)],
    ]
};

/// Phase in turns of entry `(row, col)` of `sqrt(6) F(params)`.
pub fn entry_phase(row: usize, col: usize, params: FourierParams) -> f64 {
    let (base, p) = ENTRY_PHASES[row][col];
    base + match p {
        EntryParam::None => 0.0,
        EntryParam::A => params.a,
        EntryParam::B => params.b,
    }
}

pub fn build_f(params: FourierParams) -> ComplexMatrix6 {
    ComplexMatrix6::from_fn(|i, j| cis_turns(entry_phase(i, j, params)) * INV_SQRT6)
}

/// Closed triangle with vertices `(0,0)`, `(1/6,0)`, `(1/6,1/12)`.
pub fn in_fundamental_domain(params: FourierParams) -> bool {
    const EPS: f64 = 1e-15;
    let FourierParams { a, b } = params;
    b >= -EPS && a <= 1.0 / 6.0 + EPS && 2.0 * b <= a + EPS
}

/// The two sides of the three-term lemma for `(alpha, beta, gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaOneCheck {
    /// `|alpha + beta w^k + gamma w^{2k}|^2 = 6` for `k = 0, 1, 2`.
    pub moduli: bool,
    /// `|alpha|^2 + |beta|^2 + |gamma|^2 = 6` and
    /// `alpha conj(beta) + beta conj(gamma) + gamma conj(alpha) = 0`.
    pub reduced: bool,
}

impl LemmaOneCheck {
    pub fn agree(&self) -> bool {
        self.moduli == self.reduced
    }
}

pub fn lemma1_check(alpha: Complex, beta: Complex, gamma: Complex, tol: f64) -> LemmaOneCheck {
    let w = omega();
    let moduli = (0..3).all(|k| {
        let wk = w.powi(k);
        ((alpha + beta * wk + gamma * wk * wk).norm_sqr() - 6.0).abs() <= tol
    });
    let q = alpha.norm_sqr() + beta.norm_sqr() + gamma.norm_sqr();
    let p = alpha * beta.conj() + beta * gamma.conj() + gamma * alpha.conj();
    let reduced = (q - 6.0).abs() <= tol && p.norm() <= tol;
    LemmaOneCheck { moduli, reduced }
}

/// True when both formulations of the lemma agree on `(alpha, beta, gamma)`.
pub fn lemma1_equivalence_check(alpha: Complex, beta: Complex, gamma: Complex, tol: f64) -> bool {
    lemma1_check(alpha, beta, gamma, tol).agree()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedSystemResidual {
    /// `Re(c3 + c1 conj(c4) + c5 conj(c2))`.
    pub r1: f64,
    /// Cyclic sum over `(1 + c3, c1 + c4, c2 + c5)`.
    pub r2: Complex,
    /// Cyclic sum over `(1 - c3, x (c4 - c1), y (c2 - c5))`.
    pub r3: Complex,
    /// `| |c_j| - 1 |`.
    pub mod_residuals: [f64; 5],
}

impl ReducedSystemResidual {
    pub fn max(&self) -> f64 {
        self.mod_residuals
            .iter()
            .copied()
            .fold(self.r1.abs().max(self.r2.norm()).max(self.r3.norm()), f64::max)
    }
}

fn cyclic(alpha: Complex, beta: Complex, gamma: Complex) -> Complex {
    alpha * beta.conj() + beta * gamma.conj() + gamma * alpha.conj()
}

/// Residuals of the reduced system for `u = (1/sqrt 6)(1, conj c1, ..., conj c5)`.
pub fn reduced_system_residual(c: &[Complex; 5], params: FourierParams) -> ReducedSystemResidual {
    let [c1, c2, c3, c4, c5] = *c;
    let one = Complex::new(1.0, 0.0);
    let (x, y) = (params.x(), params.y());
    ReducedSystemResidual {
        r1: (c3 + c1 * c4.conj() + c5 * c2.conj()).re,
        r2: cyclic(one + c3, c1 + c4, c2 + c5),
        r3: cyclic(one - c3, x * (c4 - c1), y * (c2 - c5)),
        mod_residuals: c.map(|z| (z.norm() - 1.0).abs()),
    }
}

/// `| |sum_k c_k F_{k,j} sqrt 6| - sqrt 6 |` for each column `j`, with `c_0 = 1`:
/// the six modulus conditions before reduction.
pub fn six_modulus_residuals(c: &[Complex; 5], params: FourierParams) -> [f64; 6] {
    let f = build_f(params);
    let s6 = 6f64.sqrt();
    std::array::from_fn(|j| {
        let sum: Complex = f[(0, j)] * s6 + (1..6).map(|k| c[k - 1] * f[(k, j)] * s6).sum::<Complex>();
        (sum.norm() - s6).abs()
    })
}

/// `c_k = conj(sqrt 6 u_k)` for the phase vector `u`.
pub fn c_from_phase_vector(u: &PhaseVector) -> [Complex; 5] {
    u.phases().map(|p| cis_turns(-p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dft6;
    use proptest::prelude::*;

    #[test]
    fn f00_is_the_dft() {
        let f = build_f(FourierParams::new(0.0, 0.0));
        assert!(f.max_abs_diff(&dft6()) < 1e-12);
        let perm = dft6().find_column_permutation(&f, 1e-12).unwrap();
        assert_eq!(perm, [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn displayed_entries() {
        let p = FourierParams::new(0.123, 0.456);
        let f = build_f(p).scale(Complex::new(6f64.sqrt(), 0.0));
        let w = omega();
        assert!((f[(1, 1)] - (-(w * w) * p.x())).norm() < 1e-12);
        for (k, s) in [1.0, -1.0, 1.0, -1.0, 1.0, -1.0].iter().enumerate() {
            assert!((f[(3, k)] - s).norm() < 1e-12);
        }
        let row5 = [Complex::new(1.0, 0.0), -w * p.y(), w * w, -p.y(), w, -(w * w) * p.y()];
        for k in 0..6 {
            assert!((f[(5, k)] - row5[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn triangle_membership() {
        assert!(in_fundamental_domain(FourierParams::new(0.0, 0.0)));
        assert!(in_fundamental_domain(FourierParams::new(1.0 / 6.0, 1.0 / 12.0)));
        assert!(in_fundamental_domain(FourierParams::new(1.0 / 6.0, 0.0)));
        assert!(!in_fundamental_domain(FourierParams::new(0.5, 0.5)));
        assert!(!in_fundamental_domain(FourierParams::new(0.1, 0.06)));
    }

    #[test]
    fn lemma_one_examples() {
        let r2 = Complex::new(2f64.sqrt(), 0.0);
        let c = lemma1_check(r2, r2, r2, 1e-10);
        assert!(!c.moduli && !c.reduced);
        let c = lemma1_check(Complex::new(6f64.sqrt(), 0.0), Complex::default(), Complex::default(), 1e-10);
        assert!(c.moduli && c.reduced);
    }

    #[test]
    fn all_ones_fails_first_equation() {
        let c = [Complex::new(1.0, 0.0); 5];
        let r = reduced_system_residual(&c, FourierParams::new(0.0, 0.0));
        assert!((r.r1 - 3.0).abs() < 1e-15);
    }

    fn unimodular5() -> impl Strategy<Value = [Complex; 5]> {
        proptest::array::uniform5(0.0f64..1.0).prop_map(|p| p.map(cis_turns))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn hadamard_for_all_parameters(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            prop_assert!(build_f(FourierParams::new(a, b)).is_complex_hadamard(1e-12));
        }

        #[test]
        fn lemma_one_formulations_agree(z in proptest::array::uniform6(-3.0f64..3.0)) {
            let (a, b, c) = (Complex::new(z[0], z[1]), Complex::new(z[2], z[3]), Complex::new(z[4], z[5]));
            prop_assert!(lemma1_equivalence_check(a, b, c, 1e-9));
        }

        /// The identities behind the reduction: for unimodular c, the squared
        /// moduli of the six column sums are `6 + 2 r1 + 2 Re(w^{-k} r2)` and
        /// `6 - 2 r1 + 2 Re(w^{-k} r3)` in the orders of the lemma.
        #[test]
        fn reduction_identities(c in unimodular5(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let p = FourierParams::new(a, b);
            let r = reduced_system_residual(&c, p);
            let f = build_f(p).scale(Complex::new(6f64.sqrt(), 0.0));
            let sq = |j: usize| {
                let s: Complex = f[(0, j)] + (1..6).map(|k| c[k - 1] * f[(k, j)]).sum::<Complex>();
                s.norm_sqr()
            };
            let w = omega();
            // columns 0, 2, 4 are alpha + w^k beta + w^{2k} gamma for k = 0, 1, 2
            for (k, col) in [0usize, 2, 4].into_iter().enumerate() {
                let expected = 6.0 + 2.0 * r.r1 + 2.0 * (w.powi(-(k as i32)) * r.r2).re;
                prop_assert!((sq(col) - expected).abs() < 1e-10);
            }
            // columns 3, 5, 1 are alpha' + w^k beta' + w^{2k} gamma' for k = 0, 1, 2
            for (k, col) in [3usize, 5, 1].into_iter().enumerate() {
                let expected = 6.0 - 2.0 * r.r1 + 2.0 * (w.powi(-(k as i32)) * r.r3).re;
                prop_assert!((sq(col) - expected).abs() < 1e-10);
            }
        }

        #[test]
        fn reduced_and_direct_predicates_agree(c in unimodular5(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let p = FourierParams::new(a, b);
            let reduced = reduced_system_residual(&c, p).max() < 1e-8;
            let direct = six_modulus_residuals(&c, p).iter().all(|r| *r < 1e-8);
            prop_assert_eq!(reduced, direct);
        }
    }
}
