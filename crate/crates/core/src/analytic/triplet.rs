use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::equivalence::dephase;
use crate::error::{Error, Result};
use crate::fourier::{build_f, FourierParams};
use crate::haagerup::haagerup_invariant;
use crate::linalg::{omega, Complex, ComplexMatrix6, Vector6, INV_SQRT6};

use super::zauner::zauner_t;

/// Below this `|sin beta|` the formulas for `phi` divide by (nearly) zero.
pub const SIN_BETA_THRESHOLD: f64 = 1e-6;

/// `[arcsin(sqrt 5 / 3) / 2, pi/2 - arcsin(sqrt 5 / 3) / 2]`.
pub fn admissible_interval() -> (f64, f64) {
    let lo = 0.5 * (5f64.sqrt() / 3.0).asin();
    (lo, FRAC_PI_2 - lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletParams {
    pub t: f64,
    pub psi: f64,
    pub beta: f64,
    /// `beta / 2 pi`, in turns.
    pub b: f64,
    pub c3: Complex,
    pub eta: Complex,
    pub nu: Complex,
    pub xi: Complex,
    pub phi: f64,
    pub phi_tilde: f64,
    /// `(cos phi, sin phi)` exactly as given by the closed-form quotients,
    /// before any normalization.
    pub phi_pair: (f64, f64),
    pub phi_tilde_pair: (f64, f64),
}

impl TripletParams {
    pub fn fourier_params(&self) -> FourierParams {
        FourierParams::new(0.0, self.b)
    }

    /// `max |cos^2 + sin^2 - 1|` over both angle pairs.
    pub fn unit_circle_residual(&self) -> f64 {
        let r = |(c, s): (f64, f64)| (c * c + s * s - 1.0).abs();
        r(self.phi_pair).max(r(self.phi_tilde_pair))
    }

    /// Both sides of the identity that makes `(cos phi, sin phi)` a point of
    /// the unit circle: `cos^2 psi cos^2 t + sin^2 psi sin^2 t
    /// - 2 cos t sin t cos psi sin psi cos beta` and `sin^2 beta sin^2 2t`.
    pub fn circle_identity_sides(&self) -> (f64, f64) {
        let (st, ct) = self.t.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        let lhs = cp * cp * ct * ct + sp * sp * st * st - 2.0 * ct * st * cp * sp * self.beta.cos();
        let rhs = (self.beta.sin() * (2.0 * self.t).sin()).powi(2);
        (lhs, rhs)
    }
}

pub fn triplet_params(t: f64) -> Result<TripletParams> {
    let (lo, hi) = admissible_interval();
    if !(t >= lo - 1e-15 && t <= hi + 1e-15) {
        return Err(Error::OutOfDomain { t, lo, hi });
    }
    let (s2, c2) = (2.0 * t).sin_cos();
    let psi = ((2.0 + c2).sqrt() / 2.0).acos();
    let c3 = Complex::new(-c2 / 2.0, (1.0 - c2 * c2 / 4.0).sqrt());
    let disc = (9.0 * s2 * s2 - 5.0).max(0.0);
    let cos_beta = ((3.0 + s2 * s2).sqrt() + 3.0 * disc.sqrt()) / (8.0 * s2);
    let beta = cos_beta.clamp(-1.0, 1.0).acos();
    let sin_beta = beta.sin();
    if sin_beta.abs() < SIN_BETA_THRESHOLD {
        return Err(Error::Singular { t, sin_beta });
    }

    let (st, ct) = t.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let (sbp, cbp) = (beta + psi).sin_cos();
    let denom = sin_beta * s2;
    let phi_pair = ((-cp * cp * ct + cbp * sp * st) / denom, (sp * cp * ct - sbp * sp * st) / denom);
    let phi_tilde_pair = ((-st * sp * sp + cp * ct * sbp) / denom, (cp * cbp * ct - cp * st * sp) / denom);
    let phi = phi_pair.1.atan2(phi_pair.0);
    let phi_tilde = phi_tilde_pair.1.atan2(phi_tilde_pair.0);

    Ok(TripletParams {
        t,
        psi,
        beta,
        b: beta / TAU,
        c3,
        eta: Complex::from_polar(1.0, t),
        nu: Complex::from_polar(1.0, phi),
        xi: Complex::from_polar(1.0, phi_tilde),
        phi,
        phi_tilde,
        phi_pair,
        phi_tilde_pair,
    })
}

fn c_matrix(p: &TripletParams) -> ComplexMatrix6 {
    let w = omega();
    let i = Complex::i();
    let one = Complex::new(1.0, 0.0);
    let c3b = p.c3.conj();
    let (nu_b, xi_b, eta, eta_b) = (p.nu.conj(), p.xi.conj(), p.eta, p.eta.conj());
    let pw = [one, w, w * w];
    let rows: [[Complex; 6]; 6] = [
        [one; 6],
        [c3b, c3b * w * w, c3b * w, -c3b, -c3b * w * w, -c3b * w],
        std::array::from_fn(|k| if k < 3 { nu_b * eta * pw[k] } else { i * xi_b * eta * pw[k - 3] }),
        std::array::from_fn(|k| if k < 3 { c3b } else { -c3b }),
        [one, w * w, w, one, w * w, w],
        std::array::from_fn(|k| if k < 3 { nu_b * eta_b * pw[k] } else { -i * xi_b * eta_b * pw[k - 3] }),
    ];
    ComplexMatrix6::from_rows(rows).scale(Complex::new(INV_SQRT6, 0.0))
}

pub fn build_c(t: f64) -> Result<ComplexMatrix6> {
    Ok(c_matrix(&triplet_params(t)?))
}

/// `(Id, F(0, b(t)), C(t))`.
pub fn build_triplet(t: f64) -> Result<(ComplexMatrix6, ComplexMatrix6, ComplexMatrix6)> {
    let p = triplet_params(t)?;
    Ok((ComplexMatrix6::identity(), build_f(p.fourier_params()), c_matrix(&p)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondSolution {
    pub c3: Complex,
    pub eta: Complex,
    pub nu: Complex,
}

/// Intermediate quantities of the ansatz `c1 = c3 c4`, `c5 = eta zeta`,
/// `c2 = conj(eta) zeta`, `c4 = c6^2`, `nu = conj(c6) zeta`, on the `c6 = 1`
/// branch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivationTrace {
    pub params: TripletParams,
    pub zeta: Complex,
    pub c4: Complex,
    pub c6: Complex,
    /// `-i y`.
    pub z: Complex,
    /// `w1..w6`; the conjugates of these divided by `sqrt 6` are the columns
    /// of `C(t)`.
    pub w: [Vector6; 6],
    pub second_solution: SecondSolution,
}

/// Residuals of the three-equation system in `(c3, eta, nu)` for `y`.
pub fn phase_system_residuals(c3: Complex, eta: Complex, nu: Complex, y: Complex) -> [f64; 3] {
    let nuy = nu * y;
    [
        2.0 * c3.re + (eta * eta).re,
        (1.0 + c3.re) * (1.0 + 2.0 * nu.re * eta.re) + 2.0 * c3.im * nu.im * eta.re,
        (1.0 - c3.re) * (1.0 + 2.0 * nuy.im * eta.im) + 2.0 * c3.im * nuy.re * eta.im,
    ]
}

/// Residuals of the two linear equations in `(cos phi, sin phi)`.
pub fn simple_system_residuals(p: &TripletParams) -> [f64; 2] {
    let (st, ct) = p.t.sin_cos();
    let (sp, cp) = p.psi.sin_cos();
    let (sbp, cbp) = (p.beta + p.psi).sin_cos();
    let (cf, sf) = p.phi_pair;
    [
        -sp * ct * cf - cp * ct * sf - sp / 2.0,
        sbp * st * cf + cbp * st * sf + cp / 2.0,
    ]
}

impl DerivationTrace {
    pub fn y(&self) -> Complex {
        Complex::from_polar(1.0, self.params.beta)
    }

    pub fn primary_residuals(&self) -> [f64; 3] {
        let p = &self.params;
        phase_system_residuals(p.c3, p.eta, p.nu, self.y())
    }

    pub fn second_residuals(&self) -> [f64; 3] {
        let s = &self.second_solution;
        phase_system_residuals(s.c3, s.eta, s.nu, self.y())
    }

    /// The unbiased vectors `conj(w_k) / sqrt 6`.
    pub fn unbiased_vectors(&self) -> [Vector6; 6] {
        self.w.map(|w| w.map(|z| z.conj() * INV_SQRT6))
    }
}

fn w_vector(c3: Complex, eta: Complex, nu: Complex, c4: Complex) -> Vector6 {
    let one = Complex::new(1.0, 0.0);
    let c4b = c4.conj();
    [one, c3 * c4, nu * eta.conj() * c4b, c3, c4, nu * eta * c4b]
}

pub fn derivation_trace(t: f64) -> Result<DerivationTrace> {
    let p = triplet_params(t)?;
    let w = omega();
    let second = SecondSolution { c3: -p.c3, eta: Complex::i() * p.eta, nu: p.xi };
    let branches = [Complex::new(1.0, 0.0), w, w * w];
    let vectors: [Vector6; 6] = std::array::from_fn(|k| {
        if k < 3 {
            w_vector(p.c3, p.eta, p.nu, branches[k])
        } else {
            w_vector(second.c3, second.eta, second.nu, branches[k - 3])
        }
    });
    let c6 = Complex::new(1.0, 0.0);
    Ok(DerivationTrace {
        params: p,
        zeta: c6 * p.nu,
        c4: c6 * c6,
        c6,
        z: -Complex::i() * Complex::from_polar(1.0, p.beta),
        w: vectors,
        second_solution: second,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequivalenceReport {
    pub t: f64,
    pub x: f64,
    pub triplet_multiset: usize,
    pub triplet_distinct: usize,
    pub zauner_multiset: usize,
    pub zauner_distinct: usize,
    /// The triplet transition matrix has strictly more distinct invariant
    /// values, so the two families are not equivalent.
    pub triplet_larger: bool,
}

/// Compares the Haagerup invariants of `F(0, b(t))* C(t)` and of dephased `T(x)`.
pub fn inequivalence_report(t: f64, x: f64) -> Result<InequivalenceReport> {
    let (_, f, c) = build_triplet(t)?;
    let transition = f.adjoint() * c;
    let (tz, _) = dephase(&zauner_t(x))?;
    let a = haagerup_invariant(&transition);
    let b = haagerup_invariant(&tz);
    Ok(InequivalenceReport {
        t,
        x,
        triplet_multiset: a.multiset_size(),
        triplet_distinct: a.distinct(),
        zauner_multiset: b.multiset_size(),
        zauner_distinct: b.distinct(),
        triplet_larger: a.distinct() > b.distinct(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram_residual, inner_product, ANALYTIC_TOL};

    fn sample_ts(n: usize) -> Vec<f64> {
        let (lo, hi) = admissible_interval();
        (0..n)
            .map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64)
            .filter(|t| triplet_params(*t).is_ok())
            .collect()
    }

    #[test]
    fn boundary_value_of_beta() {
        let (lo, _) = admissible_interval();
        let p = triplet_params(lo).unwrap();
        assert!((p.beta.cos() - 10f64.sqrt() / 10.0).abs() < 1e-12);
        assert!((p.beta - (10f64.sqrt() / 10.0).acos()).abs() < 1e-12);
        assert!((p.beta - 1.24905).abs() < 1e-5);
    }

    #[test]
    fn quarter_pi_is_singular() {
        let t = std::f64::consts::FRAC_PI_4;
        assert!(matches!(triplet_params(t), Err(Error::Singular { .. })));
        // the intermediate values there: c3 = i, psi = pi/4, cos beta = 1
        let c2 = (2.0 * t).cos();
        assert!((Complex::new(-c2 / 2.0, (1.0 - c2 * c2 / 4.0).sqrt()) - Complex::i()).norm() < 1e-15);
        assert!((((2.0 + c2).sqrt() / 2.0).acos() - t).abs() < 1e-12);
    }

    #[test]
    fn outside_interval_rejected() {
        let (lo, hi) = admissible_interval();
        assert!(matches!(triplet_params(lo - 1e-3), Err(Error::OutOfDomain { .. })));
        assert!(matches!(triplet_params(hi + 1e-3), Err(Error::OutOfDomain { .. })));
        assert!(matches!(build_c(0.1), Err(Error::OutOfDomain { .. })));
        assert!(triplet_params(hi).is_ok());
    }

    #[test]
    fn params_invariants() {
        for t in sample_ts(50) {
            let p = triplet_params(t).unwrap();
            for z in [p.c3, p.eta, p.nu, p.xi] {
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
            assert!(p.unit_circle_residual() < ANALYTIC_TOL, "t = {t}");
            let (lhs, rhs) = p.circle_identity_sides();
            assert!((lhs - rhs).abs() < ANALYTIC_TOL);
            assert!(p.b != 0.0);
            for r in simple_system_residuals(&p) {
                assert!(r.abs() < ANALYTIC_TOL);
            }
        }
    }

    #[test]
    fn displayed_rows_of_c() {
        let c = build_c(0.6).unwrap().scale(Complex::new(6f64.sqrt(), 0.0));
        let w = omega();
        let one = Complex::new(1.0, 0.0);
        let row4 = [one, w * w, w, one, w * w, w];
        for k in 0..6 {
            assert!((c[(0, k)] - one).norm() < 1e-12);
            assert!((c[(4, k)] - row4[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn triplet_is_mutually_unbiased() {
        for t in sample_ts(40) {
            let (id, f, c) = build_triplet(t).unwrap();
            assert!(gram_residual(&c.columns()) < ANALYTIC_TOL);
            assert!(f.unbiasedness_residual(&c) < ANALYTIC_TOL, "t = {t}");
            assert!(id.unbiasedness_residual(&c) < 1e-12);
            assert!(id.unbiasedness_residual(&f) < 1e-12);
        }
    }

    #[test]
    fn derivation_trace_consistency() {
        for t in sample_ts(30) {
            let tr = derivation_trace(t).unwrap();
            assert!(tr.primary_residuals()[0].abs() < 1e-12);
            for r in tr.primary_residuals().iter().chain(&tr.second_residuals()) {
                assert!(r.abs() < ANALYTIC_TOL, "t = {t}: {r}");
            }
            assert!((tr.c6.powi(3) - 1.0).norm() < 1e-12);
            assert!((tr.c4 - tr.c6 * tr.c6).norm() < 1e-12);
            let vs = tr.unbiased_vectors();
            assert!(gram_residual(&vs) < ANALYTIC_TOL);
            assert!(inner_product(&tr.w[0], &tr.w[3]).norm() < ANALYTIC_TOL);
            let f = build_f(tr.params.fourier_params());
            for v in &vs {
                for col in f.columns() {
                    assert!((inner_product(v, &col).norm() - INV_SQRT6).abs() < ANALYTIC_TOL);
                }
            }
            // the unbiased vectors are exactly the columns of C(t)
            let c = build_c(t).unwrap();
            for (k, v) in vs.iter().enumerate() {
                let col = c.column(k);
                assert!(v.iter().zip(&col).all(|(a, b)| (a - b).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn other_cube_roots_give_orthogonal_triples() {
        let tr = derivation_trace(0.55).unwrap();
        assert!(gram_residual(&tr.unbiased_vectors()[..3]) < ANALYTIC_TOL);
        assert!(gram_residual(&tr.unbiased_vectors()[3..]) < ANALYTIC_TOL);
    }

    #[test]
    fn inequivalence_is_deterministic() {
        let r1 = inequivalence_report(0.6, 0.3).unwrap();
        let r2 = inequivalence_report(0.6, 0.3).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.triplet_multiset, 1296);
        assert_eq!(r1.zauner_multiset, 1296);
    }
}
