//! Error bounds for the midpoint sum `S = (1 + sum_k e^{2 i pi (m_k - s_k)}) / 6`
//! of two phase boxes.
//!
//! If some pair of points of the boxes has inner product of modulus `1/sqrt 6`
//! (or `0`), then `S` lies within `radius` of that circle (or of the origin).
//! A box pair *passes* when this necessary condition holds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis_turns, Complex, INV_SQRT6};

/// Added to the radius on the pass side only.
pub const PASS_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Unbiased,
    Orthogonal,
}

impl Target {
    /// Distance of `s` from the set the inner product must reach.
    #[inline]
    pub fn distance(self, s: Complex) -> f64 {
        match self {
            Target::Unbiased => (s.norm() - INV_SQRT6).abs(),
            Target::Orthogonal => s.norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Trivial,
    Improved,
}

/// The closed interval `[mid - len/2, mid + len/2]`, in turns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub mid: f64,
    pub len: f64,
}

impl Interval {
    pub fn new(mid: f64, len: f64) -> Self {
        debug_assert!(len >= 0.0);
        Self { mid, len }
    }

    pub fn point(x: f64) -> Self {
        Self { mid: x, len: 0.0 }
    }

    pub fn lo(&self) -> f64 {
        self.mid - 0.5 * self.len
    }

    pub fn hi(&self) -> f64 {
        self.mid + 0.5 * self.len
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertBoundReport {
    pub midpoint_sum: Complex,
    pub radius: f64,
    pub target: Target,
    pub passes: bool,
}

pub fn midpoint_sum(m: &[f64; 5], s: &[f64; 5]) -> Complex {
    (Complex::new(1.0, 0.0) + (0..5).map(|k| cis_turns(m[k] - s[k])).sum::<Complex>()) / 6.0
}

/// `(pi / 6) * total_len`.
#[inline]
pub fn trivial_radius(total_len: f64) -> f64 {
    PI / 6.0 * total_len
}

/// `max_eps |sum_k d_k^{eps_k}| / 6` with `d_k^+ = mid_k - plus_k`,
/// `d_k^- = mid_k - minus_k`.
#[inline]
pub fn corner_radius(mid: &[Complex; 5], plus: &[Complex; 5], minus: &[Complex; 5]) -> f64 {
    let mut sums = [Complex::new(0.0, 0.0); 32];
    let mut len = 1;
    for k in 0..5 {
        let dp = mid[k] - plus[k];
        let dm = mid[k] - minus[k];
        for i in 0..len {
            let s = sums[i];
            sums[i] = s + dm;
            sums[i + len] = s + dp;
        }
        len *= 2;
    }
    sums.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt() / 6.0
}

#[inline]
pub(crate) fn passes(distance: f64, radius: f64) -> bool {
    distance <= radius + PASS_SLACK
}

fn total_len(u: &[Interval; 5], v: &[Interval; 5]) -> f64 {
    let mut t = 0.0;
    for k in 0..5 {
        t += u[k].len + v[k].len;
    }
    t
}

fn report(u: &[Interval; 5], v: &[Interval; 5], radius: f64, target: Target) -> CertBoundReport {
    let s = midpoint_sum(&u.map(|i| i.mid), &v.map(|i| i.mid));
    CertBoundReport { midpoint_sum: s, radius, target, passes: passes(target.distance(s), radius) }
}

pub fn trivial_bound(u: &[Interval; 5], v: &[Interval; 5], target: Target) -> CertBoundReport {
    report(u, v, trivial_radius(total_len(u, v)), target)
}

/// Radius from the 32 endpoint sums, where each `u` endpoint is paired with
/// the opposite `v` endpoint. Requires total length below `1/pi`.
pub fn improved_bound(u: &[Interval; 5], v: &[Interval; 5], target: Target) -> Result<CertBoundReport> {
    let budget = total_len(u, v);
    if budget >= 1.0 / PI {
        return Err(Error::Precondition(format!("interval budget {budget} is not below 1/pi")));
    }
    let mid: [Complex; 5] = std::array::from_fn(|k| cis_turns(u[k].mid - v[k].mid));
    let plus: [Complex; 5] = std::array::from_fn(|k| cis_turns(u[k].hi() - v[k].lo()));
    let minus: [Complex; 5] = std::array::from_fn(|k| cis_turns(u[k].lo() - v[k].hi()));
    Ok(report(u, v, corner_radius(&mid, &plus, &minus), target))
}

pub fn bound(kind: BoundKind, u: &[Interval; 5], v: &[Interval; 5], target: Target) -> Result<CertBoundReport> {
    match kind {
        BoundKind::Trivial => Ok(trivial_bound(u, v, target)),
        BoundKind::Improved => improved_bound(u, v, target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn points(x: [f64; 5]) -> [Interval; 5] {
        x.map(Interval::point)
    }

    #[test]
    fn midpoint_sum_examples() {
        let z = [0.0; 5];
        assert!((midpoint_sum(&z, &z) - 1.0).norm() < 1e-15);
        let sixth = [1.0, 2.0, 3.0, 4.0, 5.0].map(|k| k / 6.0);
        assert!(midpoint_sum(&sixth, &z).norm() < 1e-15);
        let half = [0.0, 0.0, 0.0, 0.0, 0.5];
        assert!((midpoint_sum(&half, &z) - 2.0 / 3.0).norm() < 1e-15);
    }

    #[test]
    fn degenerate_intervals() {
        // |S| = 1/sqrt 6 exactly: 1 + e^{i t} + ... chosen as a column of F(0,0)
        let col = [1.0, 2.0, 3.0, 4.0, 5.0].map(|k| k / 6.0);
        let u = points([0.1, 0.25, 0.8, 0.6, 0.05]);
        let s = midpoint_sum(&u.map(|i| i.mid), &col);
        let on_circle = (s.norm() - INV_SQRT6).abs();
        let r = trivial_bound(&u, &points(col), Target::Unbiased);
        assert_eq!(r.radius, 0.0);
        assert_eq!(r.passes, on_circle <= PASS_SLACK);

        let z = points([0.0; 5]);
        for t in [Target::Unbiased, Target::Orthogonal] {
            assert!(!trivial_bound(&z, &z, t).passes);
            let imp = improved_bound(&z, &z, t).unwrap();
            assert_eq!(imp.radius, 0.0);
            assert!(!imp.passes);
        }
    }

    #[test]
    fn exact_unbiased_pair_passes_with_zero_radius() {
        // u = (1, 1, 1, 1, 1, 1)/sqrt 6 against a column with phases k/6
        let col = points([1.0, 2.0, 3.0, 4.0, 5.0].map(|k| k / 6.0));
        let u = points([0.0; 5]);
        assert!(improved_bound(&u, &col, Target::Orthogonal).unwrap().passes);
    }

    #[test]
    fn trivial_radius_arithmetic() {
        // L_k = T_k = 1/19, |S| = 0.9 fails the unbiased test
        let iv = [Interval::new(0.0, 1.0 / 19.0); 5];
        let r = trivial_radius(total_len(&iv, &iv));
        assert!((r - 10.0 * PI / 114.0).abs() < 1e-15);
        assert!(!passes(Target::Unbiased.distance(Complex::new(0.9, 0.0)), r));
    }

    #[test]
    fn single_interval_closed_form() {
        let l = 1.0 / 19.0;
        let mut u = points([0.3, 0.1, 0.7, 0.2, 0.9]);
        u[0].len = l;
        let v = points([0.0; 5]);
        let r = improved_bound(&u, &v, Target::Orthogonal).unwrap().radius;
        let m = u[0].mid;
        let expect = (cis_turns(m) - cis_turns(m + l / 2.0)).norm() / 6.0;
        let expect_lo = (cis_turns(m) - cis_turns(m - l / 2.0)).norm() / 6.0;
        assert!((r - expect.max(expect_lo)).abs() < 1e-15);
    }

    #[test]
    fn hypothesis_violation_rejected() {
        let iv = [Interval::new(0.0, 0.04); 5];
        assert!(improved_bound(&iv, &iv, Target::Unbiased).is_err());
    }

    fn interval_set() -> impl Strategy<Value = [Interval; 5]> {
        proptest::array::uniform5((0.0f64..1.0, 0.0f64..0.03)).prop_map(|a| a.map(|(m, l)| Interval::new(m, l)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn improved_never_exceeds_trivial(u in interval_set(), v in interval_set()) {
            let t = trivial_bound(&u, &v, Target::Unbiased);
            let i = improved_bound(&u, &v, Target::Unbiased).unwrap();
            prop_assert!(i.radius <= t.radius * (1.0 + 1e-12));
            prop_assert!(!i.passes || t.passes);
        }
    }

    proptest! {
        #[test]
        fn every_point_pair_lies_within_radius(
            u in interval_set(),
            v in interval_set(),
            fu in proptest::array::uniform5(0.0f64..=1.0),
            fv in proptest::array::uniform5(0.0f64..=1.0),
        ) {
            let x: [f64; 5] = std::array::from_fn(|k| u[k].lo() + fu[k] * u[k].len);
            let y: [f64; 5] = std::array::from_fn(|k| v[k].lo() + fv[k] * v[k].len);
            let s = midpoint_sum(&u.map(|i| i.mid), &v.map(|i| i.mid));
            let r = improved_bound(&u, &v, Target::Orthogonal).unwrap().radius;
            prop_assert!((midpoint_sum(&x, &y) - s).norm() <= r + 1e-14);
        }
    }
}
