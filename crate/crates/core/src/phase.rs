use serde::{Deserialize, Serialize};

use crate::linalg::{cis_turns, Complex, Vector6, INV_SQRT6};

/// A unit vector `(1/sqrt 6)(1, e^{2 i pi p1}, ..., e^{2 i pi p5})`, stored as
/// its five phases in turns. Fixing the first coordinate to be real positive
/// picks one representative of each ray.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    phases: [f64; 5],
}

/// Reduces `x` mod 1 into `[0, 1)`, snapping values within 1e-12 of 1 to 0.
pub fn wrap_turns(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r > 1.0 - 1e-12 {
        0.0
    } else {
        r
    }
}

/// Signed distance of `x` to the nearest integer, in `[-1/2, 1/2]`.
pub fn circular_offset(x: f64) -> f64 {
    x - x.round()
}

impl PhaseVector {
    pub fn new(phases: [f64; 5]) -> Self {
        Self { phases: phases.map(wrap_turns) }
    }

    /// Rescales `v` so its first coordinate is real positive and reads off
    /// the phases of the remaining coordinates. The moduli are discarded.
    pub fn from_vector(v: &Vector6) -> Self {
        let gauge = v[0].conj() / v[0].norm();
        Self::new(std::array::from_fn(|k| {
            let z = v[k + 1] * gauge;
            z.im.atan2(z.re) / std::f64::consts::TAU
        }))
    }

    pub fn phases(&self) -> &[f64; 5] {
        &self.phases
    }

    pub fn to_vector(&self) -> Vector6 {
        let mut v = [Complex::new(INV_SQRT6, 0.0); 6];
        for (k, p) in self.phases.iter().enumerate() {
            v[k + 1] = cis_turns(*p) * INV_SQRT6;
        }
        v
    }

    /// The conjugate ray.
    pub fn conj(&self) -> Self {
        Self::new(self.phases.map(|p| -p))
    }

    /// Largest component-wise circular distance, in turns.
    pub fn distance(&self, other: &Self) -> f64 {
        self.phases
            .iter()
            .zip(&other.phases)
            .map(|(a, b)| circular_offset(a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Lexicographic order on the stored phases.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.phases
            .iter()
            .zip(&other.phases)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}
