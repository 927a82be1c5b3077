//! Points of `ℂPᴺ` and the two standard distances on it.
//!
//! The Fubini–Study distance `d_FS` is the conceptually right one, but the
//! chordal distance `d = sin(√π · d_FS) = |u∧v|/(|u||v|)` is far more
//! convenient in estimates, and the two are Lipschitz equivalent.  All curve
//! metrics in this crate are built on the chordal distance.

use num_complex::Complex64;

use crate::error::{BrodyError, Result};

/// A point of `ℂPᴺ` in homogeneous coordinates, normalized so the
/// largest-modulus entry has modulus one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    homog: Vec<Complex64>,
}

impl ProjectivePoint {
    /// Build a point from any nonzero representative.
    pub fn new(homog: Vec<Complex64>) -> Result<Self> {
        if homog.len() < 2 {
            return Err(BrodyError::InvalidCurve(
                "projective point needs at least 2 homogeneous coordinates".into(),
            ));
        }
        let max = homog.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if max == 0.0 || !max.is_finite() {
            return Err(BrodyError::InvalidCurve(
                "homogeneous coordinates must be nonzero and finite".into(),
            ));
        }
        Ok(ProjectivePoint {
            homog: homog.iter().map(|&c| c / max).collect(),
        })
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        ProjectivePoint::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The affine point `[1 : z]` of `ℂP¹`.
    pub fn from_affine(z: Complex64) -> Self {
        ProjectivePoint::new(vec![Complex64::new(1.0, 0.0), z]).unwrap()
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.homog.len() - 1
    }

    pub fn homog(&self) -> &[Complex64] {
        &self.homog
    }

    fn norm(&self) -> f64 {
        self.homog.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn inner(&self, other: &ProjectivePoint) -> Complex64 {
        self.homog
            .iter()
            .zip(&other.homog)
            .map(|(a, b)| a * b.conj())
            .sum()
    }
}

/// Chordal distance `d([u],[v]) = |u ∧ v| / (|u| |v|)`, with values in `[0,1]`.
///
/// The wedge norm is summed componentwise,
/// `|u∧v|² = Σ_{i<j} |u_i v_j − u_j v_i|²`, rather than obtained from
/// `|u|²|v|² − |⟨u,v⟩|²`: the subtraction form loses half the significant
/// digits when the points are close, the componentwise form does not.
pub fn chordal_distance(u: &ProjectivePoint, v: &ProjectivePoint) -> f64 {
    let mut wedge_sq = 0.0;
    for i in 0..u.homog.len() {
        for j in (i + 1)..u.homog.len() {
            wedge_sq += (u.homog[i] * v.homog[j] - u.homog[j] * v.homog[i]).norm_sqr();
        }
    }
    (wedge_sq.sqrt() / (u.norm() * v.norm())).min(1.0)
}

/// Fubini–Study distance `(1/√π) arccos(|⟨u,v⟩| / (|u||v|))`,
/// with values in `[0, √π/2]`.
pub fn fs_distance(u: &ProjectivePoint, v: &ProjectivePoint) -> f64 {
    let ip = (u.inner(v).norm() / (u.norm() * v.norm())).clamp(0.0, 1.0);
    ip.acos() / std::f64::consts::PI.sqrt()
}
