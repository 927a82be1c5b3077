//! Plane lattices and the Weierstrass elliptic functions `℘`, `℘′`.
//!
//! Doubly periodic curves are the workhorse of the ρ-search: an elliptic
//! function of degree `m` over a cell of area `A` contributes energy density
//! `m/A`, so low-degree `℘`-expressions give controllable positive-density
//! Brody curves after normalization.
//!
//! Evaluation strategy: reduce `z` modulo the lattice to the representative
//! nearest the origin, evaluate the Laurent series
//! `℘(z) = z⁻² + Σ c_k z^{2k−2}` (whose coefficients obey a quadratic
//! recursion driven by `g₂, g₃`), and apply the duplication formula when the
//! reduced point falls outside the series' comfortable radius.  The lattice
//! invariants `g₂, g₃` come from the Eisenstein `q`-expansions `E₄, E₆`,
//! which converge geometrically; a truncated direct lattice sum serves as an
//! independent cross-check in the tests.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{BrodyError, Result};

/// Number of Laurent coefficients `c_2 .. c_{K+1}` kept for `℘`.
const SERIES_TERMS: usize = 30;
/// Series is used only for `|z| ≤ SERIES_RADIUS · |ω_min|`.
const SERIES_RADIUS: f64 = 0.35;
/// Points closer than this to a lattice point are reported as poles.
const POLE_TOL: f64 = 1e-12;

/// A lattice `Γ = ℤω₁ + ℤω₂ ⊂ ℂ` with `Im(ω₂/ω₁) > 0`.
#[derive(Debug, Clone)]
pub struct PlaneLattice {
    omega1: Complex64,
    omega2: Complex64,
    cell_area: f64,
    g2: Complex64,
    g3: Complex64,
    /// Laurent coefficients `c_2, c_3, ...` of `℘` around the origin.
    laurent: Vec<Complex64>,
    /// Shortest nonzero lattice vector length.
    min_norm: f64,
}

impl PlaneLattice {
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        let ratio = omega2 / omega1;
        if !(ratio.im > 0.0) || !ratio.im.is_finite() {
            return Err(BrodyError::InvalidDomain(
                "lattice generators need Im(omega2/omega1) > 0".into(),
            ));
        }
        let cell_area = (omega1.conj() * omega2).im.abs();
        let (g2, g3) = invariants(omega1, omega2);
        let laurent = laurent_coefficients(g2, g3);
        let mut min_norm = f64::INFINITY;
        for m in -3i32..=3 {
            for n in -3i32..=3 {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = omega1 * m as f64 + omega2 * n as f64;
                min_norm = min_norm.min(w.norm());
            }
        }
        Ok(PlaneLattice {
            omega1,
            omega2,
            cell_area,
            g2,
            g3,
            laurent,
            min_norm,
        })
    }

    /// Rectangular lattice `a(ℤ) + ib(ℤ)`.
    pub fn rectangular(a: f64, b: f64) -> Result<Self> {
        PlaneLattice::new(Complex64::new(a, 0.0), Complex64::new(0.0, b))
    }

    /// Square lattice of side `a`.
    pub fn square(a: f64) -> Result<Self> {
        PlaneLattice::rectangular(a, a)
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    /// The invariants of `(℘′)² = 4℘³ − g₂℘ − g₃`.
    pub fn g_invariants(&self) -> (Complex64, Complex64) {
        (self.g2, self.g3)
    }

    /// The representative of `z` modulo `Γ` nearest to the origin.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        // Coordinates of z in the (omega1, omega2) basis.
        let det = self.omega1.re * self.omega2.im - self.omega1.im * self.omega2.re;
        let s = (z.re * self.omega2.im - z.im * self.omega2.re) / det;
        let t = (self.omega1.re * z.im - self.omega1.im * z.re) / det;
        let mut best = z - self.omega1 * s.round() - self.omega2 * t.round();
        // The rounded point is not always the closest for skew bases;
        // probe the neighboring lattice points.
        for dm in -1i32..=1 {
            for dn in -1i32..=1 {
                let cand = best - self.omega1 * dm as f64 - self.omega2 * dn as f64;
                if cand.norm() < best.norm() {
                    best = cand;
                }
            }
        }
        best
    }

    /// Weierstrass `℘(z)` and `℘′(z)`.
    ///
    /// Errors when `z` is within `1e−12` of a lattice point (a pole of `℘`).
    pub fn weierstrass_p(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let zr = self.reduce(z);
        if zr.norm() < POLE_TOL * self.min_norm.max(1.0) {
            return Err(BrodyError::LatticePole(z, POLE_TOL));
        }
        let limit = SERIES_RADIUS * self.min_norm;
        let mut doublings = 0u32;
        let mut u = zr;
        while u.norm() > limit {
            u /= 2.0;
            doublings += 1;
        }
        let (mut x, mut y) = self.series_eval(u);
        for _ in 0..doublings {
            let (x2, y2) = self.duplicate(x, y);
            x = x2;
            y = y2;
        }
        Ok((x, y))
    }

    /// Laurent series at the reduced point (valid for small `|z|`).
    fn series_eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let z2 = z * z;
        let mut p = 1.0 / z2;
        let mut dp = -2.0 / (z2 * z);
        // c_k z^{2k-2} terms, k = 2, 3, ...
        let mut pow = z2; // z^{2k-2} at k = 2
        for (i, &c) in self.laurent.iter().enumerate() {
            let k = (i + 2) as f64;
            p += c * pow;
            dp += c * (2.0 * k - 2.0) * pow / z;
            pow *= z2;
        }
        (p, dp)
    }

    /// Duplication step `(℘(u), ℘′(u)) → (℘(2u), ℘′(2u))`.
    fn duplicate(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        let b = 6.0 * x * x - self.g2 / 2.0; // ℘″(u)
        let x2 = (b * b) / (4.0 * y * y) - 2.0 * x;
        let y2 = 3.0 * b * x / y - b * b * b / (4.0 * y * y * y) - y;
        (x2, y2)
    }
}

/// `g₂, g₃` from the Eisenstein series `E₄, E₆` in the nome `q = e^{2πiτ}`.
fn invariants(omega1: Complex64, omega2: Complex64) -> (Complex64, Complex64) {
    // Work with tau of largest imaginary part reachable by the swap
    // (omega1, omega2) -> (omega2, -omega1), which keeps the lattice.
    let (w1, _w2, tau) = {
        let tau = omega2 / omega1;
        if tau.im < 1.0 {
            let t2 = -omega1 / omega2;
            if t2.im > tau.im {
                (omega2, -omega1, t2)
            } else {
                (omega1, omega2, tau)
            }
        } else {
            (omega1, omega2, tau)
        }
    };
    let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = q;
    for n in 1..=60u32 {
        let nf = n as f64;
        let frac = qn / (1.0 - qn);
        e4 += 240.0 * nf.powi(3) * frac;
        e6 -= 504.0 * nf.powi(5) * frac;
        qn *= q;
        if qn.norm() < 1e-30 {
            break;
        }
    }
    let w1_4 = (w1 * w1) * (w1 * w1);
    let g2 = e4 * (4.0 * PI.powi(4) / 3.0) / w1_4;
    let g3 = e6 * (8.0 * PI.powi(6) / 27.0) / (w1_4 * w1 * w1);
    (g2, g3)
}

/// Coefficients `c_2, c_3, ...` of `℘(z) = z⁻² + Σ c_k z^{2k−2}`.
fn laurent_coefficients(g2: Complex64, g3: Complex64) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); SERIES_TERMS];
    c[0] = g2 / 20.0; // c_2
    c[1] = g3 / 28.0; // c_3
    for k in 4..SERIES_TERMS + 2 {
        let mut sum = Complex64::new(0.0, 0.0);
        for m in 2..=k - 2 {
            sum += c[m - 2] * c[k - m - 2];
        }
        c[k - 2] = sum * 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64);
    }
    c
}

/// Direct truncated lattice sums for `g₂, g₃`; slow and only modestly
/// accurate, kept as an independent oracle for the `q`-series route.
pub fn invariants_by_lattice_sum(
    omega1: Complex64,
    omega2: Complex64,
    shells: i32,
) -> (Complex64, Complex64) {
    let mut s4 = Complex64::new(0.0, 0.0);
    let mut s6 = Complex64::new(0.0, 0.0);
    for m in -shells..=shells {
        for n in -shells..=shells {
            if m == 0 && n == 0 {
                continue;
            }
            let w = omega1 * m as f64 + omega2 * n as f64;
            let w2 = w * w;
            let w4 = w2 * w2;
            s4 += 1.0 / w4;
            s6 += 1.0 / (w4 * w2);
        }
    }
    (60.0 * s4, 140.0 * s6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_cell_point(lat: &PlaneLattice, rng: &mut impl Rng) -> Complex64 {
        // Stay away from the pole at the origin.
        loop {
            let s: f64 = rng.gen_range(-0.5..0.5);
            let t: f64 = rng.gen_range(-0.5..0.5);
            let z = lat.omega1() * s + lat.omega2() * t;
            if lat.reduce(z).norm() > 0.05 * lat.omega1().norm() {
                return z;
            }
        }
    }

    #[test]
    fn double_periodicity() {
        let lat = PlaneLattice::rectangular(1.0, 1.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let z = random_cell_point(&lat, &mut rng);
            let (p, dp) = lat.weierstrass_p(z).unwrap();
            for w in [lat.omega1(), lat.omega2(), lat.omega1() + lat.omega2()] {
                let (p2, dp2) = lat.weierstrass_p(z + w).unwrap();
                assert!(
                    (p - p2).norm() <= 1e-9 * p.norm().max(1.0),
                    "periodicity violated at z={z}: {p} vs {p2}"
                );
                assert!((dp - dp2).norm() <= 1e-9 * dp.norm().max(1.0));
            }
        }
    }

    #[test]
    fn parity() {
        let lat = PlaneLattice::square(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = random_cell_point(&lat, &mut rng);
            let (p, dp) = lat.weierstrass_p(z).unwrap();
            let (pm, dpm) = lat.weierstrass_p(-z).unwrap();
            assert!((p - pm).norm() <= 1e-9 * p.norm().max(1.0));
            assert!((dp + dpm).norm() <= 1e-9 * dp.norm().max(1.0));
        }
    }

    #[test]
    fn differential_equation_residual() {
        for lat in [
            PlaneLattice::square(1.0).unwrap(),
            PlaneLattice::rectangular(1.0, 2.3).unwrap(),
            PlaneLattice::new(Complex64::new(1.0, 0.0), Complex64::new(0.4, 1.1)).unwrap(),
        ] {
            let (g2, g3) = lat.g_invariants();
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..100 {
                let z = random_cell_point(&lat, &mut rng);
                let (p, dp) = lat.weierstrass_p(z).unwrap();
                let lhs = dp * dp;
                let rhs = 4.0 * p * p * p - g2 * p - g3;
                let scale = lhs.norm().max(rhs.norm()).max(1.0);
                assert!(
                    (lhs - rhs).norm() <= 1e-8 * scale,
                    "residual {} at z={}",
                    (lhs - rhs).norm() / scale,
                    z
                );
            }
        }
    }

    #[test]
    fn square_lattice_g3_vanishes() {
        let lat = PlaneLattice::square(1.0).unwrap();
        let (_, g3) = lat.g_invariants();
        assert!(g3.norm() < 1e-8, "g3 = {g3}");
        // Cross-check against the direct lattice-sum truncation.
        let (_, g3_sum) = invariants_by_lattice_sum(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            80,
        );
        assert!(g3_sum.norm() < 1e-8);
    }

    #[test]
    fn q_series_matches_lattice_sum() {
        let (w1, w2) = (Complex64::new(1.0, 0.0), Complex64::new(0.3, 1.4));
        let lat = PlaneLattice::new(w1, w2).unwrap();
        let (g2, g3) = lat.g_invariants();
        let (g2s, g3s) = invariants_by_lattice_sum(w1, w2, 120);
        assert!((g2 - g2s).norm() < 2e-3 * g2.norm().max(1.0), "{g2} vs {g2s}");
        assert!((g3 - g3s).norm() < 2e-3 * g3.norm().max(1.0), "{g3} vs {g3s}");
    }

    #[test]
    fn pole_detection() {
        let lat = PlaneLattice::square(1.0).unwrap();
        assert!(matches!(
            lat.weierstrass_p(Complex64::new(1.0, 1.0)),
            Err(BrodyError::LatticePole(..))
        ));
    }
}
