//! Scalar elliptic PDE machinery on flat tori.
//!
//! The central operation solves `(−Δ + 1)φ = ψ` spectrally: on the torus
//! `ℂ/Γ` the plane wave `e^{2πi(pu+qv)}` (in cell coordinates `(u,v)`) is an
//! eigenfunction of `−Δ+1` with eigenvalue `1 + 4π²|p b₁ + q b₂|²`, where
//! `b₁, b₂` is the dual basis of the lattice.  The solver is therefore exact
//! for band-limited fields, and the classical bound
//!
//! ```text
//! ‖φ‖_∞ ≤ 4 ‖(−Δ+1)φ‖_∞
//! ```
//!
//! can be checked sample by sample.
//!
//! The same grid machinery carries the curvature field of a holomorphic
//! curve, `tr Θ = π(N+1)|df|²`, and its Chern integral
//! `(1/π)∫_cell tr Θ = (N+1)∫_cell |df|²`, which is an integer (the degree of
//! the pullback bundle per cell) for doubly periodic curves.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::curve::{DerivativeMethod, HoloCurve};
use crate::domain::Domain;
use crate::error::{BrodyError, Result};
use crate::field::{FieldGeometry, ScalarField};
use crate::lattice::PlaneLattice;

// ---------------------------------------------------------------------------
// 2-D FFT plumbing
// ---------------------------------------------------------------------------

fn fft2(data: &mut [Complex64], n: usize, m: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for j in 0..m {
        row_fft.process(&mut data[j * n..(j + 1) * n]);
    }
    let col_fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..n {
        for j in 0..m {
            col[j] = data[j * n + i];
        }
        col_fft.process(&mut col);
        for j in 0..m {
            data[j * n + i] = col[j];
        }
    }
}

fn signed_freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Dual basis `(b₁, b₂)` of the lattice: `⟨b_i, ω_j⟩ = δ_ij` (real pairing).
fn dual_basis(lat: &PlaneLattice) -> ((f64, f64), (f64, f64)) {
    let (w1, w2) = (lat.omega1(), lat.omega2());
    let det = w1.re * w2.im - w1.im * w2.re;
    ((w2.im / det, -w2.re / det), (-w1.im / det, w1.re / det))
}

fn torus_lattice(field: &ScalarField) -> Result<PlaneLattice> {
    match field.geometry() {
        FieldGeometry::Torus(lat) => Ok(lat.clone()),
        _ => Err(BrodyError::NotTorus),
    }
}

/// Apply a frequency-space multiplier `(p, q) ↦ factor` to a torus field,
/// returning the real part of the filtered field.
fn spectral_filter(
    field: &ScalarField,
    factor: impl Fn(i64, i64) -> Complex64,
) -> Result<ScalarField> {
    let lat = torus_lattice(field)?;
    let (n, m) = field.dims();
    let mut data: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft2(&mut data, n, m, false);
    for j in 0..m {
        let q = signed_freq(j, m);
        for i in 0..n {
            let p = signed_freq(i, n);
            data[j * n + i] *= factor(p, q);
        }
    }
    fft2(&mut data, n, m, true);
    let scale = 1.0 / (n * m) as f64;
    ScalarField::new(
        FieldGeometry::Torus(lat),
        n,
        m,
        data.iter().map(|c| c.re * scale).collect(),
    )
}

// ---------------------------------------------------------------------------
// Helmholtz solve and C¹ norms
// ---------------------------------------------------------------------------

/// Squared physical frequency `|p b₁ + q b₂|²` for a mode.
fn freq_norm_sqr(lat: &PlaneLattice, p: i64, q: i64) -> f64 {
    let (b1, b2) = dual_basis(lat);
    let kx = p as f64 * b1.0 + q as f64 * b2.0;
    let ky = p as f64 * b1.1 + q as f64 * b2.1;
    kx * kx + ky * ky
}

/// Solve `(−Δ+1)φ = ψ` on the torus.
pub fn solve_helmholtz(psi: &ScalarField) -> Result<ScalarField> {
    let lat = torus_lattice(psi)?;
    spectral_filter(psi, |p, q| {
        Complex64::new(1.0 / (1.0 + 4.0 * PI * PI * freq_norm_sqr(&lat, p, q)), 0.0)
    })
}

/// Apply the discrete `(−Δ+1)` spectrally; inverse of [`solve_helmholtz`].
pub fn apply_helmholtz(phi: &ScalarField) -> Result<ScalarField> {
    let lat = torus_lattice(phi)?;
    spectral_filter(phi, |p, q| {
        Complex64::new(1.0 + 4.0 * PI * PI * freq_norm_sqr(&lat, p, q), 0.0)
    })
}

/// Grid sup of `|∇ψ|` by spectral differentiation.
pub fn gradient_sup(psi: &ScalarField) -> Result<f64> {
    let lat = torus_lattice(psi)?;
    let (b1, b2) = dual_basis(&lat);
    let gx = spectral_filter(psi, |p, q| {
        Complex64::new(0.0, 2.0 * PI * (p as f64 * b1.0 + q as f64 * b2.0))
    })?;
    let gy = spectral_filter(psi, |p, q| {
        Complex64::new(0.0, 2.0 * PI * (p as f64 * b1.1 + q as f64 * b2.1))
    })?;
    Ok(gx
        .values()
        .iter()
        .zip(gy.values())
        .map(|(&x, &y)| (x * x + y * y).sqrt())
        .fold(0.0f64, f64::max))
}

/// Discrete `C¹` norm: `sup|ψ| + sup|∇ψ|`.
pub fn c1_norm(psi: &ScalarField) -> Result<f64> {
    Ok(psi.sup_norm() + gradient_sup(psi)?)
}

// ---------------------------------------------------------------------------
// Function nondegeneracy and the empirical κ
// ---------------------------------------------------------------------------

/// Witness for [`is_function_nondegenerate`]: a center and a lower bound for
/// the grid-sup of `ψ` over its `R`-disk (exact sup when the check fails).
#[derive(Debug, Clone)]
pub struct FunctionWitness {
    pub center: Complex64,
    pub sup: f64,
}

/// Is `sup_{D_R(a)} ψ ≥ 1/R²` for every grid point `a`?  Torus fields use
/// periodic wraparound distances.
pub fn is_function_nondegenerate(
    psi: &ScalarField,
    r: f64,
) -> Result<(bool, FunctionWitness)> {
    assert!(r > 0.0, "R must be positive");
    let threshold = 1.0 / (r * r);
    let (n, m) = psi.dims();
    let torus = match psi.geometry() {
        FieldGeometry::Torus(lat) => Some(lat.clone()),
        _ => None,
    };
    let dist = |a: Complex64, b: Complex64| -> f64 {
        match &torus {
            Some(lat) => lat.reduce(a - b).norm(),
            None => (a - b).norm(),
        }
    };
    // Points already above threshold; a is fine iff one of them is R-close.
    let mut good: Vec<Complex64> = Vec::new();
    for j in 0..m {
        for i in 0..n {
            if psi.get(i, j) >= threshold {
                good.push(psi.point(i, j));
            }
        }
    }
    // Worst center: the one farthest from the good set (ties to the first).
    let mut worst: Option<(f64, Complex64)> = None;
    let mut ok = true;
    for j in 0..m {
        for i in 0..n {
            // Self-check first: a point at or above threshold passes alone.
            if psi.get(i, j) >= threshold {
                continue;
            }
            let a = psi.point(i, j);
            let nearest = good
                .iter()
                .map(|&g| dist(a, g))
                .fold(f64::INFINITY, f64::min);
            if nearest <= r {
                continue;
            }
            ok = false;
            if worst.as_ref().map_or(true, |&(d, _)| nearest > d) {
                worst = Some((nearest, a));
            }
        }
    }
    let witness = match worst {
        Some((_, a)) => {
            // Exact grid-sup over the worst center's disk, for the report.
            let mut sup = f64::NEG_INFINITY;
            for jj in 0..m {
                for ii in 0..n {
                    if dist(a, psi.point(ii, jj)) <= r {
                        sup = sup.max(psi.get(ii, jj));
                    }
                }
            }
            FunctionWitness { center: a, sup }
        }
        None => FunctionWitness {
            center: psi.point(0, 0),
            sup: threshold,
        },
    };
    Ok((ok, witness))
}

/// Result of an empirical κ(K, R) estimation run.
///
/// `kappa_hat` is the minimum over admissible samples of `inf φ`; it is an
/// empirical *upper* bound for the true κ, and is reported as such.
#[derive(Debug, Clone)]
pub struct KappaEstimate {
    pub k: f64,
    pub r: f64,
    pub kappa_hat: f64,
    pub samples: usize,
    /// Description of the minimizing ψ sample.
    pub worst_case: String,
}

/// Random trig polynomial on the torus grid: frequencies up to `max_freq`
/// per axis, shifted so the field is nonnegative.
pub fn random_trig_field(
    lat: &PlaneLattice,
    n: usize,
    m: usize,
    max_freq: i64,
    rng: &mut impl Rng,
) -> Result<ScalarField> {
    let f = max_freq;
    let mut modes: Vec<(i64, i64, f64, f64)> = Vec::new();
    for p in -f..=f {
        for q in -f..=f {
            if p == 0 && q == 0 {
                continue;
            }
            // Amplitudes fall off with frequency to keep the field smooth.
            let fall = 1.0 / (1.0 + (p * p + q * q) as f64);
            modes.push((
                p,
                q,
                rng.gen_range(-1.0..1.0) * fall,
                rng.gen_range(-1.0..1.0) * fall,
            ));
        }
    }
    let raw = ScalarField::from_fn(FieldGeometry::Torus(lat.clone()), n, m, |z| {
        let (b1, b2) = dual_basis(lat);
        let u = z.re * b1.0 + z.im * b1.1;
        let v = z.re * b2.0 + z.im * b2.1;
        modes
            .iter()
            .map(|&(p, q, a, b)| {
                let phase = 2.0 * PI * (p as f64 * u + q as f64 * v);
                a * phase.cos() + b * phase.sin()
            })
            .sum()
    })?;
    // Shift up so ψ ≥ 0.
    let min = raw.min();
    Ok(raw.map(|v| v - min))
}

/// Empirical κ(K, R): minimum of `inf φ` over `budget` admissible samples.
///
/// Admissible means `ψ ≥ 0`, `‖ψ‖_{C¹} ≤ K` and `R`-nondegenerate; samples
/// are drawn by rejection.  1000 consecutive rejections abort the run.
pub fn estimate_kappa(k: f64, r: f64, budget: usize, seed: u64) -> Result<KappaEstimate> {
    assert!(k > 0.0 && r > 0.0, "K and R must be positive");
    assert!(budget >= 10, "budget must be at least 10");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Torus comfortably larger than R so nondegeneracy is a real constraint.
    let side = (4.0 * r).max(4.0);
    let lat = PlaneLattice::square(side)?;
    let n = 64usize;
    let mut kappa_hat = f64::INFINITY;
    let mut worst_case = String::new();
    let mut accepted = 0usize;
    let mut consecutive_failures = 0usize;
    let threshold = 1.0 / (r * r);
    if k < threshold {
        // Even the constant field ψ ≡ 1/R² would overshoot the C¹ budget.
        return Err(BrodyError::SamplingInfeasible(0));
    }
    while accepted < budget {
        let raw = random_trig_field(&lat, n, n, 6, &mut rng)?;
        // Split the C¹ budget between a constant floor at or above the
        // nondegeneracy threshold and a scaled oscillation on top of it;
        // both ψ ≥ 0 and R-nondegeneracy then hold by construction, and are
        // still re-checked below.
        let floor = threshold + (k - threshold) * 0.5 * rng.gen_range(0.0..1.0);
        let osc_budget = k - floor;
        let c1 = c1_norm(&raw)?;
        let psi = if c1 > 0.0 {
            let s = 0.95 * osc_budget / c1;
            raw.map(|v| floor + v * s)
        } else {
            raw.map(|v| floor + v)
        };
        let admissible = psi.min() >= 0.0
            && c1_norm(&psi)? <= k
            && is_function_nondegenerate(&psi, r)?.0;
        if !admissible {
            consecutive_failures += 1;
            if consecutive_failures >= 1000 {
                return Err(BrodyError::SamplingInfeasible(consecutive_failures));
            }
            continue;
        }
        consecutive_failures = 0;
        accepted += 1;
        let phi = solve_helmholtz(&psi)?;
        let inf = phi.min();
        if inf < kappa_hat {
            kappa_hat = inf;
            worst_case = format!(
                "sample {} of seed {}: sup psi = {:.6}, inf phi = {:.6}",
                accepted,
                seed,
                psi.sup_norm(),
                inf
            );
        }
    }
    Ok(KappaEstimate {
        k,
        r,
        kappa_hat,
        samples: accepted,
        worst_case,
    })
}

// ---------------------------------------------------------------------------
// Curvature fields, Chern integrals, sampling points
// ---------------------------------------------------------------------------

/// The curvature trace field `tr Θ = π(N+1)|df|²` sampled over the domain.
pub fn curvature_field(f: &HoloCurve, cell: &Domain, resolution: f64) -> Result<ScalarField> {
    let scale = PI * (f.ambient_dim() as f64 + 1.0);
    let sample = |z: Complex64| -> f64 {
        let d = f
            .spherical_derivative(z, DerivativeMethod::ClosedForm)
            .unwrap_or(0.0);
        scale * d * d
    };
    match cell {
        Domain::Cell(lat) => {
            let n = ((lat.omega1().norm() / resolution).ceil() as usize).max(8);
            let m = ((lat.omega2().norm() / resolution).ceil() as usize).max(8);
            ScalarField::from_fn(FieldGeometry::Torus(lat.clone()), n, m, sample)
        }
        other => {
            let (corner, w, h) = other.bounding_box();
            let n = ((w / resolution).ceil() as usize).max(8);
            let m = ((h / resolution).ceil() as usize).max(8);
            ScalarField::from_fn(
                FieldGeometry::Rect {
                    corner,
                    width: w,
                    height: h,
                },
                n,
                m,
                sample,
            )
        }
    }
}

/// `(1/π)∫_cell tr Θ = (N+1)∫_cell |df|²` on an `n×n` midpoint grid.
///
/// For a doubly periodic curve the value is the per-cell degree of the
/// pullback bundle, an integer up to quadrature error.
pub fn chern_integral(f: &HoloCurve, gamma: &PlaneLattice, n: usize) -> Result<f64> {
    if f.period_lattice().is_none() {
        return Err(BrodyError::NotElliptic);
    }
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            let z = gamma.omega1() * ((i as f64 + 0.5) / n as f64)
                + gamma.omega2() * ((j as f64 + 0.5) / n as f64);
            let d = f
                .spherical_derivative(z, DerivativeMethod::ClosedForm)
                .unwrap_or(0.0);
            sum += d * d;
        }
    }
    Ok((f.ambient_dim() as f64 + 1.0) * sum * gamma.cell_area() / (n * n) as f64)
}

/// Minimal uniform `⌈side/δ⌉ × ⌈side/δ⌉` grid of cell centers that is
/// δ-dense in the square.
pub fn select_sampling_points(square: &Domain, delta: f64) -> Result<Vec<Complex64>> {
    if delta <= 0.0 {
        return Err(BrodyError::InvalidDomain("delta must be positive".into()));
    }
    let Domain::Square { corner, side } = square else {
        return Err(BrodyError::InvalidDomain(
            "sampling points are defined on squares".into(),
        ));
    };
    if delta > *side {
        return Err(BrodyError::InvalidDomain(
            "delta must not exceed the side length".into(),
        ));
    }
    let k = (side / delta).ceil() as usize;
    let step = side / k as f64;
    let mut pts = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k {
            pts.push(corner + Complex64::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step));
        }
    }
    Ok(pts)
}
