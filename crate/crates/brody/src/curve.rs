//! Holomorphic curves `ℂ → ℂPᴺ` and their spherical derivative.
//!
//! Every curve is evaluated in homogeneous coordinates: a curve yields a
//! nonzero vector `f(z) ∈ ℂ^{N+1}` of component values together with the
//! componentwise derivative `f′(z)`.  All derived quantities are built from
//! projectively invariant combinations, so poles of affine charts never need
//! special handling.  In particular the spherical derivative is
//!
//! ```text
//! |df|(z) = |f(z) ∧ f′(z)| / (√π |f(z)|²),
//! ```
//!
//! which reduces to the familiar `√(|F′|² + |F∧F′|²) / (√π (1+|F|²))` in the
//! chart `f = [1:F]` and is invariant under rescaling the representative.
//!
//! Curve kinds: `rational` (polynomial components), `elliptic` (low-degree
//! expressions in `℘, ℘′` over a lattice), `transformed` (affine
//! substitution `z ↦ αz+β`), and `bubbled` (a rational bubble glued in the
//! chart of a target point; see [`crate::blowup`]).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::domain::Domain;
use crate::error::{BrodyError, Result};
use crate::geometry::ProjectivePoint;
use crate::lattice::PlaneLattice;
use crate::poly::Poly;

/// One homogeneous component of an elliptic curve: a coefficient table over
/// the monomials `℘^i (℘′)^j` with `i ≤ 3`, `j ≤ 1` (plus the constant).
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticExpr {
    /// `(i, j, coefficient)` with `i ≤ 3`, `j ≤ 1`.
    pub terms: Vec<(u8, u8, Complex64)>,
}

impl EllipticExpr {
    pub fn new(terms: Vec<(u8, u8, Complex64)>) -> Result<Self> {
        for &(i, j, _) in &terms {
            if i > 3 || j > 1 {
                return Err(BrodyError::InvalidCurve(format!(
                    "elliptic monomial p^{i} p'^{j} out of range (i <= 3, j <= 1)"
                )));
            }
        }
        Ok(EllipticExpr { terms })
    }

    pub fn constant(c: Complex64) -> Self {
        EllipticExpr {
            terms: vec![(0, 0, c)],
        }
    }

    /// Value and `z`-derivative given `(℘, ℘′, ℘″)` at the point.
    fn eval(&self, p: Complex64, dp: Complex64, ddp: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &(i, j, c) in &self.terms {
            let pi = p.powu(i as u32);
            let pj = if j == 1 { dp } else { Complex64::new(1.0, 0.0) };
            v += c * pi * pj;
            // d/dz [℘^i ℘'^j] = i ℘^{i-1} ℘' ℘'^j + j ℘^i ℘''  (j ≤ 1)
            let mut term = Complex64::new(0.0, 0.0);
            if i > 0 {
                term += p.powu(i as u32 - 1) * (i as f64) * dp * pj;
            }
            if j == 1 {
                term += pi * ddp;
            }
            d += c * term;
        }
        (v, d)
    }

    /// Coefficient vector over the 8 monomials, used for rank checks.
    fn coeff_vector(&self) -> [Complex64; 8] {
        let mut v = [Complex64::new(0.0, 0.0); 8];
        for &(i, j, c) in &self.terms {
            v[(i as usize) * 2 + j as usize] += c;
        }
        v
    }
}

#[derive(Debug, Clone)]
enum CurveRepr {
    Rational(Vec<Poly>),
    Elliptic {
        lattice: PlaneLattice,
        components: Vec<EllipticExpr>,
    },
    Affine {
        base: Box<HoloCurve>,
        alpha: Complex64,
        beta: Complex64,
    },
    /// `f̂ = U [ s·w₀ : s·w₁ + a·w₀ : … ]` where `w = U f`, `s = (z−p)³` and
    /// `U` is the (self-inverse) Householder unitary sending the target
    /// point to `[1:0:…:0]`.
    Bubbled {
        base: Box<HoloCurve>,
        unitary: Vec<Vec<Complex64>>,
        p: Complex64,
        a: f64,
    },
}

/// An evaluable holomorphic map `ℂ → ℂPᴺ` with derivative access.
#[derive(Debug, Clone)]
pub struct HoloCurve {
    repr: CurveRepr,
    n: usize,
}

/// Spherical-derivative evaluation method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMethod {
    /// Wedge-product formula; exact up to rounding.
    ClosedForm,
    /// Five-point stencil for `(1/4π) Δ log Σ|f_i|²` with step `h`.
    Laplacian(f64),
}

impl HoloCurve {
    /// Rational curve `[f₀ : … : f_N]` with polynomial components.
    ///
    /// Components sharing a common polynomial factor are rejected.
    pub fn rational(components: Vec<Poly>) -> Result<Self> {
        if components.len() < 2 {
            return Err(BrodyError::InvalidCurve(
                "need at least 2 homogeneous components".into(),
            ));
        }
        if components.iter().all(|p| p.is_zero()) {
            return Err(BrodyError::InvalidCurve("all components are zero".into()));
        }
        let mut gcd = Poly::zero();
        for c in &components {
            if !c.is_zero() {
                gcd = if gcd.is_zero() {
                    c.clone()
                } else {
                    Poly::gcd(&gcd, c)
                };
            }
        }
        if gcd.degree() >= 1 {
            return Err(BrodyError::CommonFactor(gcd.degree()));
        }
        let n = components.len() - 1;
        Ok(HoloCurve {
            repr: CurveRepr::Rational(components),
            n,
        })
    }

    /// Constant curve at a projective point.
    pub fn constant(q: &ProjectivePoint) -> Self {
        let comps = q.homog().iter().map(|&c| Poly::constant(c)).collect();
        HoloCurve {
            n: q.ambient_dim(),
            repr: CurveRepr::Rational(comps),
        }
    }

    /// Doubly periodic curve with components polynomial in `(℘, ℘′)`.
    pub fn elliptic(lattice: PlaneLattice, components: Vec<EllipticExpr>) -> Result<Self> {
        if components.len() < 2 {
            return Err(BrodyError::InvalidCurve(
                "need at least 2 homogeneous components".into(),
            ));
        }
        if components
            .iter()
            .all(|c| c.coeff_vector().iter().all(|x| x.norm() == 0.0))
        {
            return Err(BrodyError::InvalidCurve("all components are zero".into()));
        }
        let n = components.len() - 1;
        Ok(HoloCurve {
            repr: CurveRepr::Elliptic {
                lattice,
                components,
            },
            n,
        })
    }

    /// The curve `z ↦ f(αz + β)`, `α ≠ 0`.
    pub fn transformed(base: HoloCurve, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if alpha.norm() == 0.0 {
            return Err(BrodyError::InvalidCurve("alpha must be nonzero".into()));
        }
        let n = base.n;
        Ok(HoloCurve {
            repr: CurveRepr::Affine {
                base: Box::new(base),
                alpha,
                beta,
            },
            n,
        })
    }

    pub(crate) fn bubbled(
        base: HoloCurve,
        unitary: Vec<Vec<Complex64>>,
        p: Complex64,
        a: f64,
    ) -> Self {
        let n = base.n;
        HoloCurve {
            repr: CurveRepr::Bubbled {
                base: Box::new(base),
                unitary,
                p,
                a,
            },
            n,
        }
    }

    /// Ambient projective dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// The lattice of periods, if the curve is doubly periodic.
    ///
    /// An affine substitution `z ↦ αz+β` of an elliptic curve is periodic
    /// over the rescaled lattice `Γ/α` (when `Γ/α` is again a plane lattice).
    pub fn period_lattice(&self) -> Option<PlaneLattice> {
        match &self.repr {
            CurveRepr::Elliptic { lattice, .. } => Some(lattice.clone()),
            CurveRepr::Affine { base, alpha, .. } => base.period_lattice().and_then(|lat| {
                let w1 = lat.omega1() / alpha;
                let w2 = lat.omega2() / alpha;
                PlaneLattice::new(w1, w2)
                    .or_else(|_| PlaneLattice::new(w2, w1))
                    .ok()
            }),
            _ => None,
        }
    }

    /// Raw homogeneous components and their derivatives at `z`.
    ///
    /// No per-point rescaling is applied, so values at nearby points share a
    /// representative; this is what the Laplacian stencil needs.
    pub fn eval_homog_raw(&self, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        match &self.repr {
            CurveRepr::Rational(comps) => {
                let mut v = Vec::with_capacity(comps.len());
                let mut d = Vec::with_capacity(comps.len());
                for c in comps {
                    let (val, der) = c.eval_with_derivative(z);
                    v.push(val);
                    d.push(der);
                }
                Ok((v, d))
            }
            CurveRepr::Elliptic {
                lattice,
                components,
            } => {
                // A lattice point is a common pole of the chart; evaluate at
                // a tiny offset, which is exact up to O(offset) projectively.
                let (p, dp) = match lattice.weierstrass_p(z) {
                    Ok(pd) => pd,
                    Err(BrodyError::LatticePole(..)) => {
                        let eps = 1e-9 * lattice.omega1().norm();
                        lattice.weierstrass_p(z + Complex64::new(eps, eps))?
                    }
                    Err(e) => return Err(e),
                };
                let (g2, _) = lattice.g_invariants();
                let ddp = 6.0 * p * p - g2 / 2.0;
                let mut v = Vec::with_capacity(components.len());
                let mut d = Vec::with_capacity(components.len());
                for c in components {
                    let (val, der) = c.eval(p, dp, ddp);
                    v.push(val);
                    d.push(der);
                }
                Ok((v, d))
            }
            CurveRepr::Affine { base, alpha, beta } => {
                let (v, d) = base.eval_homog_raw(alpha * z + beta)?;
                Ok((v, d.into_iter().map(|x| x * alpha).collect()))
            }
            CurveRepr::Bubbled {
                base,
                unitary,
                p,
                a,
            } => {
                let (v, d) = base.eval_homog(z)?;
                let w = apply_unitary(unitary, &v);
                let dw = apply_unitary(unitary, &d);
                let s = (z - p).powu(3);
                let ds = 3.0 * (z - p).powu(2);
                let mut u = Vec::with_capacity(w.len());
                let mut du = Vec::with_capacity(w.len());
                u.push(s * w[0]);
                du.push(ds * w[0] + s * dw[0]);
                for i in 1..w.len() {
                    u.push(s * w[i] + a * w[0]);
                    du.push(ds * w[i] + s * dw[i] + a * dw[0]);
                }
                Ok((apply_unitary(unitary, &u), apply_unitary(unitary, &du)))
            }
        }
    }

    /// Homogeneous components and derivatives, jointly rescaled when the
    /// values grow large (the rescale is projectively invisible).
    pub fn eval_homog(&self, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let (mut v, mut d) = self.eval_homog_raw(z)?;
        let max = v.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if max > 1e50 {
            let s = 1.0 / max;
            for c in v.iter_mut() {
                *c *= s;
            }
            for c in d.iter_mut() {
                *c *= s;
            }
        }
        Ok((v, d))
    }

    /// Evaluate the curve as a projective point.
    pub fn point(&self, z: Complex64) -> Result<ProjectivePoint> {
        let (v, _) = self.eval_homog(z)?;
        ProjectivePoint::new(v)
    }

    /// Spherical derivative `|df|(z)`.
    pub fn spherical_derivative(&self, z: Complex64, method: DerivativeMethod) -> Result<f64> {
        match method {
            DerivativeMethod::ClosedForm => {
                let (v, d) = self.eval_homog(z)?;
                Ok(spherical_from_homog(&v, &d))
            }
            DerivativeMethod::Laplacian(h) => {
                if h <= 0.0 {
                    return Err(BrodyError::InvalidCurve("stencil step must be positive".into()));
                }
                let log_norm = |w: Complex64| -> Result<f64> {
                    let (v, _) = self.eval_homog_raw(w)?;
                    let s: f64 = v.iter().map(|c| c.norm_sqr()).sum();
                    if s == 0.0 || !s.is_finite() {
                        return Err(BrodyError::InvalidCurve(format!(
                            "Laplacian stencil hit a common zero or overflow at z = {w}"
                        )));
                    }
                    Ok(s.ln())
                };
                let c = log_norm(z)?;
                let lap = (log_norm(z + Complex64::new(h, 0.0))?
                    + log_norm(z - Complex64::new(h, 0.0))?
                    + log_norm(z + Complex64::new(0.0, h))?
                    + log_norm(z - Complex64::new(0.0, h))?
                    - 4.0 * c)
                    / (h * h);
                Ok((lap / (4.0 * PI)).max(0.0).sqrt())
            }
        }
    }

    /// Whether the curve is constant (its image is a single point).
    pub fn is_constant(&self) -> bool {
        match &self.repr {
            CurveRepr::Rational(comps) => {
                let mat: Vec<Vec<Complex64>> =
                    comps.iter().map(|p| p.coeffs().to_vec()).collect();
                rank_at_most_one(&mat)
            }
            CurveRepr::Elliptic { components, .. } => {
                let mat: Vec<Vec<Complex64>> = components
                    .iter()
                    .map(|c| c.coeff_vector().to_vec())
                    .collect();
                rank_at_most_one(&mat)
            }
            CurveRepr::Affine { base, .. } => base.is_constant(),
            CurveRepr::Bubbled { .. } => false,
        }
    }

    /// Default sup-search box: one period cell for elliptic curves, a disk
    /// comfortably containing all roots of components and derivatives for
    /// rational ones.
    pub fn default_search_box(&self) -> Domain {
        if let Some(lat) = self.period_lattice() {
            return Domain::cell(lat);
        }
        let bound = self.root_bound();
        Domain::disk(Complex64::new(0.0, 0.0), 2.0 * (1.0 + bound)).unwrap()
    }

    fn root_bound(&self) -> f64 {
        match &self.repr {
            CurveRepr::Rational(comps) => comps
                .iter()
                .flat_map(|p| [p.root_bound(), p.derivative().root_bound()])
                .fold(0.0f64, f64::max),
            CurveRepr::Elliptic { lattice, .. } => {
                (lattice.omega1() + lattice.omega2()).norm()
            }
            CurveRepr::Affine { base, alpha, beta } => {
                (base.root_bound() + beta.norm()) / alpha.norm()
            }
            CurveRepr::Bubbled { base, p, .. } => base.root_bound().max(p.norm() + 2.0),
        }
    }
}

fn apply_unitary(u: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    u.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `|df| = |v ∧ v′| / (√π |v|²)` via `|v∧w|² = |v|²|w|² − |⟨v,w⟩|²`.
pub fn spherical_from_homog(v: &[Complex64], d: &[Complex64]) -> f64 {
    let nv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let nd: f64 = d.iter().map(|c| c.norm_sqr()).sum();
    let ip: Complex64 = v.iter().zip(d).map(|(a, b)| a * b.conj()).sum();
    let wedge_sq = (nv * nd - ip.norm_sqr()).max(0.0);
    wedge_sq.sqrt() / (PI.sqrt() * nv)
}

/// Sup of a function over a grid with two refinement passes (4x finer)
/// around the top 5 grid maximizers.  Returns `(sup, argmax)`.
pub fn refined_sup<F: Fn(Complex64) -> f64>(
    f: F,
    pts: &[Complex64],
    spacing: f64,
) -> (f64, Complex64) {
    let mut best: Vec<(f64, Complex64)> = pts.iter().map(|&z| (f(z), z)).collect();
    best.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    best.truncate(5);
    let mut h = spacing;
    for _ in 0..2 {
        h /= 4.0;
        let mut refined = Vec::new();
        for &(_, center) in &best {
            for j in -2i32..=2 {
                for i in -2i32..=2 {
                    let z = center + Complex64::new(i as f64 * h, j as f64 * h);
                    refined.push((f(z), z));
                }
            }
        }
        refined.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        refined.truncate(5);
        best = refined;
    }
    best[0]
}

/// `𝐝_A(f,g) = sup_{z∈A} d(f(z), g(z))` over a grid of spacing at most
/// `resolution`, refined once around the grid maximizer.
pub fn sup_distance(f: &HoloCurve, g: &HoloCurve, a: &Domain, resolution: f64) -> Result<f64> {
    let pts = a.grid(resolution)?;
    let dist = |z: Complex64| -> f64 {
        match (f.point(z), g.point(z)) {
            (Ok(p), Ok(q)) => crate::geometry::chordal_distance(&p, &q),
            _ => 0.0,
        }
    };
    let (sup, _) = refined_sup(dist, &pts, resolution);
    Ok(sup)
}

/// Grid estimate of `‖df‖_{L∞(A)}` with refinement; returns `(sup, argmax)`.
pub fn lipschitz_sup(f: &HoloCurve, a: &Domain, resolution: f64) -> Result<(f64, Complex64)> {
    let pts = a.grid(resolution)?;
    let eval = |z: Complex64| -> f64 {
        f.spherical_derivative(z, DerivativeMethod::ClosedForm)
            .unwrap_or(0.0)
    };
    Ok(refined_sup(eval, &pts, resolution))
}

/// Rescale a nonconstant curve to unit Lipschitz constant.
///
/// Returns `(g, λ)` with `λ` the estimated `‖df‖_∞` over the search box and
/// `g(z) = f(z/λ)`, whose sup spherical derivative is 1 up to the grid
/// estimation error.
pub fn brody_normalize(
    f: &HoloCurve,
    search_box: &Domain,
    resolution: f64,
) -> Result<(HoloCurve, f64)> {
    if f.is_constant() {
        return Err(BrodyError::ConstantCurve);
    }
    let (lambda, _) = lipschitz_sup(f, search_box, resolution)?;
    if lambda <= 0.0 {
        return Err(BrodyError::ConstantCurve);
    }
    let g = HoloCurve::transformed(
        f.clone(),
        Complex64::new(1.0 / lambda, 0.0),
        Complex64::new(0.0, 0.0),
    )?;
    Ok((g, lambda))
}

/// Witness data for a nondegeneracy check.
#[derive(Debug, Clone)]
pub struct NondegeneracyWitness {
    /// The center with the smallest found disk sup.
    pub worst_center: Complex64,
    /// The (lower-bound) sup of `|df|` over `D_R(worst_center)`.
    pub worst_sup: f64,
}

/// Is `f` `R`-nondegenerate over `Λ`: `‖df‖_{L∞(D_R(a))} ≥ 1/R` for every
/// grid point `a` of `Λ`?
///
/// The disk sup is searched on growing concentric sub-disks with early exit
/// once the threshold is reached, so large `R` stays affordable when the
/// answer is positive.
pub fn is_nondegenerate(
    f: &HoloCurve,
    r: f64,
    lambda_set: &Domain,
    resolution: f64,
) -> Result<(bool, NondegeneracyWitness)> {
    assert!(r > 0.0, "R must be positive");
    let threshold = 1.0 / r;
    let centers = lambda_set.grid(resolution)?;
    let eval = |z: Complex64| -> f64 {
        f.spherical_derivative(z, DerivativeMethod::ClosedForm)
            .unwrap_or(0.0)
    };
    let mut worst: Option<(f64, Complex64)> = None;
    let mut ok = true;
    for &a in &centers {
        // Growing disk radii; the witness for a nondegenerate curve usually
        // sits well inside D_R.
        let mut sup = 0.0f64;
        let mut radius = (r / 16.0).max(resolution);
        loop {
            let disk = Domain::disk(a, radius.min(r))?;
            let res = (radius / 12.0).min(resolution).max(radius / 48.0);
            if let Ok(pts) = disk.grid(res) {
                let (s, _) = refined_sup(eval, &pts, res);
                sup = sup.max(s);
            }
            if sup >= threshold || radius >= r {
                break;
            }
            radius *= 2.0;
        }
        if sup < threshold {
            ok = false;
        }
        if worst.map_or(true, |(w, _)| sup < w) {
            worst = Some((sup, a));
        }
    }
    let (worst_sup, worst_center) = worst.ok_or(BrodyError::EmptyDomain)?;
    Ok((
        ok,
        NondegeneracyWitness {
            worst_center,
            worst_sup,
        },
    ))
}

fn rank_at_most_one(mat: &[Vec<Complex64>]) -> bool {
    // Find the row of largest norm; every other row must be a multiple.
    let norms: Vec<f64> = mat
        .iter()
        .map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let Some((pivot, &pn)) = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
    else {
        return true;
    };
    if pn == 0.0 {
        return true;
    }
    let p = &mat[pivot];
    let width = mat.iter().map(|r| r.len()).max().unwrap_or(0);
    let get = |r: &Vec<Complex64>, k: usize| r.get(k).copied().unwrap_or_default();
    for row in mat {
        // Scale factor from the largest pivot entry.
        let (k, _) = (0..width)
            .map(|k| (k, get(p, k).norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let s = get(row, k) / get(p, k);
        for kk in 0..width {
            if (get(row, kk) - s * get(p, kk)).norm() > 1e-10 * pn.max(1.0) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Curve definition files
// ---------------------------------------------------------------------------

impl HoloCurve {
    /// Serialize a rational or elliptic curve to the plain-text definition
    /// format.  The float formatting is shortest-round-trip, so
    /// `parse(to_definition(f))` reproduces the curve exactly.
    pub fn to_definition(&self) -> Result<String> {
        let mut out = String::from("brody-curve v1\n");
        out.push_str(&format!("N {}\n", self.n));
        match &self.repr {
            CurveRepr::Rational(comps) => {
                out.push_str("kind rational\n");
                for c in comps {
                    out.push_str("component");
                    if c.is_zero() {
                        out.push_str(" 0 0");
                    }
                    for z in c.coeffs() {
                        out.push_str(&format!(" {} {}", z.re, z.im));
                    }
                    out.push('\n');
                }
            }
            CurveRepr::Elliptic {
                lattice,
                components,
            } => {
                out.push_str("kind elliptic\n");
                out.push_str(&format!(
                    "lattice {} {} {} {}\n",
                    lattice.omega1().re,
                    lattice.omega1().im,
                    lattice.omega2().re,
                    lattice.omega2().im
                ));
                for c in components {
                    out.push_str("component");
                    for &(i, j, z) in &c.terms {
                        out.push_str(&format!(" {} {} {} {}", i, j, z.re, z.im));
                    }
                    out.push('\n');
                }
            }
            _ => {
                return Err(BrodyError::InvalidCurve(
                    "only rational and elliptic curves have a file form".into(),
                ))
            }
        }
        Ok(out)
    }

    /// Parse the plain-text curve definition format.
    pub fn parse_definition(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| BrodyError::Parse("empty file".into()))?;
        if header != "brody-curve v1" {
            return Err(BrodyError::Parse(format!("bad header: {header}")));
        }
        let n_line = lines.next().ok_or_else(|| BrodyError::Parse("missing N".into()))?;
        let n: usize = n_line
            .strip_prefix("N ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| BrodyError::Parse(format!("bad N line: {n_line}")))?;
        let kind_line = lines
            .next()
            .ok_or_else(|| BrodyError::Parse("missing kind".into()))?;
        let kind = kind_line
            .strip_prefix("kind ")
            .ok_or_else(|| BrodyError::Parse(format!("bad kind line: {kind_line}")))?;
        let parse_floats = |s: &str| -> Result<Vec<f64>> {
            s.split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| BrodyError::Parse(format!("bad number: {t}")))
                })
                .collect()
        };
        match kind {
            "rational" => {
                let mut comps = Vec::new();
                for line in lines {
                    let body = line
                        .strip_prefix("component")
                        .ok_or_else(|| BrodyError::Parse(format!("expected component: {line}")))?;
                    let vals = parse_floats(body)?;
                    if vals.len() % 2 != 0 {
                        return Err(BrodyError::Parse(
                            "coefficients must come in re/im pairs".into(),
                        ));
                    }
                    let coeffs = vals
                        .chunks(2)
                        .map(|c| Complex64::new(c[0], c[1]))
                        .collect();
                    comps.push(Poly::new(coeffs));
                }
                if comps.len() != n + 1 {
                    return Err(BrodyError::Parse(format!(
                        "expected {} components, got {}",
                        n + 1,
                        comps.len()
                    )));
                }
                HoloCurve::rational(comps)
            }
            "elliptic" => {
                let lat_line = lines
                    .next()
                    .ok_or_else(|| BrodyError::Parse("missing lattice".into()))?;
                let body = lat_line
                    .strip_prefix("lattice")
                    .ok_or_else(|| BrodyError::Parse(format!("expected lattice: {lat_line}")))?;
                let v = parse_floats(body)?;
                if v.len() != 4 {
                    return Err(BrodyError::Parse("lattice needs 4 numbers".into()));
                }
                let lattice =
                    PlaneLattice::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))?;
                let mut comps = Vec::new();
                for line in lines {
                    let body = line
                        .strip_prefix("component")
                        .ok_or_else(|| BrodyError::Parse(format!("expected component: {line}")))?;
                    let vals: Vec<&str> = body.split_whitespace().collect();
                    if vals.len() % 4 != 0 {
                        return Err(BrodyError::Parse(
                            "elliptic terms are (i, j, re, im) quadruples".into(),
                        ));
                    }
                    let mut terms = Vec::new();
                    for q in vals.chunks(4) {
                        let i: u8 = q[0]
                            .parse()
                            .map_err(|_| BrodyError::Parse(format!("bad exponent: {}", q[0])))?;
                        let j: u8 = q[1]
                            .parse()
                            .map_err(|_| BrodyError::Parse(format!("bad exponent: {}", q[1])))?;
                        let re: f64 = q[2]
                            .parse()
                            .map_err(|_| BrodyError::Parse(format!("bad number: {}", q[2])))?;
                        let im: f64 = q[3]
                            .parse()
                            .map_err(|_| BrodyError::Parse(format!("bad number: {}", q[3])))?;
                        terms.push((i, j, Complex64::new(re, im)));
                    }
                    comps.push(EllipticExpr::new(terms)?);
                }
                if comps.len() != n + 1 {
                    return Err(BrodyError::Parse(format!(
                        "expected {} components, got {}",
                        n + 1,
                        comps.len()
                    )));
                }
                HoloCurve::elliptic(lattice, comps)
            }
            other => Err(BrodyError::Parse(format!("unknown kind: {other}"))),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geometry::chordal_distance;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `f = [1 : z]` on `ℂP¹`.
    fn identity_curve() -> HoloCurve {
        HoloCurve::rational(vec![Poly::from_real(&[1.0]), Poly::from_real(&[0.0, 1.0])]).unwrap()
    }

    pub(crate) fn random_rational(rng: &mut impl Rng, n: usize, deg: usize) -> HoloCurve {
        loop {
            let comps: Vec<Poly> = (0..=n)
                .map(|_| {
                    Poly::new(
                        (0..=deg)
                            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                            .collect(),
                    )
                })
                .collect();
            if let Ok(f) = HoloCurve::rational(comps) {
                return f;
            }
        }
    }

    #[test]
    fn spherical_derivative_of_identity() {
        let f = identity_curve();
        let at0 = f
            .spherical_derivative(c(0.0, 0.0), DerivativeMethod::ClosedForm)
            .unwrap();
        assert!((at0 - 1.0 / PI.sqrt()).abs() < 1e-14);
        let at1 = f
            .spherical_derivative(c(1.0, 0.0), DerivativeMethod::ClosedForm)
            .unwrap();
        assert!((at1 - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn constant_curve_has_zero_derivative() {
        let q = ProjectivePoint::from_real(&[1.0, 2.0, -1.0]).unwrap();
        let f = HoloCurve::constant(&q);
        assert!(f.is_constant());
        let d = f
            .spherical_derivative(c(0.3, 0.4), DerivativeMethod::ClosedForm)
            .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn common_factor_rejected() {
        // z(z-1) and z(z+1) share z.
        let f = HoloCurve::rational(vec![
            Poly::from_real(&[0.0, -1.0, 1.0]),
            Poly::from_real(&[0.0, 1.0, 1.0]),
        ]);
        assert!(matches!(f, Err(BrodyError::CommonFactor(_))));
    }

    #[test]
    fn methods_agree_on_random_curves() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let h = 1e-3;
        for _ in 0..20 {
            let f = random_rational(&mut rng, 2, 3);
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let closed = f.spherical_derivative(z, DerivativeMethod::ClosedForm).unwrap();
            let stencil = f
                .spherical_derivative(z, DerivativeMethod::Laplacian(h))
                .unwrap();
            assert!(
                (closed - stencil).abs() < 1e-4,
                "closed {closed} vs stencil {stencil} at {z}"
            );
        }
    }

    #[test]
    fn projective_rescaling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_rational(&mut rng, 1, 2);
        let z = c(0.2, -0.7);
        let d1 = f.spherical_derivative(z, DerivativeMethod::ClosedForm).unwrap();
        // Multiply all components by a fixed scalar.
        let scaled = match &f.repr {
            CurveRepr::Rational(comps) => HoloCurve::rational(
                comps.iter().map(|p| p.scale(c(3.0, -2.0))).collect(),
            )
            .unwrap(),
            _ => unreachable!(),
        };
        let d2 = scaled
            .spherical_derivative(z, DerivativeMethod::ClosedForm)
            .unwrap();
        assert!((d1 - d2).abs() <= 1e-10 * d1.max(1.0));
        let p1 = f.point(z).unwrap();
        let p2 = scaled.point(z).unwrap();
        assert!(chordal_distance(&p1, &p2) < 1e-12);
    }

    #[test]
    fn transformed_curve_matches_substitution() {
        let f = identity_curve();
        let (alpha, beta) = (c(2.0, 1.0), c(0.5, -0.3));
        let g = HoloCurve::transformed(f.clone(), alpha, beta).unwrap();
        let z = c(0.1, 0.9);
        let d = chordal_distance(&g.point(z).unwrap(), &f.point(alpha * z + beta).unwrap());
        assert!(d < 1e-12);
        // Chain rule: |dg|(z) = |α| |df|(αz+β).
        let lhs = g.spherical_derivative(z, DerivativeMethod::ClosedForm).unwrap();
        let rhs = alpha.norm()
            * f.spherical_derivative(alpha * z + beta, DerivativeMethod::ClosedForm)
                .unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn sup_distance_basics() {
        let f = identity_curve();
        let disk = Domain::disk(c(0.0, 0.0), 1.0).unwrap();
        assert!(sup_distance(&f, &f, &disk, 0.1).unwrap() == 0.0);
        let p = HoloCurve::constant(&ProjectivePoint::from_real(&[1.0, 0.0]).unwrap());
        let q = HoloCurve::constant(&ProjectivePoint::from_real(&[0.0, 1.0]).unwrap());
        assert!((sup_distance(&p, &q, &disk, 0.2).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sup_distance_small_shift_is_small() {
        let f = identity_curve();
        let disk = Domain::disk(c(0.0, 0.0), 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=3 {
            let shift = 10.0f64.powi(-k);
            let g = HoloCurve::rational(vec![
                Poly::from_real(&[1.0]),
                Poly::from_real(&[shift, 1.0]),
            ])
            .unwrap();
            let d = sup_distance(&f, &g, &disk, 0.1).unwrap();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn normalize_identity_curve() {
        let f = identity_curve();
        let box_ = f.default_search_box();
        let (g, lambda) = brody_normalize(&f, &box_, 0.05).unwrap();
        assert!((lambda - 1.0 / PI.sqrt()).abs() < 1e-6, "lambda = {lambda}");
        let (sup, _) = lipschitz_sup(&g, &g.default_search_box(), 0.05).unwrap();
        assert!((sup - 1.0).abs() < 1e-4, "sup = {sup}");
    }

    #[test]
    fn normalize_scaled_curve() {
        // f(z) = [1 : 2z] has ‖df‖∞ = 2/√π.
        let f = HoloCurve::rational(vec![Poly::from_real(&[1.0]), Poly::from_real(&[0.0, 2.0])])
            .unwrap();
        let (_, lambda) = brody_normalize(&f, &f.default_search_box(), 0.02).unwrap();
        assert!((lambda - 2.0 / PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn normalize_rejects_constant() {
        let f = HoloCurve::constant(&ProjectivePoint::from_real(&[1.0, 1.0]).unwrap());
        let box_ = Domain::disk(c(0.0, 0.0), 1.0).unwrap();
        assert!(matches!(
            brody_normalize(&f, &box_, 0.1),
            Err(BrodyError::ConstantCurve)
        ));
    }

    #[test]
    fn nondegeneracy_examples() {
        let f = identity_curve();
        // |df|(0) = 1/√π > 1/2, so f is 2-nondegenerate over {0}.
        let lam = Domain::disk(c(0.0, 0.0), 0.05).unwrap();
        let (ok, _) = is_nondegenerate(&f, 2.0, &lam, 0.05).unwrap();
        assert!(ok);
        // Far away the derivative has decayed below 1/2.
        let far = Domain::disk(c(100.0, 0.0), 0.05).unwrap();
        let (ok, w) = is_nondegenerate(&f, 2.0, &far, 0.05).unwrap();
        assert!(!ok);
        assert!(w.worst_sup < 0.5);
        // Constant curves are degenerate for every R.
        let con = HoloCurve::constant(&ProjectivePoint::from_real(&[1.0, 0.0]).unwrap());
        let (ok, _) = is_nondegenerate(&con, 2.0, &lam, 0.05).unwrap();
        assert!(!ok);
    }

    #[test]
    fn definition_roundtrip_rational() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_rational(&mut rng, 2, 3);
        let text = f.to_definition().unwrap();
        let g = HoloCurve::parse_definition(&text).unwrap();
        assert_eq!(text, g.to_definition().unwrap());
        let z = c(0.3, 0.8);
        assert!(chordal_distance(&f.point(z).unwrap(), &g.point(z).unwrap()) < 1e-15);
    }

    #[test]
    fn definition_roundtrip_elliptic() {
        let lat = PlaneLattice::rectangular(1.0, 1.5).unwrap();
        let f = HoloCurve::elliptic(
            lat,
            vec![
                EllipticExpr::constant(c(1.0, 0.0)),
                EllipticExpr::new(vec![(1, 0, c(0.25, 0.0)), (0, 1, c(0.0, 0.125))]).unwrap(),
            ],
        )
        .unwrap();
        let text = f.to_definition().unwrap();
        let g = HoloCurve::parse_definition(&text).unwrap();
        assert_eq!(text, g.to_definition().unwrap());
    }

    #[test]
    fn elliptic_curve_is_doubly_periodic() {
        let lat = PlaneLattice::square(2.0).unwrap();
        let f = HoloCurve::elliptic(
            lat.clone(),
            vec![
                EllipticExpr::constant(c(1.0, 0.0)),
                EllipticExpr::new(vec![(1, 0, c(1.0, 0.0))]).unwrap(),
            ],
        )
        .unwrap();
        let z = c(0.3, 0.7);
        let d = chordal_distance(
            &f.point(z).unwrap(),
            &f.point(z + lat.omega1()).unwrap(),
        );
        assert!(d < 1e-9, "d = {d}");
    }
}
