//! Separated sets, coverings and entropy at a scale.
//!
//! For a compact metric space `(X, d)` let `#(X,d,ε)` be the minimal
//! cardinality of an open cover by sets of diameter `< ε` and `#_sep(X,d,ε)`
//! the maximal cardinality of an `ε`-separated subset (pairwise distances
//! strictly `> ε`).  These bracket each other:
//!
//! ```text
//! #_sep(X,d,ε) ≤ #(X,d,ε) ≤ #_sep(X,d,δ)       (δ < ε/2).
//! ```
//!
//! Under a translation action of the plane with distances
//! `d_Ω(x,y) = sup_{a∈Ω} d(a.x, a.y)` the entropy at scale `ε` is
//! `S(X,d,ε) = lim log #(X, d_{Ω_n}, ε) / area(Ω_n)` along a Følner sequence
//! of windows, and the metric mean dimension is the growth rate of `S`
//! against `|log ε|`.  Everything here works on finite samples: all counts
//! are greedy estimates whose direction (lower/upper bound) is documented on
//! each operation, and every report carries its sample size and seed.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

use crate::curve::{self, HoloCurve};
use crate::domain::Domain;
use crate::energy;
use crate::error::{BrodyError, Result};
use crate::geometry::chordal_distance;

/// A finite metric space with opaque point labels.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validate symmetry (exact), zero diagonal, nonnegativity, and the
    /// triangle inequality — on all triples when the space has at most 200
    /// points, on 200³ random triples otherwise.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(BrodyError::InvalidDomain(
                "distance matrix shape does not match label count".into(),
            ));
        }
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(BrodyError::InvalidDomain("nonzero diagonal".into()));
            }
            for j in 0..n {
                if dist[i][j] < 0.0 || !dist[i][j].is_finite() {
                    return Err(BrodyError::InvalidDomain(
                        "distances must be finite and nonnegative".into(),
                    ));
                }
                if dist[i][j] != dist[j][i] {
                    return Err(BrodyError::InvalidDomain("asymmetric distance".into()));
                }
            }
        }
        let check_triple = |i: usize, j: usize, k: usize| -> bool {
            dist[i][k] <= dist[i][j] + dist[j][k] + 1e-10
        };
        if n <= 200 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if !check_triple(i, j, k) {
                            return Err(BrodyError::InvalidDomain(format!(
                                "triangle inequality fails on ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..200usize.pow(2) {
                let (i, j, k) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                if !check_triple(i, j, k) {
                    return Err(BrodyError::InvalidDomain(format!(
                        "triangle inequality fails on ({i},{j},{k})"
                    )));
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Build from points and a metric closure.
    pub fn from_points<T, F: FnMut(&T, &T) -> f64>(
        labels: Vec<String>,
        points: &[T],
        mut metric: F,
    ) -> Result<Self> {
        let n = points.len();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..i {
                let d = metric(&points[i], &points[j]);
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        FiniteMetricSpace::new(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    /// Diameter of the space (0 for the empty space).
    pub fn diameter(&self) -> f64 {
        self.dist
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &d| acc.max(d))
    }
}

/// Greedy maximal `ε`-separated subset (pairwise distances strictly `> ε`).
///
/// Points are scanned by label index; a nonzero `order_seed` shuffles the
/// scan order first.  The result is always maximal, so its cardinality is a
/// lower bound for the true `#_sep`.
pub fn greedy_separated(space: &FiniteMetricSpace, eps: f64, order_seed: u64) -> Vec<usize> {
    assert!(eps > 0.0, "separation scale must be positive");
    let mut order: Vec<usize> = (0..space.len()).collect();
    if order_seed != 0 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
    }
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if kept.iter().all(|&j| space.dist(i, j) > eps) {
            kept.push(i);
        }
    }
    kept
}

/// Greedy covering count by balls of radius `ε/2 − ulp` (diameter `< ε`),
/// always choosing the center covering the most uncovered points.
///
/// The result is an upper bound for the minimal covering number of the
/// sampled points.
pub fn greedy_cover(space: &FiniteMetricSpace, eps: f64) -> usize {
    assert!(eps > 0.0, "covering scale must be positive");
    let radius = next_down(eps / 2.0);
    let n = space.len();
    let mut covered = vec![false; n];
    let mut balls = 0;
    while covered.iter().any(|&c| !c) {
        let best = (0..n)
            .max_by_key(|&c| {
                (0..n)
                    .filter(|&i| !covered[i] && space.dist(c, i) <= radius)
                    .count()
            })
            .expect("nonempty space");
        // Every point covers at least itself, so the greedy step always
        // makes progress.
        for i in 0..n {
            if space.dist(best, i) <= radius {
                covered[i] = true;
            }
        }
        balls += 1;
    }
    balls
}

fn next_down(x: f64) -> f64 {
    // Largest float strictly below x (x > 0 here).
    f64::from_bits(x.to_bits() - 1)
}

/// Exact `#_sep` by exhaustive subset search; only for spaces with at most
/// 15 points.
pub fn exact_separated(space: &FiniteMetricSpace, eps: f64) -> usize {
    let n = space.len();
    assert!(n <= 15, "exhaustive search limited to 15 points");
    let mut best = 0;
    'subsets: for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            for j in 0..i {
                if mask & (1 << j) != 0 && space.dist(i, j) <= eps {
                    continue 'subsets;
                }
            }
        }
        best = size;
    }
    best
}

/// Exact minimal point-centered cover by balls of radius `ε/2 − ulp`, by
/// dynamic programming over subsets; only for spaces with at most 15 points.
pub fn exact_cover(space: &FiniteMetricSpace, eps: f64) -> usize {
    let n = space.len();
    assert!(n <= 15, "exhaustive search limited to 15 points");
    let radius = next_down(eps / 2.0);
    let full: u32 = (1 << n) - 1;
    let balls: Vec<u32> = (0..n)
        .map(|c| {
            (0..n)
                .filter(|&i| space.dist(c, i) <= radius)
                .fold(0u32, |m, i| m | (1 << i))
        })
        .collect();
    let mut dp = vec![u32::MAX; (full + 1) as usize];
    dp[0] = 0;
    for mask in 0..=full {
        if dp[mask as usize] == u32::MAX {
            continue;
        }
        for b in &balls {
            let next = (mask | b) as usize;
            dp[next] = dp[next].min(dp[mask as usize] + 1);
        }
    }
    dp[full as usize] as usize
}

/// The Banach-ball covering bound `((ε + 2r)/ε)ⁿ` for the closed `r`-ball
/// of an `n`-dimensional normed space at scale `ε`.
pub fn banach_ball_bound(n: usize, r: f64, eps: f64) -> f64 {
    assert!(n >= 1 && r > 0.0 && eps > 0.0);
    ((eps + 2.0 * r) / eps).powi(n as i32)
}

/// Does the (not necessarily continuous) map satisfy
/// `d(x,y) > ε ⇒ d′(f(x), f(y)) > δ` on all pairs?
///
/// When it does, `#_sep(X,ε) ≤ #_sep(Y,δ)`; on spaces small enough for
/// brute force the conclusion is re-verified directly.
pub fn check_map_monotonicity<F: Fn(usize) -> usize>(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    map: F,
    eps: f64,
    delta: f64,
) -> bool {
    let n = x.len();
    for i in 0..n {
        for j in 0..i {
            if x.dist(i, j) > eps && y.dist(map(i), map(j)) <= delta {
                return false;
            }
        }
    }
    if n <= 15 && y.len() <= 15 {
        let lower = greedy_separated(x, eps, 0).len();
        let upper = exact_separated(y, delta);
        assert!(
            lower <= upper,
            "separated-count monotonicity violated: {lower} > {upper}"
        );
    }
    true
}

/// `area(∂_r Ω) / area(Ω)` where `∂_r Ω` is the set of points whose
/// `r`-disk meets both `Ω` and its complement, estimated by grid membership.
pub fn folner_boundary_ratio(omega: &Domain, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(BrodyError::InvalidDomain(
            "thickening radius must be positive".into(),
        ));
    }
    let (corner, w, h) = omega.bounding_box();
    let pad = Complex64::new(r, r);
    let res = (r / 3.0).min(w.max(h) / 150.0);
    let (nx, ny) = (
        ((w + 2.0 * r) / res).ceil() as usize,
        ((h + 2.0 * r) / res).ceil() as usize,
    );
    // Small probe disk for "D_r(a) meets Ω / meets Ωᶜ".
    let probes: Vec<Complex64> = {
        let mut v = vec![Complex64::new(0.0, 0.0)];
        for k in 0..12 {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / 12.0;
            v.push(Complex64::from_polar(0.97 * r, ang));
            v.push(Complex64::from_polar(0.5 * r, ang + 0.3));
        }
        v
    };
    let mut boundary = 0usize;
    let start = corner - pad;
    for j in 0..ny {
        for i in 0..nx {
            let a = start + Complex64::new((i as f64 + 0.5) * res, (j as f64 + 0.5) * res);
            let mut inside = false;
            let mut outside = false;
            for &dp in &probes {
                if omega.contains(a + dp) {
                    inside = true;
                } else {
                    outside = true;
                }
                if inside && outside {
                    break;
                }
            }
            if inside && outside {
                boundary += 1;
            }
        }
    }
    Ok(boundary as f64 * res * res / omega.area())
}

/// Trace of a window functional along a Følner sequence.
#[derive(Debug, Clone, Serialize)]
pub struct OwTrace {
    /// `h(Ω_n) / area(Ω_n)` per window.
    pub values: Vec<f64>,
    /// Relative spread of the last three values.
    pub spread: f64,
}

/// Evaluate `h(Ω_n)/area(Ω_n)` along the windows after spot-checking that
/// `h` is monotone, subadditive and translation-invariant.
///
/// The spot checks run on the first square window: translation invariance
/// against two shifts, subadditivity as `h(2s-square) ≤ Σ h(quadrants)`
/// (which combines conditions (2) and (3)), and monotonicity of nested
/// squares.  A failed check is an error naming the violated condition.
pub fn ornstein_weiss_trace<H: Fn(&Domain) -> Result<f64>>(
    h: H,
    windows: &[Domain],
) -> Result<OwTrace> {
    if windows.is_empty() {
        return Err(BrodyError::EmptyDomain);
    }
    let tol = |v: f64| 1e-6 + 1e-3 * v.abs();
    if let Some(Domain::Square { corner, side }) = windows
        .iter()
        .find(|w| matches!(w, Domain::Square { .. }))
    {
        let sq = |c: Complex64, s: f64| Domain::square(c, s).unwrap();
        let s = *side / 2.0;
        let base = h(&sq(*corner, s))?;
        if base < 0.0 {
            return Err(BrodyError::WindowFunctional("nonnegativity"));
        }
        // (3) translation invariance.
        for &shift in &[Complex64::new(s, 0.0), Complex64::new(0.31 * s, -0.47 * s)] {
            let moved = h(&sq(*corner + shift, s))?;
            if (moved - base).abs() > tol(base) {
                return Err(BrodyError::WindowFunctional("translation-invariance"));
            }
        }
        // (1) monotonicity under inclusion.
        let big = h(&sq(*corner, 2.0 * s))?;
        if big + tol(big) < base {
            return Err(BrodyError::WindowFunctional("monotonicity"));
        }
        // (2) subadditivity via the four-quadrant split of the double square.
        let mut quadrants = 0.0;
        for &(dx, dy) in &[(0.0, 0.0), (s, 0.0), (0.0, s), (s, s)] {
            quadrants += h(&sq(*corner + Complex64::new(dx, dy), s))?;
        }
        if big > quadrants + tol(quadrants) {
            return Err(BrodyError::WindowFunctional("subadditivity"));
        }
    }
    let mut values = Vec::with_capacity(windows.len());
    for w in windows {
        values.push(h(w)? / w.area());
    }
    let tail = &values[values.len().saturating_sub(3)..];
    let hi = tail.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let lo = tail.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let mid = tail.iter().sum::<f64>() / tail.len() as f64;
    let spread = if mid.abs() > 1e-12 {
        (hi - lo) / mid.abs()
    } else {
        hi - lo
    };
    Ok(OwTrace { values, spread })
}

/// A parametric family of holomorphic curves under the translation action
/// `a·f(z) = f(z+a)`, with the base metric `sup_{z∈W} d(f(z), g(z))` over a
/// fixed evaluation window `W`.
#[derive(Clone)]
pub struct CurveFamily {
    /// Product of closed parameter intervals.
    pub parameter_box: Vec<(f64, f64)>,
    constructor: Arc<dyn Fn(&[f64]) -> Result<HoloCurve> + Send + Sync>,
    /// Evaluation window of the base metric.
    pub window: Domain,
    /// Grid spacing used for all sup evaluations.
    pub resolution: f64,
}

impl std::fmt::Debug for CurveFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CurveFamily")
            .field("parameter_box", &self.parameter_box)
            .field("window", &self.window)
            .field("resolution", &self.resolution)
            .finish()
    }
}

impl CurveFamily {
    pub fn new(
        parameter_box: Vec<(f64, f64)>,
        constructor: Arc<dyn Fn(&[f64]) -> Result<HoloCurve> + Send + Sync>,
        window: Domain,
        resolution: f64,
    ) -> Self {
        CurveFamily {
            parameter_box,
            constructor,
            window,
            resolution,
        }
    }

    pub fn curve_at(&self, params: &[f64]) -> Result<HoloCurve> {
        if params.len() != self.parameter_box.len() {
            return Err(BrodyError::InvalidDomain(
                "parameter count does not match the box".into(),
            ));
        }
        for (p, (lo, hi)) in params.iter().zip(&self.parameter_box) {
            if p < lo || p > hi {
                return Err(BrodyError::InvalidDomain(format!(
                    "parameter {p} outside [{lo}, {hi}]"
                )));
            }
        }
        (self.constructor)(params)
    }

    /// The translate `a·f`, i.e. `z ↦ f(z + a)`.
    pub fn translate(f: &HoloCurve, a: Complex64) -> HoloCurve {
        HoloCurve::transformed(f.clone(), Complex64::new(1.0, 0.0), a)
            .expect("unit alpha is always valid")
    }

    fn sample_params(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.parameter_box
            .iter()
            .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..hi) })
            .collect()
    }
}

/// `d_Ω(f_{θ₁}, f_{θ₂}) = sup_{a∈Ω} sup_{z∈W} d(f_{θ₁}(z+a), f_{θ₂}(z+a))`
/// over grids of spacing `resolution` (on `Ω`) and the family resolution
/// (on `W`).  `omega = None` means the trivial translate set `{0}`.
pub fn dynamical_distance(
    family: &CurveFamily,
    theta1: &[f64],
    theta2: &[f64],
    omega: Option<&Domain>,
    resolution: f64,
) -> Result<f64> {
    let f = family.curve_at(theta1)?;
    let g = family.curve_at(theta2)?;
    let translates = match omega {
        Some(o) => o.grid(resolution)?,
        None => vec![Complex64::new(0.0, 0.0)],
    };
    let mut best = 0.0f64;
    for &a in &translates {
        let fa = CurveFamily::translate(&f, a);
        let ga = CurveFamily::translate(&g, a);
        best = best.max(curve::sup_distance(&fa, &ga, &family.window, family.resolution)?);
    }
    Ok(best)
}

/// Separated/cover counts of a sampled family at one scale and window.
#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub eps: f64,
    /// Human-readable window description.
    pub window: String,
    pub window_area: f64,
    /// Greedy lower bound for `#_sep`.
    pub sep_count: usize,
    /// Greedy upper bound for the sample covering number.
    pub cover_count: usize,
    pub sample_size: usize,
    pub seed: u64,
    /// `log(cover_count) / window_area`, the S-trace entry.
    pub s_estimate: f64,
}

fn window_description(w: &Domain) -> String {
    match w {
        Domain::Disk { center, radius } => format!("disk({center}, {radius})"),
        Domain::Square { corner, side } => format!("square({corner}, {side})"),
        Domain::Cell(_) => "lattice-cell".to_string(),
        Domain::Thickened { centers, r } => {
            format!("thickened({} centers, r={r})", centers.len())
        }
    }
}

/// Sample the family, build the `d_Ω` metric space per window, and record
/// greedy counts; `log(cover)/area` across windows is the S-trace.
///
/// Counts are sample-level estimates: they lower-approximate the covering
/// complexity of the full family.
pub fn entropy_at_scale(
    family: &CurveFamily,
    eps: f64,
    windows: &[Domain],
    sample_size: usize,
    seed: u64,
) -> Result<Vec<CountReport>> {
    assert!(eps > 0.0, "scale must be positive");
    assert!(sample_size >= 100, "need at least 100 samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curves = Vec::with_capacity(sample_size);
    while curves.len() < sample_size {
        let params = family.sample_params(&mut rng);
        if let Ok(f) = family.curve_at(&params) {
            curves.push(f);
        }
    }
    let base_pts = family.window.grid(family.resolution)?;
    let mut reports = Vec::with_capacity(windows.len());
    for w in windows {
        // d_Ω over W is a plain sup over the Minkowski-sum point set; cache
        // each curve's values there once.
        let translate_res = (w.area().sqrt() / 6.0).max(family.resolution);
        let translates = w.grid(translate_res)?;
        let eval_pts: Vec<Complex64> = translates
            .iter()
            .flat_map(|&a| base_pts.iter().map(move |&z| z + a))
            .collect();
        let values: Vec<Vec<crate::geometry::ProjectivePoint>> = curves
            .iter()
            .map(|f| {
                eval_pts
                    .iter()
                    .map(|&z| f.point(z))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let space = FiniteMetricSpace::from_points(
            (0..sample_size).map(|i| format!("curve-{i}")).collect(),
            &values,
            |u, v| {
                u.iter()
                    .zip(v.iter())
                    .map(|(p, q)| chordal_distance(p, q))
                    .fold(0.0f64, f64::max)
            },
        )?;
        let sep_count = greedy_separated(&space, eps, 0).len();
        let cover_count = greedy_cover(&space, eps);
        let area = w.area();
        reports.push(CountReport {
            eps,
            window: window_description(w),
            window_area: area,
            sep_count,
            cover_count,
            sample_size,
            seed,
            s_estimate: (cover_count as f64).ln() / area,
        });
    }
    Ok(reports)
}

/// CSV table of count reports: `epsilon,window_area,sep,cover,s`.
pub fn count_reports_csv(reports: &[CountReport]) -> String {
    let mut out = String::from("epsilon,window_area,sep,cover,s\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.eps, r.window_area, r.sep_count, r.cover_count, r.s_estimate
        ));
    }
    out
}

/// Metric-mean-dimension slope fit of `S(ε)` against `|log ε|`.
#[derive(Debug, Clone, Serialize)]
pub struct MmdimFit {
    /// Least-squares slope of `S` against `|log ε|`.
    pub slope: f64,
    /// Per-scale ratios `S(ε)/|log ε|`.
    pub ratios: Vec<(f64, f64)>,
    /// Minimum ratio, the liminf proxy.
    pub min_ratio: f64,
}

/// Fit the S-versus-`|log ε|` slope; needs at least 3 distinct scales
/// spanning at least one decade.
pub fn mmdim_slope(reports: &[(f64, f64)]) -> Result<MmdimFit> {
    let mut scales: Vec<f64> = reports.iter().map(|&(e, _)| e).collect();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scales.dedup();
    if scales.len() < 3 {
        return Err(BrodyError::TooFewScales(3, scales.len()));
    }
    let span = scales[scales.len() - 1] / scales[0];
    if span < 10.0 {
        return Err(BrodyError::ScaleSpanTooNarrow(span));
    }
    let xs: Vec<f64> = reports.iter().map(|&(e, _)| e.ln().abs()).collect();
    let ys: Vec<f64> = reports.iter().map(|&(_, s)| s).collect();
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let ratios: Vec<(f64, f64)> = reports
        .iter()
        .map(|&(e, s)| (e, s / e.ln().abs()))
        .collect();
    let min_ratio = ratios
        .iter()
        .map(|&(_, r)| r)
        .fold(f64::INFINITY, f64::min);
    Ok(MmdimFit {
        slope,
        ratios,
        min_ratio,
    })
}

/// Empirical check of the counting bound for nondegenerate curves.
#[derive(Debug, Clone, Serialize)]
pub struct CountScalingReport {
    pub eps: f64,
    pub delta2: f64,
    pub side: f64,
    /// `∫_Λ |df|²`.
    pub energy: f64,
    /// `2(N+1)·energy + C₃·L` with the reported `c3`.
    pub exponent: f64,
    pub c3: f64,
    pub sep_count: usize,
    pub log_count: f64,
    /// `C₂` solving `log_count = exponent · log(C₂/ε)` exactly.
    pub fitted_c2: f64,
    /// Same fit at half the sample size.
    pub fitted_c2_half: f64,
    /// Fit moved ≤ 20% under sample doubling.
    pub stable: bool,
    pub sample_size: usize,
    pub seed: u64,
}

impl CountScalingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Check the counting bound: sample curves `g` with
/// `𝐝_{D₅(Λ)}(f, g) ≤ δ₂` (small translates of `f`), count an
/// `ε`-separated set under `𝐝_Λ`, and fit `C₂` in
/// `log #_sep ≤ (2(N+1)∫_Λ|df|² + C₃·L) · log(C₂/ε)`.
///
/// Preconditions: `f` is `R`-nondegenerate over `Λ` and `‖df‖_∞ ≤ 2`.
pub fn count_scaling_check(
    f: &HoloCurve,
    r: f64,
    lambda_square: &Domain,
    eps: f64,
    delta2: f64,
    sample_size: usize,
    seed: u64,
) -> Result<CountScalingReport> {
    let (corner, side, _) = match lambda_square {
        Domain::Square { corner, side } => (*corner, *side, 0.0),
        _ => {
            return Err(BrodyError::InvalidDomain(
                "the counting bound is checked on square regions".into(),
            ))
        }
    };
    let res = (side / 24.0).min(1.0);
    let (ok, witness) = curve::is_nondegenerate(f, r, lambda_square, res)?;
    if !ok {
        return Err(BrodyError::NotNondegenerate(
            witness.worst_center,
            witness.worst_sup,
        ));
    }
    let center = corner + Complex64::new(side / 2.0, side / 2.0);
    let thick = Domain::disk(center, side * std::f64::consts::SQRT_2 / 2.0 + 5.0)?;
    let (lip, at) = curve::lipschitz_sup(f, &thick, res)?;
    if lip > 2.0 {
        return Err(BrodyError::Infeasible("lipschitz-at-most-2", lip, at));
    }
    // Perturbations: translates f(· + τ) with |τ| capped so the sup distance
    // over D₅(Λ) stays below δ₂ (|df| ≤ 2 gives d ≤ 2√π |τ|).
    let tau_max = delta2 / (2.0 * std::f64::consts::PI.sqrt()) * 0.9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count_at = |n_samples: usize, rng: &mut ChaCha8Rng| -> Result<usize> {
        let grid = lambda_square.grid(res)?;
        let mut values: Vec<Vec<crate::geometry::ProjectivePoint>> =
            Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let tau = Complex64::from_polar(
                rng.gen_range(0.0..tau_max),
                rng.gen_range(0.0..2.0 * std::f64::consts::PI),
            );
            let g = CurveFamily::translate(f, tau);
            values.push(grid.iter().map(|&z| g.point(z)).collect::<Result<Vec<_>>>()?);
        }
        let space = FiniteMetricSpace::from_points(
            (0..n_samples).map(|i| format!("g-{i}")).collect(),
            &values,
            |u, v| {
                u.iter()
                    .zip(v.iter())
                    .map(|(p, q)| chordal_distance(p, q))
                    .fold(0.0f64, f64::max)
            },
        )?;
        Ok(greedy_separated(&space, eps, 0).len())
    };
    let half_count = count_at(sample_size / 2, &mut rng)?;
    let full_count = count_at(sample_size, &mut rng)?;
    let e = energy::energy(f, lambda_square, 0)?;
    let n_dim = f.ambient_dim() as f64;
    let c3 = 1.0;
    let exponent = 2.0 * (n_dim + 1.0) * e + c3 * side;
    let fit = |count: usize| eps * ((count as f64).ln() / exponent).exp();
    let (fitted_c2, fitted_c2_half) = (fit(full_count), fit(half_count));
    let stable = (fitted_c2 - fitted_c2_half).abs() <= 0.20 * fitted_c2.max(1e-12);
    Ok(CountScalingReport {
        eps,
        delta2,
        side,
        energy: e,
        exponent,
        c3,
        sep_count: full_count,
        log_count: (full_count as f64).ln(),
        fitted_c2,
        fitted_c2_half,
        stable,
        sample_size,
        seed,
    })
}
