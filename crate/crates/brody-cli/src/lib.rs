//! Configuration-driven experiment runner for the Brody-curve laboratory.
//!
//! An experiment is one TOML file naming a kind (`pde-selftest`,
//! `blowup-verify`, `entropy-scan`, `rho-search` or `curve-check`) plus its
//! parameters and a seed.  Every run is fully determined by (config, seed):
//! all randomness flows through one seeded generator split hierarchically
//! per sub-task, and report bodies are byte-identical across reruns.  Each
//! run writes a `manifest.json` (config echo, tool version, wall time,
//! pass/fail per invariant) next to the module-level JSON/CSV reports.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use brody::blowup;
use brody::curve::{self, DerivativeMethod};
use brody::entropy;
use brody::pde;
use brody::rho;
use brody::{BrodyError, Domain, HoloCurve, PlaneLattice};

/// Exit status of a run: 0 all pass, 1 assertion failure, 2 invalid config.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PdeSelftest,
    BlowupVerify,
    EntropyScan,
    RhoSearch,
    CurveCheck,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExperimentKind::PdeSelftest => "pde-selftest",
            ExperimentKind::BlowupVerify => "blowup-verify",
            ExperimentKind::EntropyScan => "entropy-scan",
            ExperimentKind::RhoSearch => "rho-search",
            ExperimentKind::CurveCheck => "curve-check",
        };
        f.write_str(s)
    }
}

fn default_seed() -> u64 {
    0
}

/// One experiment: kind, seed, optional output directory and per-kind
/// parameter sections.  Unknown keys anywhere are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde: Option<PdeParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<RhoParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveParams>,
}

impl ExperimentConfig {
    /// Parse a TOML config; unknown keys produce a line-numbered message.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }
}

fn d_samples() -> usize {
    100
}
fn d_side() -> f64 {
    8.0
}
fn d_grid() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeParams {
    /// Number of random right-hand sides for the bound check.
    #[serde(default = "d_samples")]
    pub samples: usize,
    /// Torus side length.
    #[serde(default = "d_side")]
    pub side: f64,
    /// Grid points per side.
    #[serde(default = "d_grid")]
    pub grid: usize,
}

impl Default for PdeParams {
    fn default() -> Self {
        PdeParams {
            samples: d_samples(),
            side: d_side(),
            grid: d_grid(),
        }
    }
}

fn d_instances() -> usize {
    20
}
fn d_bsamples() -> usize {
    300
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupParams {
    /// Admissible (f, p, q) instances for the derivative-window check.
    #[serde(default = "d_instances")]
    pub instances: usize,
    /// Sample count of the inequality-fitting report.
    #[serde(default = "d_bsamples")]
    pub samples: usize,
}

impl Default for BlowupParams {
    fn default() -> Self {
        BlowupParams {
            instances: d_instances(),
            samples: d_bsamples(),
        }
    }
}

fn d_eps() -> Vec<f64> {
    // Spanning a full decade so the mmdim slope fit is admissible.
    vec![0.5, 0.25, 0.1, 0.05]
}
fn d_windows() -> Vec<f64> {
    vec![1.0, 2.0]
}
fn d_sample_size() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyParams {
    /// Scales ε of the counting reports.
    #[serde(default = "d_eps")]
    pub eps: Vec<f64>,
    /// Window square sides.
    #[serde(default = "d_windows")]
    pub windows: Vec<f64>,
    #[serde(default = "d_sample_size")]
    pub sample_size: usize,
}

impl Default for EntropyParams {
    fn default() -> Self {
        EntropyParams {
            eps: d_eps(),
            windows: d_windows(),
            sample_size: d_sample_size(),
        }
    }
}

fn d_budget() -> usize {
    rho::DEFAULT_BUDGET
}
fn d_restarts() -> usize {
    rho::DEFAULT_RESTARTS
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoParams {
    #[serde(default = "d_budget")]
    pub budget: usize,
    #[serde(default = "d_restarts")]
    pub restarts: usize,
    /// Also run the N=2 embedded family and check monotonicity.
    #[serde(default)]
    pub with_embedding: bool,
}

impl Default for RhoParams {
    fn default() -> Self {
        RhoParams {
            budget: d_budget(),
            restarts: d_restarts(),
            with_embedding: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    /// Path to a curve definition file.
    pub file: PathBuf,
}

/// Pass/fail record of one hard invariant.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// `manifest.json` contents.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub kind: String,
    pub seed: u64,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub wall_time_secs: f64,
    pub status: i32,
    pub invariants: Vec<InvariantResult>,
    pub reports: Vec<String>,
    /// Headline numbers, when the kind produces them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_dimension: Option<f64>,
}

/// Outcome of `run_experiment`: exit status plus the written manifest.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: i32,
    pub manifest: Manifest,
}

struct RunState {
    invariants: Vec<InvariantResult>,
    reports: Vec<(String, String)>,
    rho_hat: Option<f64>,
    mean_dimension: Option<f64>,
}

impl RunState {
    fn new() -> Self {
        RunState {
            invariants: Vec::new(),
            reports: Vec::new(),
            rho_hat: None,
            mean_dimension: None,
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.invariants.push(InvariantResult {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn report(&mut self, file: &str, body: String) {
        self.reports.push((file.to_string(), body));
    }
}

/// Execute a validated config, writing the manifest and reports into
/// `out_dir`.  Returns status 0 iff all hard invariants pass; propagated
/// library errors yield status 1 with the error recorded as a failed
/// invariant.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> std::io::Result<RunOutcome> {
    let started = std::time::Instant::now();
    let mut state = RunState::new();
    let run = match config.kind {
        ExperimentKind::PdeSelftest => run_pde(config, &mut state),
        ExperimentKind::BlowupVerify => run_blowup(config, &mut state),
        ExperimentKind::EntropyScan => run_entropy(config, &mut state),
        ExperimentKind::RhoSearch => run_rho(config, &mut state),
        ExperimentKind::CurveCheck => run_curve_check(config, &mut state),
    };
    if let Err(e) = run {
        state.check("no-library-error", false, e.to_string());
    }
    let status = if state.invariants.iter().all(|i| i.pass) {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    std::fs::create_dir_all(out_dir)?;
    for (file, body) in &state.reports {
        std::fs::write(out_dir.join(file), body)?;
    }
    let manifest = Manifest {
        kind: config.kind.to_string(),
        seed: config.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        wall_time_secs: started.elapsed().as_secs_f64(),
        status,
        invariants: state.invariants,
        reports: state.reports.iter().map(|(f, _)| f.clone()).collect(),
        rho_hat: state.rho_hat,
        mean_dimension: state.mean_dimension,
    };
    std::fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(RunOutcome { status, manifest })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn run_pde(config: &ExperimentConfig, state: &mut RunState) -> brody::Result<()> {
    let params = config.pde.clone().unwrap_or_default();
    let lat = PlaneLattice::rectangular(params.side, params.side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut residual_worst = 0.0f64;
    let mut bound_passes = 0usize;
    for _ in 0..params.samples {
        let mut child = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let psi = pde::random_trig_field(&lat, params.grid, params.grid, 6, &mut child)?;
        let phi = pde::solve_helmholtz(&psi)?;
        // Residual of (-Δ+1)φ = ψ in the sup norm.
        let back = pde::apply_helmholtz(&phi)?;
        let residual = back
            .values()
            .iter()
            .zip(psi.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        residual_worst = residual_worst.max(residual);
        if phi.sup_norm() <= 4.0 * psi.sup_norm() {
            bound_passes += 1;
        }
    }
    state.check(
        "helmholtz-residual",
        residual_worst <= 1e-10,
        format!("worst spectral residual {residual_worst:e}"),
    );
    state.check(
        "sup-bound-4",
        bound_passes == params.samples,
        format!("{bound_passes}/{} within 4*sup", params.samples),
    );
    // Analytic solutions: constants and a single Fourier mode.
    let constant = brody::ScalarField::from_fn(
        brody::field::FieldGeometry::Torus(lat.clone()),
        params.grid,
        params.grid,
        |_| 0.7,
    )?;
    let phi_c = pde::solve_helmholtz(&constant)?;
    let err_c = phi_c
        .values()
        .iter()
        .map(|v| (v - 0.7).abs())
        .fold(0.0f64, f64::max);
    let mode = brody::ScalarField::from_fn(
        brody::field::FieldGeometry::Torus(lat.clone()),
        params.grid,
        params.grid,
        |z| (2.0 * std::f64::consts::PI * z.re / params.side).cos(),
    )?;
    let phi_m = pde::solve_helmholtz(&mode)?;
    let eig = 1.0 + (2.0 * std::f64::consts::PI / params.side).powi(2);
    let err_m = phi_m
        .values()
        .iter()
        .zip(mode.values())
        .map(|(a, b)| (a - b / eig).abs())
        .fold(0.0f64, f64::max);
    state.check(
        "analytic-solutions",
        err_c <= 1e-10 && err_m <= 1e-10,
        format!("constant error {err_c:e}, single-mode error {err_m:e}"),
    );
    #[derive(Serialize)]
    struct PdeReport {
        samples: usize,
        side: f64,
        grid: usize,
        worst_residual: f64,
        bound_passes: usize,
        constant_error: f64,
        mode_error: f64,
    }
    let report = PdeReport {
        samples: params.samples,
        side: params.side,
        grid: params.grid,
        worst_residual: residual_worst,
        bound_passes,
        constant_error: err_c,
        mode_error: err_m,
    };
    state.report(
        "pde.report.json",
        serde_json::to_string_pretty(&report).expect("report serializes"),
    );
    Ok(())
}

fn run_blowup(config: &ExperimentConfig, state: &mut RunState) -> brody::Result<()> {
    let params = config.blowup.clone().unwrap_or_default();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // Bubble constant: defining property for N = 1..3.
    let mut worst_dev = 0.0f64;
    for n in 1..=3usize {
        let a = blowup::bubble_constant(n);
        let r_star = ((n as f64) * a * a / 2.0).powf(1.0 / 6.0);
        let (mut lo, mut hi) = (r_star / 4.0, r_star * 4.0);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if blowup::bubble_derivative_profile(n, a, m1)
                < blowup::bubble_derivative_profile(n, a, m2)
            {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        let max = blowup::bubble_derivative_profile(n, a, 0.5 * (lo + hi));
        worst_dev = worst_dev.max((max - 0.1).abs());
    }
    state.check(
        "bubble-constant",
        worst_dev <= 1e-8,
        format!("worst |max - 0.1| = {worst_dev:e} over N in 1..=3"),
    );
    // Derivative window on admissible instances.
    let r = blowup::DEFAULT_R2;
    let mut window_ok = 0usize;
    let mut sups: Vec<f64> = Vec::new();
    for _ in 0..params.instances {
        let q = brody::ProjectivePoint::new(vec![
            c(rng.gen_range(0.5..1.0), rng.gen_range(-0.5..0.5)),
            c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)),
        ])?;
        let eps = rng.gen_range(1e-5..3e-4);
        let f = nearly_constant_curve(&q, eps);
        let spec = blowup::BubbleSpec::new(c(0.0, 0.0), q);
        let fh = blowup::blow_up_once(&f, &spec, r, blowup::DEFAULT_DELTA3)?;
        let half = Domain::disk(spec.p, r / 2.0)?;
        let (sup, _) = curve::lipschitz_sup(&fh, &half, 0.2)?;
        sups.push(sup);
        if sup > 0.01 && sup < 1.0 {
            window_ok += 1;
        }
    }
    state.check(
        "derivative-window",
        window_ok == params.instances,
        format!("{window_ok}/{} sups inside (1/100, 1)", params.instances),
    );
    // Inequality fits with stability under sample doubling.
    let q = brody::ProjectivePoint::from_real(&[1.0, 0.1])?;
    let f = nearly_constant_curve(&q, 2e-5);
    let g1 = nearly_constant_curve(&q, 1e-5);
    let g2 = nearly_constant_curve(&q, 3e-5);
    let spec = blowup::BubbleSpec::new(c(0.0, 0.0), q);
    let report =
        blowup::verify_blowup_report(&f, &g1, &g2, &spec, r, params.samples, rng.next_u64())?;
    state.check(
        "inequality-fits-stable",
        report.all_stable(),
        format!("{} fitted constants", report.fits.len()),
    );
    state.report("blowup.report.json", report.to_json());
    #[derive(Serialize)]
    struct WindowReport {
        instances: usize,
        radius: f64,
        sups: Vec<f64>,
    }
    state.report(
        "blowup_window.report.json",
        serde_json::to_string_pretty(&WindowReport {
            instances: params.instances,
            radius: r,
            sups,
        })
        .expect("report serializes"),
    );
    Ok(())
}

/// A curve staying close to `q` on a large disk (used as an admissible
/// blow-up input): a tiny degree-1 perturbation in the chart of `q`.
fn nearly_constant_curve(q: &brody::ProjectivePoint, eps: f64) -> HoloCurve {
    use brody::poly::Poly;
    // [1 : eps·z] pushed through a basis where q is the first axis: take
    // components q_i + eps·z·e_i with e the next axis direction.
    let n = q.ambient_dim();
    let comps: Vec<Poly> = q
        .homog()
        .iter()
        .enumerate()
        .map(|(i, &qi)| {
            if i == n {
                Poly::new(vec![qi, c(eps, 0.0)])
            } else {
                Poly::new(vec![qi])
            }
        })
        .collect();
    HoloCurve::rational(comps).expect("perturbed constant is a valid curve")
}

fn elliptic_p_curve(side: f64) -> brody::Result<HoloCurve> {
    use brody::curve::EllipticExpr;
    HoloCurve::elliptic(
        PlaneLattice::square(side)?,
        vec![
            EllipticExpr::constant(c(1.0, 0.0)),
            EllipticExpr::new(vec![(1, 0, c(1.0, 0.0))])?,
        ],
    )
}

fn run_entropy(config: &ExperimentConfig, state: &mut RunState) -> brody::Result<()> {
    let params = config.entropy.clone().unwrap_or_default();
    let f = elliptic_p_curve(2.0)?;
    let fam = entropy::CurveFamily::new(
        vec![(0.0, 2.0), (0.0, 2.0)],
        std::sync::Arc::new(move |p: &[f64]| {
            Ok(entropy::CurveFamily::translate(&f, c(p[0], p[1])))
        }),
        Domain::square(c(-1.0, -1.0), 2.0)?,
        0.25,
    );
    let windows: Vec<Domain> = params
        .windows
        .iter()
        .map(|&s| Domain::square(c(0.0, 0.0), s))
        .collect::<brody::Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut all_reports = Vec::new();
    let mut s_per_eps: Vec<(f64, f64)> = Vec::new();
    for &eps in &params.eps {
        let reports =
            entropy::entropy_at_scale(&fam, eps, &windows, params.sample_size, rng.next_u64())?;
        // Chain sanity: sep ≤ cover at every scale and window.
        for r in &reports {
            if r.sep_count > r.cover_count {
                state.check(
                    "sep-le-cover",
                    false,
                    format!("eps {eps}: sep {} > cover {}", r.sep_count, r.cover_count),
                );
            }
        }
        if let Some(last) = reports.last() {
            s_per_eps.push((eps, last.s_estimate));
        }
        all_reports.extend(reports);
    }
    if !state.invariants.iter().any(|i| i.name == "sep-le-cover") {
        state.check("sep-le-cover", true, "all scales and windows".into());
    }
    let fit = entropy::mmdim_slope(&s_per_eps);
    match &fit {
        Ok(fit) => state.check(
            "mmdim-fit",
            fit.slope.is_finite(),
            format!("slope {} min-ratio {}", fit.slope, fit.min_ratio),
        ),
        Err(e) => state.check("mmdim-fit", false, e.to_string()),
    }
    #[derive(Serialize)]
    struct EntropyReport {
        counts: Vec<entropy::CountReport>,
        mmdim: Option<entropy::MmdimFit>,
    }
    state.report(
        "entropy.report.json",
        serde_json::to_string_pretty(&EntropyReport {
            counts: all_reports.clone(),
            mmdim: fit.ok(),
        })
        .expect("report serializes"),
    );
    state.report("entropy.csv", entropy::count_reports_csv(&all_reports));
    Ok(())
}

fn run_rho(config: &ExperimentConfig, state: &mut RunState) -> brody::Result<()> {
    let params = config.rho.clone().unwrap_or_default();
    let fam = rho::default_family();
    let outcome = rho::maximize_rho(&fam, params.budget, params.restarts, config.seed)?;
    let in_range = outcome.rho_hat > 0.0 && outcome.rho_hat < 1.0;
    state.check(
        "rho-in-open-unit-interval",
        in_range,
        format!("rho_hat = {}", outcome.rho_hat),
    );
    let delta = outcome.best.diagnostics.reeval_delta.unwrap_or(f64::INFINITY);
    state.check(
        "reeval-delta",
        delta <= 0.01,
        format!("doubled-resolution delta {delta:e}"),
    );
    let mean_dim = rho::mean_dimension_estimate(fam.n, outcome.rho_hat)?;
    state.rho_hat = Some(outcome.rho_hat);
    state.mean_dimension = Some(mean_dim);
    #[derive(Serialize)]
    struct RhoReport {
        outcome: rho::RhoSearchOutcome,
        mean_dimension: f64,
        embedded: Option<EmbeddedReport>,
    }
    #[derive(Serialize)]
    struct EmbeddedReport {
        rho_hat: f64,
        mean_dimension: f64,
    }
    let embedded = if params.with_embedding {
        let fam2 = rho::embedded_family();
        let out2 = rho::maximize_rho(&fam2, params.budget, params.restarts, config.seed)?;
        state.check(
            "embedding-monotone",
            out2.rho_hat >= outcome.rho_hat - 1e-12,
            format!("rho2 {} vs rho1 {}", out2.rho_hat, outcome.rho_hat),
        );
        Some(EmbeddedReport {
            rho_hat: out2.rho_hat,
            mean_dimension: rho::mean_dimension_estimate(fam2.n, out2.rho_hat)?,
        })
    } else {
        None
    };
    state.report("rho_trace.csv", outcome.trace_csv());
    state.report(
        "rho.report.json",
        serde_json::to_string_pretty(&RhoReport {
            outcome,
            mean_dimension: mean_dim,
            embedded,
        })
        .expect("report serializes"),
    );
    Ok(())
}

/// Result of checking one curve definition file.
#[derive(Debug, Clone, Serialize)]
pub struct CurveCheckReport {
    pub file: String,
    pub ambient_dim: usize,
    pub constant: bool,
    pub doubly_periodic: bool,
    /// `‖df‖` estimate over the default search box.
    pub lipschitz: f64,
    /// Spherical derivative at the origin.
    pub derivative_at_origin: f64,
    /// The definition round-trips byte-for-byte.
    pub roundtrip_exact: bool,
}

/// Parse and validate a curve definition file; constant curves fail with
/// the normalization error (they carry no density sample).
pub fn check_curve(path: &Path) -> brody::Result<CurveCheckReport> {
    let text = std::fs::read_to_string(path)?;
    let f = HoloCurve::parse_definition(&text)?;
    let definition = f.to_definition()?;
    let roundtrip_exact =
        definition == text || definition == text.trim_end().to_string() + "\n";
    let box_ = f.default_search_box();
    let (_, w, h) = box_.bounding_box();
    let (_, lambda) = curve::brody_normalize(&f, &box_, w.max(h) / 48.0)?;
    let derivative_at_origin = f
        .spherical_derivative(c(0.0, 0.0), DerivativeMethod::ClosedForm)
        .unwrap_or(0.0);
    Ok(CurveCheckReport {
        file: path.display().to_string(),
        ambient_dim: f.ambient_dim(),
        constant: f.is_constant(),
        doubly_periodic: f.period_lattice().is_some(),
        lipschitz: lambda,
        derivative_at_origin,
        roundtrip_exact,
    })
}

fn run_curve_check(config: &ExperimentConfig, state: &mut RunState) -> brody::Result<()> {
    let params = config
        .curve
        .clone()
        .ok_or_else(|| BrodyError::Parse("curve-check requires a [curve] section".into()))?;
    let report = check_curve(&params.file)?;
    state.check(
        "curve-parses-and-normalizes",
        true,
        format!("N = {}, lipschitz = {}", report.ambient_dim, report.lipschitz),
    );
    state.report(
        "curve.report.json",
        serde_json::to_string_pretty(&report).expect("report serializes"),
    );
    Ok(())
}

/// One row of the aggregated summary.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub directory: String,
    pub kind: String,
    pub seed: u64,
    pub status: i32,
    pub passes: usize,
    pub failures: usize,
}

/// Aggregated summary over every manifest found in a directory tree.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub runs: Vec<SummaryRow>,
    /// Max headline `ρ̂` over the listed rho-search runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_dimension: Option<f64>,
    pub all_pass: bool,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Aggregate all `manifest.json` files found in `dir` or its immediate
/// subdirectories; rows are ordered by (seed, kind, directory).
pub fn emit_summary(dir: &Path) -> Result<Summary, String> {
    let mut manifests: Vec<(String, serde_json::Value)> = Vec::new();
    let mut candidates = vec![dir.to_path_buf()];
    if let Ok(entries) = std::fs::read_dir(dir) {
        for e in entries.flatten() {
            if e.path().is_dir() {
                candidates.push(e.path());
            }
        }
    }
    candidates.sort();
    for cand in candidates {
        let path = cand.join("manifest.json");
        if let Ok(text) = std::fs::read_to_string(&path) {
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            manifests.push((cand.display().to_string(), value));
        }
    }
    if manifests.is_empty() {
        return Err(format!("no manifest.json under {}", dir.display()));
    }
    let mut runs: Vec<SummaryRow> = manifests
        .iter()
        .map(|(d, m)| {
            let inv = m["invariants"].as_array().cloned().unwrap_or_default();
            let passes = inv.iter().filter(|i| i["pass"] == true).count();
            SummaryRow {
                directory: d.clone(),
                kind: m["kind"].as_str().unwrap_or("?").to_string(),
                seed: m["seed"].as_u64().unwrap_or(0),
                status: m["status"].as_i64().unwrap_or(1) as i32,
                passes,
                failures: inv.len() - passes,
            }
        })
        .collect();
    runs.sort_by(|a, b| {
        a.seed
            .cmp(&b.seed)
            .then_with(|| a.kind.cmp(&b.kind))
            .then_with(|| a.directory.cmp(&b.directory))
    });
    let rho_hat = manifests
        .iter()
        .filter_map(|(_, m)| m["rho_hat"].as_f64())
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    let mean_dimension = manifests
        .iter()
        .filter_map(|(_, m)| m["mean_dimension"].as_f64())
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    let all_pass = runs.iter().all(|r| r.status == EXIT_OK);
    Ok(Summary {
        runs,
        rho_hat,
        mean_dimension,
        all_pass,
    })
}
