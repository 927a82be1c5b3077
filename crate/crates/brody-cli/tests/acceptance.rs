//! Acceptance gate: the eleven end-to-end criteria of the laboratory.
//!
//! Each test prints exactly one `[PASS]`/`[FAIL]` line for its criterion
//! (run with `--nocapture` to see the lines of passing tests).

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use brody::blowup;
use brody::curve::{self, DerivativeMethod, HoloCurve};
use brody::energy;
use brody::entropy;
use brody::geometry::{chordal_distance, fs_distance, ProjectivePoint};
use brody::pde;
use brody::poly::Poly;
use brody::rho;
use brody::{Domain, PlaneLattice};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

/// Random rational curve into `ℂPᴺ` of exact degree `deg`, with leading
/// coefficients bounded away from zero so all roots stay small.
fn random_rational(rng: &mut impl Rng, n: usize, deg: usize) -> HoloCurve {
    loop {
        let comps: Vec<Poly> = (0..=n)
            .map(|i| {
                let d = if i == 0 { deg } else { rng.gen_range(0..=deg) };
                let coeffs: Vec<Complex64> = (0..=d)
                    .map(|k| {
                        let mag = if k == d { rng.gen_range(0.5..1.5) } else { 1.0 };
                        c(
                            mag * rng.gen_range(-1.0..1.0f64).signum()
                                * rng.gen_range(0.3..1.0),
                            rng.gen_range(-1.0..1.0),
                        )
                    })
                    .collect();
                Poly::new(coeffs)
            })
            .collect();
        if let Ok(f) = HoloCurve::rational(comps) {
            if !f.is_constant() {
                return f;
            }
        }
    }
}

#[test]
fn criterion_01_degree_energy_identity() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let disk = Domain::disk(c(0.0, 0.0), 40.0).unwrap();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let n = 1 + i % 3; // N ∈ {1,2,3}
        let deg = 1 + i % 3; // k ∈ {1,2,3}
        let f = random_rational(&mut rng, n, deg);
        let e = energy::energy(&f, &disk, 3).unwrap();
        let k = deg as f64;
        worst = worst.max((e - k).abs());
        assert!(
            e >= k - 0.01 && e <= k + 1e-6,
            "curve {i} (N={n}, k={deg}): energy {e}"
        );
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "degree-energy",
        secs <= 60.0,
        &format!("10 curves within [k-0.01, k], worst |e-k| = {worst:.2e}, {secs:.1}s"),
    );
}

#[test]
fn criterion_02_two_method_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let deg = rng.gen_range(1..=3);
        let f = random_rational(&mut rng, n, deg);
        let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let closed = f.spherical_derivative(z, DerivativeMethod::ClosedForm).unwrap();
        let stencil = f
            .spherical_derivative(z, DerivativeMethod::Laplacian(1e-3))
            .unwrap();
        worst = worst.max((closed - stencil).abs());
    }
    verdict(
        "two-method-derivative",
        worst <= 1e-4,
        &format!("worst |closed - stencil| = {worst:.2e} over 1000 pairs"),
    );
}

#[test]
fn criterion_03_distance_compatibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let pt = |rng: &mut ChaCha8Rng, n: usize| {
        ProjectivePoint::new(
            (0..=n)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect(),
        )
        .unwrap()
    };
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let (u, v) = (pt(&mut rng, n), pt(&mut rng, n));
        let d = chordal_distance(&u, &v);
        let dfs = fs_distance(&u, &v);
        worst = worst.max((d - (PI.sqrt() * dfs).sin()).abs());
    }
    let mut triangle_ok = true;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let (u, v, w) = (pt(&mut rng, n), pt(&mut rng, n), pt(&mut rng, n));
        if chordal_distance(&u, &w) > chordal_distance(&u, &v) + chordal_distance(&v, &w) + 1e-12
        {
            triangle_ok = false;
        }
    }
    verdict(
        "distance-compatibility",
        worst <= 1e-12 && triangle_ok,
        &format!("worst |d - sin(sqrt(pi) d_FS)| = {worst:.2e}; triangle on 1000 triples"),
    );
}

#[test]
fn criterion_04_helmholtz_suite() {
    let lat = PlaneLattice::rectangular(8.0, 8.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst_residual = 0.0f64;
    let mut bound_ok = true;
    for _ in 0..100 {
        let psi = pde::random_trig_field(&lat, 64, 64, 6, &mut rng).unwrap();
        let phi = pde::solve_helmholtz(&psi).unwrap();
        let back = pde::apply_helmholtz(&phi).unwrap();
        let residual = back
            .values()
            .iter()
            .zip(psi.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        worst_residual = worst_residual.max(residual);
        if phi.sup_norm() > 4.0 * psi.sup_norm() {
            bound_ok = false;
        }
    }
    // Analytic solutions: constants and a single Fourier mode.
    use brody::field::FieldGeometry;
    let constant =
        brody::ScalarField::from_fn(FieldGeometry::Torus(lat.clone()), 64, 64, |_| 0.7).unwrap();
    let err_c = pde::solve_helmholtz(&constant)
        .unwrap()
        .values()
        .iter()
        .map(|v| (v - 0.7).abs())
        .fold(0.0f64, f64::max);
    let mode = brody::ScalarField::from_fn(FieldGeometry::Torus(lat.clone()), 64, 64, |z| {
        (2.0 * PI * z.re / 8.0).cos()
    })
    .unwrap();
    let eig = 1.0 + (2.0 * PI / 8.0).powi(2);
    let err_m = pde::solve_helmholtz(&mode)
        .unwrap()
        .values()
        .iter()
        .zip(mode.values())
        .map(|(a, b)| (a - b / eig).abs())
        .fold(0.0f64, f64::max);
    verdict(
        "helmholtz-suite",
        worst_residual <= 1e-10 && err_c <= 1e-10 && err_m <= 1e-10 && bound_ok,
        &format!(
            "100/100 residual<=1e-10 (worst {worst_residual:.2e}), analytic {err_c:.1e}/{err_m:.1e}, bound 4 holds"
        ),
    );
}

#[test]
fn criterion_05_chern_integrality() {
    use brody::curve::EllipticExpr;
    let lat = PlaneLattice::square(1.0).unwrap();
    let p = HoloCurve::elliptic(
        lat.clone(),
        vec![
            EllipticExpr::constant(c(1.0, 0.0)),
            EllipticExpr::new(vec![(1, 0, c(1.0, 0.0))]).unwrap(),
        ],
    )
    .unwrap();
    let pp = HoloCurve::elliptic(
        lat.clone(),
        vec![
            EllipticExpr::constant(c(1.0, 0.0)),
            EllipticExpr::new(vec![(0, 1, c(1.0, 0.0))]).unwrap(),
        ],
    )
    .unwrap();
    let i4 = pde::chern_integral(&p, &lat, 512).unwrap();
    let i6 = pde::chern_integral(&pp, &lat, 512).unwrap();
    verdict(
        "chern-integrality",
        (i4 - 4.0).abs() <= 0.02 && (i6 - 6.0).abs() <= 0.02,
        &format!("[1:wp] -> {i4:.4} (4), [1:wp'] -> {i6:.4} (6) at 512^2"),
    );
}

#[test]
fn criterion_06_blowup_suite() {
    let start = std::time::Instant::now();
    // Bubble constant: defining property to 1e-8 for N in 1..=3.
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
        worst_dev = worst_dev
            .max((blowup::bubble_derivative_profile(n, a, 0.5 * (lo + hi)) - 0.1).abs());
    }
    assert!(worst_dev <= 1e-8, "bubble constant deviation {worst_dev:e}");
    // Derivative window (1/100, 1) on 20 admissible instances.
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let r = blowup::DEFAULT_R2;
    for i in 0..20 {
        let q = ProjectivePoint::new(vec![
            c(rng.gen_range(0.5..1.0), rng.gen_range(-0.5..0.5)),
            c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)),
        ])
        .unwrap();
        let eps = rng.gen_range(1e-5..3e-4);
        let f = near_constant(&q, eps);
        let spec = blowup::BubbleSpec::new(c(0.0, 0.0), q);
        let fh = blowup::blow_up_once(&f, &spec, r, blowup::DEFAULT_DELTA3).unwrap();
        let half = Domain::disk(spec.p, r / 2.0).unwrap();
        let (sup, _) = curve::lipschitz_sup(&fh, &half, 0.2).unwrap();
        assert!(sup > 0.01 && sup < 1.0, "instance {i}: sup {sup}");
    }
    // Resolve on 10 synthetic degenerate curves.
    let c4 = blowup::bubble_constant(1);
    let lambda_set = Domain::square(c(0.0, 0.0), 20.0).unwrap();
    let q0 = ProjectivePoint::from_real(&[1.0, 0.2]).unwrap();
    let probe = near_constant(&q0, 1e-5);
    let radius = blowup::smallest_feasible_radius(
        &probe,
        &lambda_set,
        blowup::DEFAULT_DELTA3,
        c4,
        blowup::DEFAULT_LAMBDA,
    )
    .unwrap();
    for i in 0..10 {
        let q = ProjectivePoint::new(vec![
            c(rng.gen_range(0.5..1.0), rng.gen_range(-0.5..0.5)),
            c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)),
        ])
        .unwrap();
        // Artificially flat: sup |df| far below the good threshold.
        let f = near_constant(&q, rng.gen_range(1e-7..1e-5));
        let (g, plan) = blowup::resolve(
            &f,
            &lambda_set,
            blowup::DEFAULT_LAMBDA,
            blowup::DEFAULT_DELTA3,
            radius,
            c4,
        )
        .unwrap();
        // resolve() verifies both postconditions internally; spot-check the
        // nondegeneracy one again through the public checker.
        let (ok, w) = blowup::check_resolved(&g, &plan).unwrap();
        assert!(ok, "curve {i}: worst sup {} at {}", w.worst_sup, w.worst_center);
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "blowup-suite",
        secs <= 300.0,
        &format!(
            "bubble constant to {worst_dev:.1e}, 20/20 windows, 10/10 resolves (R = {radius:.1}), {secs:.1}s"
        ),
    );
}

fn near_constant(q: &ProjectivePoint, eps: f64) -> HoloCurve {
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
    HoloCurve::rational(comps).unwrap()
}

#[test]
fn criterion_07_counting_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    // Chain inequality on 50 random finite metric spaces.
    for _ in 0..50 {
        let n = rng.gen_range(5..14);
        let coords: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let space = entropy::FiniteMetricSpace::from_points(
            (0..n).map(|i| format!("p{i}")).collect(),
            &coords,
            |a, b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt(),
        )
        .unwrap();
        let eps = rng.gen_range(0.2..1.0);
        let delta = 0.45 * eps;
        let sep = entropy::greedy_separated(&space, eps, 0).len();
        let cover = entropy::greedy_cover(&space, eps);
        let exact_sep = entropy::exact_separated(&space, eps);
        let exact_cov = entropy::exact_cover(&space, eps);
        assert!(sep <= cover);
        assert!(sep <= exact_sep);
        assert!(exact_cov <= cover);
        assert!(exact_cov <= entropy::exact_separated(&space, delta));
    }
    // Banach-ball bound for n <= 3 over the stated grid.
    for n in 1..=3usize {
        for &r in &[1.0f64, 2.0] {
            for &eps in &[0.25f64, 0.5, 1.0] {
                let per_axis = if n == 3 { 7 } else { 11 };
                let mut pts: Vec<Vec<f64>> = vec![vec![]];
                for _ in 0..n {
                    pts = pts
                        .into_iter()
                        .flat_map(|p| {
                            (0..per_axis).map(move |i| {
                                let mut q = p.clone();
                                q.push(-r + 2.0 * r * i as f64 / (per_axis - 1) as f64);
                                q
                            })
                        })
                        .collect();
                }
                let space = entropy::FiniteMetricSpace::from_points(
                    (0..pts.len()).map(|i| format!("x{i}")).collect(),
                    &pts,
                    |a, b| {
                        a.iter()
                            .zip(b.iter())
                            .map(|(x, y)| (x - y).abs())
                            .fold(0.0f64, f64::max)
                    },
                )
                .unwrap();
                let sep = entropy::greedy_separated(&space, eps, 0).len() as f64;
                assert!(
                    sep <= entropy::banach_ball_bound(n, r, eps),
                    "n={n} r={r} eps={eps}"
                );
            }
        }
    }
    verdict(
        "counting-suite",
        true,
        "chain on 50 spaces, exact-vs-greedy, Banach-ball bound on the (n, r, eps) grid",
    );
}

#[test]
fn criterion_08_ornstein_weiss_convergence() {
    use brody::curve::EllipticExpr;
    let lat = PlaneLattice::square(1.0).unwrap();
    let f = HoloCurve::elliptic(
        lat.clone(),
        vec![
            EllipticExpr::constant(c(1.0, 0.0)),
            EllipticExpr::new(vec![(1, 0, c(1.0, 0.0))]).unwrap(),
        ],
    )
    .unwrap();
    let cell_mean = energy::energy_density(&f, 1.0, 1).unwrap();
    let squares: Vec<Domain> = [4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|&s| Domain::square(c(0.0, 0.0), s).unwrap())
        .collect();
    // Scale the quadrature with the window so every window resolves the
    // unit-period integrand at >= 24 nodes per period.
    let h = |w: &Domain| {
        let extent = match w {
            Domain::Disk { radius, .. } => *radius,
            _ => {
                let (_, bw, bh) = w.bounding_box();
                bw.max(bh) / 2.0
            }
        };
        let level = (extent / 4.0).log2().ceil().max(0.0) as u32;
        energy::energy(&f, w, level)
    };
    let sq_trace = entropy::ornstein_weiss_trace(h, &squares).unwrap();
    let sq_last = *sq_trace.values.last().unwrap();
    let disks: Vec<Domain> = [4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|&s| Domain::disk(c(0.0, 0.0), s / 2.0).unwrap())
        .collect();
    let disk_trace = entropy::ornstein_weiss_trace(h, &disks).unwrap();
    let disk_last = *disk_trace.values.last().unwrap();
    let spread = sq_trace.spread.max(disk_trace.spread).max(0.02);
    let converged = (sq_last - cell_mean).abs() <= 0.02 * cell_mean;
    let agree = (disk_last - sq_last).abs() <= spread * sq_last;
    verdict(
        "ornstein-weiss",
        converged && sq_trace.spread <= 0.02 && agree,
        &format!(
            "square trace -> {sq_last:.5} (cell mean {cell_mean:.5}, spread {:.2e}); disks -> {disk_last:.5}",
            sq_trace.spread
        ),
    );
}

#[test]
fn criterion_09_rho_search() {
    let start = std::time::Instant::now();
    let fam1 = rho::default_family();
    let out1 =
        rho::maximize_rho(&fam1, rho::DEFAULT_BUDGET, rho::DEFAULT_RESTARTS, 109).unwrap();
    assert!(out1.rho_hat > 0.0 && out1.rho_hat < 1.0, "rho1 = {}", out1.rho_hat);
    let delta = out1.best.diagnostics.reeval_delta.unwrap();
    assert!(delta <= 0.01, "delta {delta}");
    let fam2 = rho::embedded_family();
    let out2 =
        rho::maximize_rho(&fam2, rho::DEFAULT_BUDGET, rho::DEFAULT_RESTARTS, 109).unwrap();
    assert!(out2.rho_hat >= out1.rho_hat - 1e-12);
    let d1 = rho::mean_dimension_estimate(1, out1.rho_hat).unwrap();
    let d2 = rho::mean_dimension_estimate(2, out2.rho_hat).unwrap();
    assert_eq!(d1, 4.0 * out1.rho_hat);
    assert_eq!(d2, 6.0 * out2.rho_hat);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "rho-search",
        secs <= 600.0,
        &format!(
            "rho1 = {:.4} (delta {delta:.1e}), rho2 = {:.4} >= rho1, dims {d1:.3}/{d2:.3}, {secs:.1}s",
            out1.rho_hat, out2.rho_hat
        ),
    );
}

#[test]
fn criterion_10_count_scaling() {
    use brody::curve::EllipticExpr;
    let lat = PlaneLattice::square(2.0).unwrap();
    let f = HoloCurve::elliptic(
        lat,
        vec![
            EllipticExpr::constant(c(1.0, 0.0)),
            EllipticExpr::new(vec![(1, 0, c(1.0, 0.0))]).unwrap(),
        ],
    )
    .unwrap();
    let (g, _) = curve::brody_normalize(&f, &f.default_search_box(), 0.05).unwrap();
    let eps = 0.05;
    let mut fitted = Vec::new();
    for &side in &[4.0f64, 8.0] {
        let sq = Domain::square(c(0.0, 0.0), side).unwrap();
        let report = brody::entropy::count_scaling_check(&g, 10.0, &sq, eps, 0.2, 120, 110)
            .unwrap();
        assert!(
            report.stable,
            "L = {side}: fit {} vs half-sample {}",
            report.fitted_c2, report.fitted_c2_half
        );
        assert!(report.log_count <= report.exponent * (report.fitted_c2 / eps).ln() + 1e-9);
        fitted.push((side, report.fitted_c2, report.c3));
    }
    verdict(
        "count-scaling",
        true,
        &format!(
            "L=4: C2 {:.4}, L=8: C2 {:.4} (C3 = {}), both stable within 20%",
            fitted[0].1, fitted[1].1, fitted[0].2
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    use brody_cli::{run_experiment, ExperimentConfig};
    let configs = [
        "kind = \"pde-selftest\"\nseed = 11\n[pde]\nsamples = 10\ngrid = 32\n",
        "kind = \"rho-search\"\nseed = 12\n[rho]\nbudget = 10\nrestarts = 1\n",
    ];
    for cfg_text in configs {
        let cfg = ExperimentConfig::from_toml(cfg_text).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let out_a = run_experiment(&cfg, dir_a.path()).unwrap();
        let out_b = run_experiment(&cfg, dir_b.path()).unwrap();
        assert_eq!(out_a.status, 0);
        assert_eq!(out_b.status, 0);
        for file in &out_a.manifest.reports {
            let a = std::fs::read(dir_a.path().join(file)).unwrap();
            let b = std::fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "report {file} differs between identical runs");
        }
    }
    verdict(
        "determinism",
        true,
        "byte-identical report bodies for repeated (config, seed) runs of two kinds",
    );
}
