//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use ucp_cli::cli::Cli;
use ucp_core::analysis::{allowed_bands, find_resonances, rho_k_grid, saturation_metric, scaling_fit};
use ucp_core::fractal::fractal_dimension;
use ucp_core::geometry::{build_layout, gap_width, segment_width};
use ucp_core::scattering::{layout_matrix, transmission_from_matrix};
use ucp_core::spp::{area_preserving_height, evaluate, reflection_asymptotic, unit_cell_width};
use ucp_core::{PotentialSpec, WaveContext};
use ucp_verify::*;

const SUITE_SIZE: usize = 200;

struct Verdict {
    label: String,
    pass: bool,
    detail: String,
}

fn verdict(label: impl Into<String>, pass: bool, detail: String) -> Verdict {
    Verdict { label: label.into(), pass, detail }
}

/// Closed-form and oracle `(T, R)` at one point.
struct Point {
    closed: (f64, f64),
    oracle: (f64, f64),
}

fn both_methods(spec: &PotentialSpec, k: f64) -> Point {
    let eval = evaluate(spec, k).expect("closed form");
    let layout = build_layout(spec).expect("layout");
    let ctx = WaveContext::new(k, spec.height).expect("context");
    let oracle = transmission_from_matrix(&layout_matrix(&layout, &ctx)).expect("oracle");
    Point { closed: (eval.transmission, eval.reflection), oracle }
}

fn flux_error(points: &[Point]) -> f64 {
    points.iter().flat_map(|p| [p.closed, p.oracle]).map(|(t, r)| (t + r - 1.0).abs()).fold(0.0, f64::max)
}

fn suite_points(suite: &[PotentialSpec]) -> Vec<Point> {
    suite
        .par_iter()
        .flat_map_iter(|spec| suite_k_points(spec, K_POINTS).into_iter().map(move |k| both_methods(spec, k)))
        .collect()
}

fn oracle_equivalence(points: &[Point]) -> Verdict {
    let worst = points.iter().map(|p| (p.closed.0 - p.oracle.0).abs()).fold(0.0, f64::max);
    verdict(
        "1 oracle equivalence",
        worst <= 1e-8,
        format!("{SUITE_SIZE} specs, {} points, max |T_closed - T_oracle| = {worst:.3e} (tol 1e-8)", points.len()),
    )
}

fn fractal_dimensions() -> Verdict {
    let cases = [(3.0, 0.6309), (4.0, 0.50), (4.5, 0.4607), (5.0, 0.4302)];
    let errors: Vec<f64> = cases.iter().map(|&(rho, d)| (fractal_dimension(2, rho).unwrap() - d).abs()).collect();
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    verdict("2 fractal dimension", worst <= 5e-4, format!("max |D - published| = {worst:.3e} (tol 5e-4)"))
}

fn geometry_conservation(suite: &[PotentialSpec]) -> Verdict {
    let mut worst = 0.0f64;
    for spec in suite {
        for s in 1..=spec.stages {
            let parent = segment_width(spec, s - 1).unwrap();
            let sum =
                spec.n as f64 * segment_width(spec, s).unwrap() + (spec.n - 1) as f64 * gap_width(spec, s).unwrap();
            worst = worst.max((sum - parent).abs() / parent);
        }
    }
    verdict("3 geometry conservation", worst <= 1e-12, format!("max relative residual {worst:.3e} (tol 1e-12)"))
}

fn flux_conservation(suite_one: &[Point], suite_six: &[Point]) -> Verdict {
    let (a, b) = (flux_error(suite_one), flux_error(suite_six));
    verdict(
        "4 flux conservation",
        a.max(b) <= 1e-10,
        format!("max |T + R - 1|: randomized suite {a:.3e}, scaling suite {b:.3e} (tol 1e-10)"),
    )
}

/// `1/(1 + σ₋² sin²(k̃L))` written out per regime.
fn single_barrier_reference(k: f64, v: f64, l: f64) -> f64 {
    let e = k * k - v;
    let x = if e > 0.0 {
        let kt = e.sqrt();
        0.5 * (k / kt - kt / k) * (kt * l).sin()
    } else {
        let kappa = (-e).sqrt();
        0.5 * (k / kappa + kappa / k) * (kappa * l).sinh()
    };
    1.0 / (1.0 + x * x)
}

fn single_barrier() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut worst = 0.0f64;
    let mut evanescent = 0;
    for i in 0..1000 {
        let v: f64 = rng.gen_range(1.0..=50.0);
        let l = rng.gen_range(1.0..=25.0);
        let k2 = if i < 100 { v * rng.gen_range(0.01..0.999) } else { v * rng.gen_range(1.001..9.0) };
        evanescent += usize::from(k2 < v);
        let k = k2.sqrt();
        let spec = PotentialSpec::new(2, 3.0, 1.0, 0.0, 0, l, v);
        let t = evaluate(&spec, k).unwrap().transmission;
        worst = worst.max((t - single_barrier_reference(k, v, l)).abs());
    }
    let mut limit_error = 0.0f64;
    let mut gap = 0.0f64;
    let mut step = 0.0f64;
    for _ in 0..100 {
        let v: f64 = rng.gen_range(1.0..=50.0);
        let l = rng.gen_range(1.0..=25.0);
        let spec = PotentialSpec::new(2, 3.0, 1.0, 0.0, 0, l, v);
        let t = |k2: f64| evaluate(&spec, k2.sqrt()).unwrap().transmission;
        let at = t(v);
        let k = v.sqrt();
        limit_error = limit_error.max((at - 1.0 / (1.0 + (k * l / 2.0).powi(2))).abs());
        let (below, above) = (t(v * (1.0 - 1e-9)), t(v * (1.0 + 1e-9)));
        gap = gap.max((at - 0.5 * (below + above)).abs());
        step = step.max((above - below).abs());
    }
    verdict(
        "5 single-barrier analytics",
        worst <= 1e-12 && limit_error <= 1e-12 && gap <= 1e-9,
        format!(
            "1000 points ({evanescent} evanescent): max error {worst:.3e} (tol 1e-12); k^2 = V limit error \
             {limit_error:.3e} (tol 1e-12); continuity gap {gap:.3e} (tol 1e-9, endpoint spread {step:.3e})"
        ),
    )
}

fn scaling_law() -> (Verdict, Vec<Point>) {
    let fits: Vec<_> = SCALING_CASES
        .par_iter()
        .map(|&(n, s)| {
            let spec = scaling_spec(n, s);
            (n, s, scaling_fit(&spec, SCALING_V0, SCALING_K, 200).unwrap())
        })
        .collect();
    let points: Vec<Point> = fits
        .par_iter()
        .flat_map_iter(|(n, s, fit)| {
            let spec = scaling_spec(*n, *s).with_height(fit.height);
            fit.k_axis.iter().step_by(10).map(move |&k| both_methods(&spec, k)).collect::<Vec<_>>()
        })
        .collect();
    let pass = fits.iter().all(|(_, _, f)| (f.slope + 2.0).abs() <= 0.1);
    let slopes: Vec<String> = fits.iter().map(|(n, s, f)| format!("N={n},S={s}:{:.3}", f.slope)).collect();
    (verdict("6 scaling law", pass, format!("slopes {} (want -2 +/- 0.1)", slopes.join(" "))), points)
}

fn saturation_direction() -> Verdict {
    let distance = |spec: PotentialSpec, pair: [usize; 2]| {
        saturation_metric(&spec, &pair, 4.0 / 2000.0, 4.0, 2000).unwrap().between(pair[0], pair[1]).unwrap()
    };
    let nu_hi = distance(PotentialSpec::new(3, 2.0, 0.5, 3.5, 6, 25.0, 25.0), [6, 12]);
    let nu_lo = distance(PotentialSpec::new(3, 2.0, 0.5, 1.0, 6, 25.0, 25.0), [6, 12]);
    let mu_hi = distance(PotentialSpec::new(3, 3.5, 9.0, 0.0, 2, 25.0, 25.0), [2, 4]);
    let mu_lo = distance(PotentialSpec::new(3, 3.5, 2.0, 0.0, 2, 25.0, 25.0), [2, 4]);
    verdict(
        "7 saturation direction",
        nu_hi < nu_lo && mu_hi < mu_lo,
        format!("d(6,12): nu=3.5 {nu_hi:.3e} < nu=1 {nu_lo:.3e}; d(2,4): mu=9 {mu_hi:.3e} < mu=2 {mu_lo:.3e}"),
    )
}

fn resonance_multiplicity() -> Verdict {
    let counts: Vec<(usize, usize)> = (2..=5)
        .map(|n| {
            let spec = resonance_spec(n);
            let window = allowed_bands(&spec, spec.stages, 0.01, 8.0, 800).unwrap()[0];
            (n, find_resonances(&spec, window.0, window.1, 400, 0.99).unwrap().peaks.len())
        })
        .collect();
    let pass = counts.iter().all(|&(n, c)| c == n - 1);
    let text: Vec<String> = counts.iter().map(|(n, c)| format!("N={n}:{c}")).collect();
    verdict("8 resonance multiplicity", pass, format!("peaks per window {} (want N-1)", text.join(" ")))
}

fn reflection_estimator(suite: &[PotentialSpec]) -> Verdict {
    // (relative error, same with the cell's sinc²(k̃ b_S) restored)
    let errors: Vec<(f64, f64)> = suite
        .par_iter()
        .filter_map(|spec| {
            let k = (1e4 * area_preserving_height(spec, spec.height).unwrap()).sqrt();
            let est = reflection_asymptotic(spec, spec.height, k).unwrap();
            let phase = (k * k - est.height).sqrt() * unit_cell_width(spec).unwrap();
            let restored = est.estimate * (phase.sin() / phase).powi(2);
            let rel = |r: f64| (r - est.exact).abs() / est.exact;
            (est.exact >= 1e-12).then(|| (rel(est.estimate), rel(restored)))
        })
        .collect();
    let worst = errors.iter().map(|e| e.0).fold(0.0, f64::max);
    let worst_restored = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    let over = errors.iter().filter(|e| e.0 > 0.05).count();
    verdict(
        "9 reflection estimator",
        over == 0,
        format!(
            "{} non-null specs, {over} above tol, max relative error {worst:.3e} (tol 0.05); \
             with sinc^2(k~ b_S) restored {worst_restored:.3e}",
            errors.len()
        ),
    )
}

fn cli_output(args: &[&str], workers: usize) -> String {
    let workers = workers.to_string();
    let argv = ["ucp"].iter().chain(args).copied().chain(["--workers", &workers]);
    let cli = Cli::try_parse_from(argv).expect("arguments parse");
    let config = cli.command.resolve().expect("config resolves");
    ucp_cli::execute(&cli.command, &config).expect("command runs").0
}

fn determinism() -> Verdict {
    let spec = ["--N", "3", "--rho", "4.5", "--mu", "0.5", "--nu", "0", "--L", "25", "--V", "25"];
    let runs: Vec<Vec<&str>> = vec![
        [&["layout", "--S", "3"][..], &spec].concat(),
        [&["transmit", "--S", "2", "--k", "7", "--method", "both"][..], &spec].concat(),
        [&["sweep", "--S", "3", "--k-min", "0.1", "--k-max", "8", "--points", "801", "--method", "both"][..], &spec]
            .concat(),
        [
            &["grid", "--S", "2", "--rho-min", "3.5", "--rho-max", "6", "--n-rho", "41", "--k-min", "6"][..],
            &spec,
            &["--k-max", "8", "--n-k", "101"],
        ]
        .concat(),
        [&["saturate", "--S", "1", "--stages", "1,2,3,4", "--k-max", "4", "--points", "500"][..], &spec].concat(),
        vec!["scaling", "--N", "4", "--rho", "3.5", "--mu", "0.5", "--nu", "1.5", "--S", "4", "--L", "1", "--V0", "10"],
        vec![
            "resonances",
            "--N",
            "5",
            "--rho",
            "5.1",
            "--mu",
            "0",
            "--nu",
            "1",
            "--S",
            "2",
            "--L",
            "5",
            "--V",
            "25",
            "--k-min",
            "0.01",
            "--k-max",
            "8",
        ],
        vec!["descriptors", "--N", "2", "--rho", "3"],
    ];
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for run in &runs {
        for format in ["csv", "json"] {
            let args: Vec<&str> = run.iter().copied().chain(["--format", format]).collect();
            let reference = cli_output(&args, 1);
            for workers in [4, 8] {
                compared += 1;
                if cli_output(&args, workers) != reference {
                    mismatched.push(format!("{} {format} workers={workers}", run[0]));
                }
            }
        }
    }
    verdict(
        "10 determinism",
        mismatched.is_empty(),
        format!("{compared} comparisons against workers=1, mismatches: {mismatched:?}"),
    )
}

/// Grid structure checks standing in for the density plots.
fn density_checks() -> Vec<Verdict> {
    let structure = |rho: (f64, f64), k: (f64, f64)| {
        let spec = PotentialSpec::new(3, rho.0, 0.5, 0.0, 2, 25.0, 25.0);
        let grid = rho_k_grid(&spec, rho.0, rho.1, 51, k.0, k.1, 2001).unwrap();
        let cells = grid.t.len() as f64;
        let null = grid.t.iter().filter(|&&t| t < 1e-6).count() as f64 / cells;
        let high = grid.t.iter().filter(|&&t| t > 0.99).count() as f64 / cells;
        let valid = grid.row_valid.iter().filter(|v| **v).count();
        (null > 0.5 && high > 0.0 && high < 0.05, format!("{valid}/51 valid rows, null {null:.3}, streaks {high:.4}"))
    };
    let (stated, stated_detail) = structure((1.25, 1.5), (6.0, 8.0));
    let (valid, valid_detail) = structure((9.0, 16.0), (2.0, 4.5));
    let means: Vec<f64> = (2..=6)
        .map(|s| {
            rho_k_grid(&PotentialSpec::new(3, 1.7, 0.5, 1.15, s, 25.0, 25.0), 1.6, 1.85, 41, 7.0, 10.0, 401)
                .unwrap()
                .mean()
        })
        .collect();
    let inversions: Vec<f64> = means.windows(2).filter(|w| w[1] < w[0]).map(|w| w[0] - w[1]).collect();
    let trend = inversions.len() <= 1 && inversions.iter().all(|&d| d <= 1e-3);
    vec![
        verdict("density nulls and streaks, rho in [1.25, 1.5]", stated, stated_detail),
        verdict("density nulls and streaks, rho in [9, 16]", valid, valid_detail),
        verdict("density mean non-decreasing in S", trend, format!("means {means:.4?}")),
    ]
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let started = Instant::now();
    let value = f();
    (value, started.elapsed().as_secs_f64())
}

fn main() -> ExitCode {
    let suite = random_suite(SUITE_SEED, SUITE_SIZE);
    let (suite_one, suite_one_time) = timed(|| suite_points(&suite));
    let ((scaling, suite_six), scaling_time) = timed(scaling_law);

    let mut results = vec![
        timed(|| oracle_equivalence(&suite_one)),
        timed(fractal_dimensions),
        timed(|| geometry_conservation(&suite)),
        timed(|| flux_conservation(&suite_one, &suite_six)),
        timed(single_barrier),
        (scaling, 0.0),
        timed(saturation_direction),
        timed(resonance_multiplicity),
        timed(|| reflection_estimator(&suite)),
        timed(determinism),
    ];
    results[0].1 += suite_one_time;
    results[5].1 += scaling_time;
    let (density, density_time) = timed(density_checks);
    results.extend(
        density.into_iter().map(|v| (verdict(format!("supplementary {}", v.label), v.pass, v.detail), density_time)),
    );

    for (v, seconds) in &results {
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} [{seconds:.1}s] {}", v.label, v.detail);
    }
    let failed = results.iter().filter(|(v, _)| !v.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
