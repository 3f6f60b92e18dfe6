//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use misweave::compare::compare;
use misweave::integrators::{agreement_fraction, render, EstimatorStats, Integrator, RenderConfig};
use misweave::pathwalk::WrongWeights;
use misweave::scene::{builtin_scene, Scene};
use misweave::verification::{run_verify, VerifyOptions, VerifyReport, VIOLATION_THRESHOLD};

const SEED: u64 = 1;
const VERIFY_PATHS: usize = 10_000;
const SCENES: [&str; 3] = ["furnace", "box", "smalllight"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn scene(name: &str) -> Scene {
    builtin_scene(name).expect("built-in scene")
}

fn suites_pass(reports: &[(&str, VerifyReport)], names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for (scene, r) in reports {
        for n in names {
            let s = r.suite(n).expect("suite present");
            ok &= s.pass() && s.n_cases > 0;
            detail.push(format!("{scene}/{n}={:.1e}", s.max_rel_err));
        }
    }
    (ok, detail.join(" "))
}

fn render_stats(name: &str, integrator: Integrator, spp: usize) -> (EstimatorStats, Duration) {
    let t = Instant::now();
    let (_, stats) = render(&scene(name), &RenderConfig::new(integrator, spp, SEED)).expect("render");
    (stats, t.elapsed())
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();

    // Criteria 1, 2, 7 and 9 share one verification run per scene.
    let t = Instant::now();
    let reports: Vec<(&str, VerifyReport)> =
        SCENES.iter().map(|&n| (n, run_verify(&scene(n), VERIFY_PATHS, SEED, &VerifyOptions::default(), false).expect("verify"))).collect();
    let verify_time = t.elapsed();

    let (ok, detail) = suites_pass(&reports, &["engine_equivalence"]);
    let fast = verify_time <= Duration::from_secs(60);
    results.push((1, "engine equivalence", Outcome { pass: ok && fast, detail: format!("{detail} time={verify_time:.1?}") }));

    let (ok, detail) = suites_pass(&reports, &["partition_connect", "partition_connect_merge"]);
    results.push((2, "partition of unity", Outcome { pass: ok, detail }));

    let t = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for integrator in [Integrator::Pt, Integrator::Lt, Integrator::Bpt] {
        let (stats, _) = render_stats("furnace", integrator, 1024);
        let worst = (0..stats.pixels.len()).flat_map(|p| stats.mean(p).to_array()).map(|v| ((v - 2.0) / 2.0).abs()).fold(0.0_f64, f64::max);
        ok &= worst <= 0.01 && stats.nan_count == 0;
        detail.push(format!("{integrator:?} worst={:.2}%", 100.0 * worst));
    }
    let elapsed = t.elapsed();
    ok &= elapsed <= Duration::from_secs(120);
    results.push((3, "furnace unbiasedness", Outcome { pass: ok, detail: format!("{} time={elapsed:.1?}", detail.join(" ")) }));

    let runs: Vec<EstimatorStats> =
        [Integrator::Pt, Integrator::Lt, Integrator::Bpt].into_iter().map(|i| render_stats("box", i, 4096).0).collect();
    let mut ok = runs.iter().all(|s| s.nan_count == 0);
    let mut detail = Vec::new();
    for (a, b, label) in [(0, 1, "pt/lt"), (0, 2, "pt/bpt"), (1, 2, "lt/bpt")] {
        let f = agreement_fraction(&runs[a], &runs[b], 3.0);
        ok &= f >= 0.99;
        detail.push(format!("{label}={:.2}%", 100.0 * f));
    }
    results.push((4, "cross-estimator agreement", Outcome { pass: ok, detail: detail.join(" ") }));

    let wrong = VerifyOptions { rr: Some(true), wrong_weights: WrongWeights::OmitRr, ..VerifyOptions::default() };
    let r = run_verify(&scene("box"), VERIFY_PATHS, SEED, &wrong, false).expect("verify");
    let frac = r.rr_violation_fraction();
    let (correct, _) = suites_pass(&reports, &["engine_equivalence", "partition_connect", "partition_connect_merge"]);
    results.push((
        5,
        "roulette falsifiability",
        Outcome {
            pass: r.rr_affected > 0 && frac >= 0.01 && correct,
            detail: format!("violations={}/{} ({:.1}%) > {VIOLATION_THRESHOLD:e}", r.rr_violations, r.rr_affected, 100.0 * frac),
        },
    ));

    let box_scene = scene("box");
    assert!(box_scene.has_shading_normals());
    let wrong = VerifyOptions { shading: Some(true), wrong_weights: WrongWeights::OmitShadingCorrection, ..VerifyOptions::default() };
    let r = run_verify(&box_scene, VERIFY_PATHS, SEED, &wrong, false).expect("verify");
    let (correct, _) = suites_pass(&reports, &["engine_equivalence"]);
    results.push((
        6,
        "shading-normal falsifiability",
        Outcome {
            pass: r.equivalence_breaks >= 1 && correct,
            detail: format!("equivalence breaks={} of {} paths", r.equivalence_breaks, r.n_paths),
        },
    ));

    let (ok, detail) = suites_pass(&reports, &["merge_factor", "partition_connect_merge"]);
    results.push((7, "merge factor", Outcome { pass: ok, detail }));

    let c = compare(&scene("smalllight"), 1024, SEED, 65536, None).expect("compare");
    let (pt, lt, bpt) = (c.mse(Integrator::Pt).unwrap(), c.mse(Integrator::Lt).unwrap(), c.mse(Integrator::Bpt).unwrap());
    results.push((8, "mis benefit", Outcome { pass: bpt <= pt.max(lt), detail: format!("mse pt={pt:.3e} lt={lt:.3e} bpt={bpt:.3e}") }));

    let (ok, detail) = suites_pass(&reports, &["oracle_pdf", "oracle_throughput"]);
    let enough = reports.iter().all(|(_, r)| r.n_paths >= VERIFY_PATHS);
    results.push((9, "oracle agreement", Outcome { pass: ok && enough, detail }));

    let mut all = true;
    for (n, name, o) in &results {
        all &= o.pass;
        println!("criterion {n} {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
