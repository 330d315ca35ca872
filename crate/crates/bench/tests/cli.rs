use std::path::PathBuf;

use minimax_bench::config::{parse_json, ProblemConfig, RunConfig, SweepConfig};
use minimax_bench::run::{execute, RunStatus};
use minimax_bench::sweep::{cells, format_number, log_log_slope, run_sweep, to_csv, HEADER};
use minimax_bench::{cmd_solve, cmd_sweep, cmd_verify, EXIT_FAILURE, EXIT_INVALID, EXIT_OK};

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn solve(body: &str) -> (i32, String, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "run.json", body);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cmd_solve(&path, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const ANCHOR: &str = r#"{
    "family": "quadratic_scsc", "dim_x": 1, "dim_y": 1,
    "p": [2.0], "a": [1.0], "q": [2.0], "b": [1.0], "c": [-1.0],
    "set_x": {"kind": "whole_space", "dim": 1},
    "set_y": {"kind": "ball", "center": [0.0], "radius": 2.0}
}"#;

#[test]
fn minimal_quadratic_solve_succeeds() {
    let (code, out, _) = solve(&format!(r#"{{"problem": {ANCHOR}, "solver": {{"name": "minimax_appa", "eps": 1e-6, "mode": "practical"}}}}"#));
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["mode"], "practical");
    assert_eq!(v["certificate"]["kind"], "duality_gap");
    assert_eq!(v["certificate"]["meets_eps"], true);
    assert!((v["x"][0].as_f64().unwrap() + 0.2).abs() < 1e-3);
    assert!(v["iterations"].as_u64().unwrap() >= 1);
    assert!(v["grad_x_calls"].as_u64().unwrap() > 0);
    assert!(v["wall_time_ms"].is_null());
}

#[test]
fn solve_rejects_bad_configs() {
    let missing_seed = r#"{"problem": {"family": "nc_sc_sin", "dim": 1, "mu_y": 2.0, "r": 1.0},
        "solver": {"name": "minimax_ppa", "eps": 0.01, "iterations": 5}}"#;
    let (code, _, err) = solve(missing_seed);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("seed"));
    for eps in ["0", "-1"] {
        let (code, _, _) = solve(&format!(r#"{{"problem": {ANCHOR}, "solver": {{"name": "minimax_appa", "eps": {eps}}}}}"#));
        assert_eq!(code, EXIT_INVALID);
    }
    let unknown = r#"{"problem": {"family": "nc_c_toy", "dim": 1, "r": 1.0, "mu": 3},
        "solver": {"name": "nc_accelerated", "eps": 0.1, "iterations": 3, "seed": 1}}"#;
    assert_eq!(solve(unknown).0, EXIT_INVALID);
    let top_level = format!(r#"{{"problem": {ANCHOR}, "solver": {{"name": "minimax_appa", "eps": 0.1}}, "verbose": true}}"#);
    assert_eq!(solve(&top_level).0, EXIT_INVALID);
    // Strong convexity in x is a precondition of the accelerated proximal point solver.
    let no_mu = r#"{"problem": {"family": "nc_sc_sin", "dim": 1, "mu_y": 2.0, "r": 1.0},
        "solver": {"name": "minimax_appa", "eps": 0.1, "iterations": 3}}"#;
    assert_eq!(solve(no_mu).0, EXIT_INVALID);
    // No iteration formula for proximal point.
    let no_t = r#"{"problem": {"family": "nc_sc_sin", "dim": 1, "mu_y": 2.0, "r": 1.0},
        "solver": {"name": "minimax_ppa", "eps": 0.1, "seed": 1}}"#;
    assert!(solve(no_t).2.contains("iterations"));
    let bad_start = format!(r#"{{"problem": {ANCHOR}, "solver": {{"name": "minimax_appa", "eps": 0.1, "x0": [1.0, 2.0]}}}}"#);
    assert_eq!(solve(&bad_start).0, EXIT_INVALID);
    let dir = tempfile::tempdir().unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(cmd_solve(&dir.path().join("absent.json"), &mut out, &mut err), EXIT_INVALID);
}

#[test]
fn exhausted_budget_exits_one() {
    let body = format!(
        r#"{{"problem": {ANCHOR}, "solver": {{"name": "maximin_ag2", "eps": 1e-9}}, "caps": {{"max_outer": 1, "max_inner": 1}}}}"#
    );
    let (code, out, _) = solve(&body);
    assert_eq!(code, EXIT_FAILURE);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "budget_exhausted");
}

#[test]
fn every_solver_runs_from_a_config() {
    let cases = [
        (r#"{"family": "diagonal_quadratic", "kappa_x": 4, "kappa_y": 4}"#, "maximin_ag2", 1e-3, None),
        (r#"{"family": "diagonal_quadratic", "kappa_x": 3, "kappa_y": 3}"#, "scsc_near_optimal", 1e-3, None),
        (r#"{"family": "scc_bilinear", "mu_x": 1.0, "b": [0.0], "m": 1, "n": 1, "a": [1.0], "diameter": 2.0}"#, "scc_solve", 0.1, Some(30)),
        (r#"{"family": "scc_bilinear", "mu_x": 1.0, "b": [0.0], "m": 1, "n": 1, "a": [1.0], "diameter": 2.0}"#, "scc_near_optimal", 0.1, Some(20)),
        (r#"{"family": "bilinear_simplex", "m": 2, "n": 2, "a": [1, -1, -1, 1]}"#, "cc_solve", 0.5, Some(10)),
        (r#"{"family": "nc_sc_sin", "dim": 1, "mu_y": 2.0, "r": 1.0}"#, "minimax_ppa", 0.1, Some(20)),
        (r#"{"family": "nc_sc_sin", "dim": 1, "mu_y": 2.0, "r": 1.0}"#, "nsc_accelerated", 0.1, Some(20)),
        (r#"{"family": "nc_c_toy", "dim": 1, "r": 1.0}"#, "nc_solve", 0.1, Some(10)),
        (r#"{"family": "nc_c_toy", "dim": 1, "r": 1.0}"#, "nc_moreau_solve", 0.1, Some(3)),
        (r#"{"family": "nc_c_toy", "dim": 1, "r": 1.0}"#, "nc_accelerated", 0.1, Some(20)),
    ];
    for (problem, name, eps, t) in cases {
        let t = t.map(|t| format!(r#", "iterations": {t}"#)).unwrap_or_default();
        let body = format!(r#"{{"problem": {problem}, "solver": {{"name": "{name}", "eps": {eps}, "seed": 5, "mode": "practical"{t}}}, "timing": true}}"#);
        let config: RunConfig = parse_json(&body).unwrap();
        let r = execute(&config.problem, &config.solver, &config.caps, config.timing).unwrap();
        assert_eq!(r.solver, name);
        assert!(r.certificate.is_some(), "{name}: {:?}", r.certificate_failure);
        assert!(r.wall_time_ms.unwrap() >= 0.0);
        assert_eq!(r.seed, Some(5));
    }
}

#[test]
fn faithful_run_without_clamping_says_no() {
    let config: RunConfig =
        parse_json(&format!(r#"{{"problem": {ANCHOR}, "solver": {{"name": "maximin_ag2", "eps": 0.1}}}}"#)).unwrap();
    let r = execute(&config.problem, &config.solver, &config.caps, false).unwrap();
    assert_eq!(r.clamped, "no");
    assert!(r.ledger.iter().all(|e| !e.clamped));
    // A tiny eps at kappa = 10 forces eps / (10 kx ky)^7 under the floor.
    let config: RunConfig = parse_json(
        r#"{"problem": {"family": "diagonal_quadratic", "kappa_x": 10, "kappa_y": 10},
            "solver": {"name": "maximin_ag2", "eps": 1e-3}, "caps": {"max_outer": 2, "max_inner": 50}}"#,
    )
    .unwrap();
    let r = execute(&config.problem, &config.solver, &config.caps, false).unwrap();
    assert!(r.clamped.split(';').any(|n| n == "ag2.inner_eps"), "{}", r.clamped);
    assert!(r.ledger.iter().any(|e| e.name == "ag2.inner_eps" && e.clamped && e.applied > e.theoretical));
}

const SWEEP: &str = r#"{
    "solvers": [{"name": "maximin_ag2", "mode": "practical"}],
    "problem": {"family": "diagonal_quadratic", "coupling": 0.5},
    "grid": {"kappa_x": [4, 2], "kappa_y": [3, 2], "eps": [0.001], "seeds": [11]}
}"#;

#[test]
fn sweep_grid_header_order_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "sweep.json", SWEEP);
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(cmd_sweep(&path, &mut out, &mut err), EXIT_OK, "{}", String::from_utf8_lossy(&err));
        out
    };
    let first = run();
    assert_eq!(first, run());
    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[0],
        "solver,problem,dim_x,dim_y,kappa_x,kappa_y,eps,mode,seed,grad_x_calls,grad_y_calls,outer_iters,certificate,cert_error,wall_time_ms,status,clamped"
    );
    assert_eq!(lines[0], HEADER.join(","));
    let keys: Vec<(f64, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 17);
            assert_eq!(f[14], "");
            assert_eq!(f[15], "ok");
            (f[4].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    assert_eq!(keys, [(2.0, 2.0), (2.0, 3.0), (4.0, 2.0), (4.0, 3.0)]);
}

#[test]
fn cell_seeds_and_worker_counts() {
    let mut config: SweepConfig = parse_json(SWEEP).unwrap();
    let seeds: Vec<u64> = cells(&config).iter().map(|c| c.seed).collect();
    assert_eq!(seeds, [11, 10, 9, 8]);
    config.workers = Some(1);
    let a = to_csv(&run_sweep(&config).unwrap());
    config.workers = Some(3);
    assert_eq!(a, to_csv(&run_sweep(&config).unwrap()));
    config.timing = true;
    let rows = run_sweep(&config).unwrap();
    assert!(rows.iter().all(|r| r.wall_time_ms.is_some()));
}

#[test]
fn sweep_config_validation_and_invalid_cells() {
    let fixed_with_kappa = r#"{"solvers": [{"name": "maximin_ag2"}],
        "problem": {"family": "fixed", "problem": {"family": "nc_sc_sin", "dim": 1, "mu_y": 2.0, "r": 1.0}},
        "grid": {"kappa_x": [2], "kappa_y": [2], "eps": [0.1]}}"#;
    let dir = tempfile::tempdir().unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(cmd_sweep(&write(&dir, "a.json", fixed_with_kappa), &mut out, &mut err), EXIT_INVALID);
    let no_kappa = r#"{"solvers": [{"name": "maximin_ag2"}], "problem": {"family": "diagonal_quadratic"}, "grid": {"eps": [0.1]}}"#;
    assert_eq!(cmd_sweep(&write(&dir, "b.json", no_kappa), &mut out, &mut err), EXIT_INVALID);

    // kappa < 1 cannot be generated; the cell is reported, the sweep exits 1.
    let bad_cell = r#"{"solvers": [{"name": "maximin_ag2"}], "problem": {"family": "diagonal_quadratic"},
        "grid": {"kappa_x": [0.5, 2], "kappa_y": [2], "eps": [0.1]}}"#;
    let mut out = Vec::new();
    assert_eq!(cmd_sweep(&write(&dir, "c.json", bad_cell), &mut out, &mut err), EXIT_FAILURE);
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",invalid_config,"));

    // Fixed problems take their condition numbers from the profile.
    let fixed: SweepConfig = parse_json(
        r#"{"solvers": [{"name": "nsc_accelerated", "iterations": 5}],
            "problem": {"family": "fixed", "problem": {"family": "nc_sc_sin", "dim": 1, "mu_y": 2.0, "r": 1.0}},
            "grid": {"eps": [0.1, 0.5], "seeds": [1, 2]}}"#,
    )
    .unwrap();
    let rows = run_sweep(&fixed).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.kappa_x.is_none() && r.kappa_y.is_some() && r.status == RunStatus::Ok));
    assert!(rows.windows(2).all(|w| (w[0].eps, w[0].seed) <= (w[1].eps, w[1].seed)));
}

#[test]
fn output_path_receives_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let mut config: serde_json::Value = serde_json::from_str(SWEEP).unwrap();
    config["output"] = serde_json::Value::String(target.to_string_lossy().into_owned());
    let path = write(&dir, "s.json", &config.to_string());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(cmd_sweep(&path, &mut out, &mut err), EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(target).unwrap().lines().count(), 5);
}

#[test]
fn number_formatting_round_trips() {
    for v in [0.1, 1.0, 1e-7, 123456.789, 2.0f64.sqrt(), 1e300, -0.0, 5e-324] {
        let s = format_number(v);
        assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
    }
    assert_eq!(format_number(0.001), "0.001");
    assert_eq!(format_number(10.0), "10.0");
}

#[test]
fn slope_of_exact_power_laws() {
    let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|k: &f64| (*k, 3.0 * k.powf(0.5))).collect();
    assert!((log_log_slope(&pts) - 0.5).abs() < 1e-12);
    let pts: Vec<(f64, f64)> = [2.0, 7.0, 40.0, 90.0].iter().map(|k: &f64| (*k, k * k)).collect();
    assert!((log_log_slope(&pts) - 2.0).abs() < 1e-12);
}

#[test]
fn verify_exit_codes() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(cmd_verify("contraction", &mut out, &mut err), EXIT_OK);
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("PASS "));
    let mut out = Vec::new();
    assert_eq!(cmd_verify("no-such-suite", &mut out, &mut err), EXIT_INVALID);
    assert!(out.is_empty());
    let mut out = Vec::new();
    assert_eq!(cmd_verify("moreau", &mut out, &mut err), EXIT_OK);
    assert!(String::from_utf8(out).unwrap().contains("|x| at 2"));
}

#[test]
fn problem_configs_round_trip() {
    let p: ProblemConfig = parse_json(ANCHOR).unwrap();
    let back: ProblemConfig = parse_json(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(p, back);
    assert_eq!(p.family(), "quadratic_scsc");
    let built = p.build().unwrap();
    let (xs, ys) = built.reference.saddle.clone().unwrap();
    assert!((xs[0] + 0.2).abs() < 1e-15 && (ys[0] + 0.6).abs() < 1e-15);
    let bad: ProblemConfig = parse_json(r#"{"family": "nc_sc_sin", "dim": 0, "mu_y": 2.0, "r": 1.0}"#).unwrap();
    assert!(bad.build().is_err());
}
