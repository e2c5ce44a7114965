/*
Copyright 2026 The nc-admm Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/


use std::fs;
use std::path::{Path, PathBuf};

use nc_admm::data::LibsvmOptions;
use nc_admm::experiment::cli::main_with_args;
use nc_admm::experiment::{
    aggregate, check_report, cmd_check_params, cmd_gen_data, cmd_parse, cmd_rho_sweep, cmd_run, resolve_solver, run_file_name, run_grid,
    sidecar_path, sweep_dir, CheckOptions, ExperimentSpec, GenKind, GenOptions, RunOptions, SweepOptions, AGGREGATE_COLUMNS, AGGREGATE_FILE,
    EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, SUMMARY_FILE, SWEEP_COLUMNS, SWEEP_FILE, TRACE_COLUMNS,
};
use nc_admm::params::Certificate;
use nc_admm::solvers::Variant;
use nc_admm::Error;

const BASE: &str = r#"{
  "version": "v1",
  "problem": { "data": { "kind": "graph_guided", "n": 200, "d": 8 } },
  "solvers": [
    { "name": "dete", "variant": "DETE", "iterations": 30 },
    { "name": "stoc", "variant": "STOC", "iterations": 30, "batch_size": 10, "lyapunov": true },
    { "name": "saga", "variant": "SAGA", "iterations": 30, "batch_size": 50, "rho": 60, "eta": 1 }
  ],
  "repetitions": 3,
  "seed_base": 4,
  "trace_stride": 10
}"#;

fn write_spec(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("spec.json");
    fs::write(&path, text).unwrap();
    path
}

fn run_opts(spec: PathBuf, out: PathBuf) -> RunOptions {
    RunOptions { spec, out: Some(out), seed: None, workers: Some(1), allow_uncertified: true }
}

/// CSV text with the wall-time column removed.
fn without_wall_time(path: &Path) -> String {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let skip = headers.iter().position(|h| h == "wall_time_s").unwrap();
    let mut out = String::new();
    for rec in std::iter::once(Ok(headers)).chain(reader.records()) {
        let rec = rec.unwrap();
        let cells: Vec<&str> = rec.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, c)| c).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[test]
fn spec_validation_errors() {
    let bad = [
        BASE.replace("\"v1\"", "\"v2\""),
        BASE.replace("\"repetitions\": 3", "\"repetitions\": 0"),
        BASE.replace("\"trace_stride\": 10", "\"trace_stride\": 0"),
        BASE.replace("\"name\": \"stoc\"", "\"name\": \"dete\""),
        BASE.replace("\"name\": \"stoc\"", "\"name\": \"st oc\""),
        BASE.replace("\"seed_base\": 4", "\"seed_base\": 4, \"colour\": 1"),
        BASE.replace("\"d\": 8 }", "\"d\": 8 }, \"train_fraction\": 1.5"),
        r#"{"version": "v1", "problem": {"data": {"kind": "graph_guided", "n": 10, "d": 3}}, "solvers": []}"#.to_string(),
    ];
    for text in &bad {
        let err = ExperimentSpec::from_json(text).and_then(|s| s.validate().map(|_| s));
        assert!(err.is_err(), "accepted: {text}");
    }
    let ok = ExperimentSpec::from_json(BASE).unwrap();
    ok.validate().unwrap();
    assert_eq!(ok.solvers.len(), 3);
}

#[test]
fn step_without_penalty_is_a_config_error() {
    let spec = ExperimentSpec::from_json(&BASE.replace("\"rho\": 60, ", "")).unwrap();
    let built = spec.problem.build().unwrap();
    assert!(matches!(resolve_solver(&built, &spec.solvers[2], 1, None), Err(Error::Config(_))));
    // Without eta and rho the solver receives certified parameters.
    let s = resolve_solver(&built, &spec.solvers[0], 1, None).unwrap();
    assert!(s.suggested && s.certified());
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), BASE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(cmd_run(&run_opts(spec.clone(), a.clone())).unwrap().exit_code, EXIT_OK);
    assert_eq!(cmd_run(&run_opts(spec, b.clone())).unwrap().exit_code, EXIT_OK);
    let mut files = vec![AGGREGATE_FILE.to_string()];
    for solver in ["dete", "stoc", "saga"] {
        for rep in 0..3 {
            files.push(run_file_name(solver, rep));
        }
    }
    for f in &files {
        assert_eq!(without_wall_time(&a.join(f)), without_wall_time(&b.join(f)), "{f}");
    }
    let header = fs::read_to_string(a.join(run_file_name("stoc", 0))).unwrap();
    assert_eq!(header.lines().next().unwrap(), TRACE_COLUMNS.join(","));
    // t = 0, 10, 20, 30.
    assert_eq!(header.lines().count(), 5);
    let agg = fs::read_to_string(a.join(AGGREGATE_FILE)).unwrap();
    assert_eq!(agg.lines().next().unwrap(), AGGREGATE_COLUMNS.join(","));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(summary["version"], "v1");
    assert_eq!(summary["solvers"].as_array().unwrap().len(), 3);
}

#[test]
fn aggregate_is_the_mean_over_repetitions() {
    let spec = ExperimentSpec::from_json(BASE).unwrap();
    let built = spec.problem.build().unwrap();
    let solvers: Vec<_> = spec.solvers.iter().map(|s| resolve_solver(&built, s, 10, None).unwrap()).collect();
    let results = run_grid(&built, &solvers, 3, 4, 1).unwrap();
    for (solver, runs) in solvers.iter().zip(&results) {
        assert_eq!(runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![4, 5, 6]);
        let rows = aggregate(&solver.name, runs);
        assert_eq!(rows.len(), 4);
        for row in &rows {
            let at: Vec<_> = runs.iter().map(|r| r.records.iter().find(|x| x.t == row.t).unwrap()).collect();
            let mean = |f: &dyn Fn(&nc_admm::TraceRecord) -> f64| at.iter().map(|r| f(r)).sum::<f64>() / at.len() as f64;
            assert_eq!(row.runs, 3);
            assert!((row.objective - mean(&|r| r.objective)).abs() <= 1e-12 * row.objective.abs().max(1.0));
            assert!((row.feas_sq - mean(&|r| r.feas_sq)).abs() <= 1e-12 * row.feas_sq.abs().max(1.0));
            assert!((row.ifo - mean(&|r| r.ifo as f64)).abs() <= 1e-12 * row.ifo.max(1.0));
            let te = row.test_error.unwrap();
            assert!((te - mean(&|r| r.test_error.unwrap())).abs() <= 1e-12);
        }
        if solver.lyapunov {
            assert!(rows.iter().all(|r| r.lyapunov.is_some()));
        }
    }
    // Two workers give the same results as one.
    let parallel = run_grid(&built, &solvers, 3, 4, 2).unwrap();
    for (a, b) in results.iter().flatten().zip(parallel.iter().flatten()) {
        assert_eq!(a.records.last().unwrap().objective, b.records.last().unwrap().objective);
    }
}

#[test]
fn uncertified_solvers_are_refused_without_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), &BASE.replace("\"rho\": 60", "\"rho\": 1"));
    let mut opts = run_opts(spec, dir.path().join("out"));
    opts.allow_uncertified = false;
    let outcome = cmd_run(&opts).unwrap();
    assert_eq!(outcome.exit_code, EXIT_CONFIG);
    let report: serde_json::Value = serde_json::from_str(&outcome.message).unwrap();
    assert_eq!(report["refused"][0]["name"], "saga");
    assert!(!dir.path().join("out").exists());
}

const DIVERGENT: &str = r#"{
  "version": "v1",
  "problem": { "data": { "kind": "graph_guided", "n": 60, "d": 5 } },
  "solvers": [
    { "name": "blowup", "variant": "DETE", "iterations": 20, "eta": 1e22, "rho": 1e-14 },
    { "name": "fine", "variant": "DETE", "iterations": 20 }
  ],
  "repetitions": 2
}"#;

#[test]
fn divergence_in_every_repetition_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), DIVERGENT);
    let out = dir.path().join("out");
    let outcome = cmd_run(&run_opts(spec, out.clone())).unwrap();
    assert_eq!(outcome.exit_code, EXIT_DIVERGED);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(summary["solvers"][0]["diverged_runs"], 2);
    assert_eq!(summary["solvers"][1]["diverged_runs"], 0);
    assert_eq!(summary["solvers"][0]["runs"][0]["status"], "diverged");
    // The partial trace keeps the initial row.
    assert!(fs::read_to_string(out.join(run_file_name("blowup", 0))).unwrap().lines().count() >= 2);
}

#[test]
fn single_rho_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
      "version": "v1",
      "problem": { "data": { "kind": "graph_guided", "n": 200, "d": 8 } },
      "solvers": [
        { "name": "dete", "variant": "DETE", "iterations": 30, "rho": 60, "eta": 1 },
        { "name": "saga", "variant": "SAGA", "iterations": 30, "batch_size": 50, "rho": 60, "eta": 1 }
      ],
      "repetitions": 3,
      "trace_stride": 10
    }"#;
    let spec = write_spec(dir.path(), text);
    let run_out = dir.path().join("run");
    cmd_run(&run_opts(spec.clone(), run_out.clone())).unwrap();
    let sweep_out = dir.path().join("sweep");
    let sweep = SweepOptions { run: run_opts(spec, sweep_out.clone()), rhos: vec![60.0], relative: false, eta: Some(1.0) };
    cmd_rho_sweep(&sweep).unwrap();
    let point = sweep_dir(&sweep_out, 0, 60.0);
    for f in [run_file_name("dete", 1), run_file_name("saga", 2), AGGREGATE_FILE.to_string()] {
        assert_eq!(without_wall_time(&run_out.join(&f)), without_wall_time(&point.join(&f)), "{f}");
    }
    let table = fs::read_to_string(sweep_out.join(SWEEP_FILE)).unwrap();
    assert_eq!(table.lines().next().unwrap(), SWEEP_COLUMNS.join(","));
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn sweep_rejects_nonpositive_penalties() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), BASE);
    for rhos in [vec![0.0], vec![1.0, -2.0], vec![]] {
        let sweep = SweepOptions { run: run_opts(spec.clone(), dir.path().join("s")), rhos, relative: true, eta: None };
        assert!(matches!(cmd_rho_sweep(&sweep), Err(Error::Config(_))));
    }
}

#[test]
fn check_params_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), BASE);
    let opts = CheckOptions {
        spec: spec.clone(),
        variant: Variant::Stoc,
        eta: None,
        rho: None,
        r: None,
        batch_size: Some(10),
        epoch_len: None,
        iterations: 100,
        suggest: true,
    };
    let outcome = cmd_check_params(&opts).unwrap();
    assert_eq!(outcome.exit_code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&outcome.message).unwrap();
    let cert: Certificate = serde_json::from_value(v["certificate"].clone()).unwrap();
    assert!(cert.accepted());
    assert_eq!(serde_json::to_value(&cert).unwrap(), v["certificate"]);

    let built = ExperimentSpec::load(&spec).unwrap().problem.build().unwrap();
    let rejected = CheckOptions { rho: Some(1.0), eta: Some(1.0), suggest: false, ..opts };
    assert!(!check_report(&built, &rejected).unwrap().accepted);
    assert_eq!(cmd_check_params(&rejected).unwrap().exit_code, EXIT_CONFIG);
}

#[test]
fn generated_data_parses_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("gg.svm");
    cmd_gen_data(&GenOptions { kind: GenKind::GraphGuided, n: 120, size: 6, seed: 2, out: data.clone() }).unwrap();
    assert!(sidecar_path(&data).exists());
    let report: serde_json::Value = serde_json::from_str(&cmd_parse(&data, &LibsvmOptions::default()).unwrap().message).unwrap();
    assert_eq!((report["n"].as_u64(), report["classes"].as_u64()), (Some(120), Some(2)));

    let spec = r#"{
      "version": "v1",
      "problem": {
        "data": { "kind": "libsvm", "path": "gg.svm", "labels": "Auto", "dim": 6, "sidecar": "gg.json" },
        "model": { "kind": "graph_guided" }
      },
      "solvers": [ { "name": "stoc", "variant": "STOC", "iterations": 20, "batch_size": 5 } ]
    }"#;
    let spec = write_spec(dir.path(), spec);
    let out = dir.path().join("out");
    assert_eq!(cmd_run(&run_opts(spec, out.clone())).unwrap().exit_code, EXIT_OK);
    assert!(out.join(run_file_name("stoc", 0)).exists());

    let overlap = dir.path().join("ov.svm");
    cmd_gen_data(&GenOptions { kind: GenKind::Overlap, n: 30, size: 3, seed: 1, out: overlap.clone() }).unwrap();
    assert_eq!(nc_admm::data::read_libsvm(&overlap, &LibsvmOptions { dim: Some(9), ..Default::default() }).unwrap().d(), 9);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), BASE);
    let s = spec.to_str().unwrap();
    let out = dir.path().join("cli");
    let o = out.to_str().unwrap();
    assert_eq!(main_with_args(["nc-admm", "--help"]), 0);
    assert_eq!(main_with_args(["nc-admm", "run"]), EXIT_CONFIG);
    assert_eq!(main_with_args(["nc-admm", "frobnicate"]), EXIT_CONFIG);
    // The hand-picked SAGA penalty is uncertified.
    assert_eq!(main_with_args(["nc-admm", "run", "--spec", s, "--out", o]), EXIT_CONFIG);
    assert!(!out.exists());
    assert_eq!(main_with_args(["nc-admm", "run", "--spec", s, "--out", o, "--allow-uncertified"]), EXIT_OK);
    assert!(out.join(AGGREGATE_FILE).exists());
    assert_eq!(main_with_args(["nc-admm", "--workers", "2", "run", "--spec", s, "--out", o, "--seed", "9", "--allow-uncertified"]), EXIT_OK);
    assert_eq!(main_with_args(["nc-admm", "run", "--spec", "/nonexistent/spec.json", "--out", o]), EXIT_CONFIG);
    let bad_dir = dir.path().join("bad");
    fs::create_dir(&bad_dir).unwrap();
    let bad = write_spec(&bad_dir, &BASE.replace("\"v1\"", "\"v0\""));
    assert_eq!(main_with_args(["nc-admm", "run", "--spec", bad.to_str().unwrap(), "--out", o]), EXIT_CONFIG);
    assert_eq!(main_with_args(["nc-admm", "check-params", "--spec", s, "--variant", "dete", "--suggest"]), EXIT_OK);
    let data = dir.path().join("x.svm");
    let d = data.to_str().unwrap();
    assert_eq!(main_with_args(["nc-admm", "gen-data", "--kind", "overlap", "--n", "10", "--size", "2", "--out", d]), EXIT_OK);
    assert_eq!(main_with_args(["nc-admm", "parse", d, "--labels", "binary"]), EXIT_OK);
    assert_eq!(main_with_args(["nc-admm", "rho-sweep", "--spec", s, "--out", o, "--rhos", "0.5,2", "--relative"]), EXIT_OK);
}
