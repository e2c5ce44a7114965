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

//! The harness subcommands. Each returns an [`Outcome`] whose exit code
//! follows the convention 0 = success, 2 = configuration or certification
//! failure, 3 = some solver diverged in every repetition.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::output::{format_float, write_artifacts, write_atomic, Summary};
use super::runner::{resolve_solver, run_grid, worker_count, ResolvedSolver, RunResult};
use super::spec::{graph_sidecar, BuiltProblem, ExperimentSpec, ProblemSpec, Sidecar, SPEC_VERSION};
use crate::data::{gen_graph_guided, gen_overlap_grid, read_libsvm, write_libsvm, LibsvmOptions};
use crate::error::{Error, Result};
use crate::params::{certify, suggest_params, Certificate, SuggestOptions, DEFAULT_BETA};
use crate::solvers::{SolverConfig, Variant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
/// Internal failures (numerical breakdown, broken invariants).
pub const EXIT_INTERNAL: i32 = 1;

/// Exit code for an error escaping a command.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Divergence { .. } => EXIT_DIVERGED,
        Error::Numerical(_) | Error::Internal(_) | Error::Capability(_) => EXIT_INTERNAL,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    /// Human-readable result for stdout.
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub spec: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub allow_uncertified: bool,
}

fn output_dir(spec: &ExperimentSpec, out: &Option<PathBuf>) -> PathBuf {
    out.clone().or_else(|| spec.output_dir.clone()).unwrap_or_else(|| PathBuf::from("nc-admm-out"))
}

/// One refused solver, without the (possibly long) schedule.
#[derive(Serialize)]
struct RefusedSolver<'a> {
    name: &'a str,
    variant: Variant,
    eta: f64,
    rho: f64,
    #[serde(with = "crate::params::ext_f64")]
    gamma_min: f64,
    interval: &'a crate::params::Interval,
}

#[derive(Serialize)]
struct Refusal<'a> {
    refused: Vec<RefusedSolver<'a>>,
    hint: &'static str,
}

fn resolve_all(spec: &ExperimentSpec, built: &BuiltProblem) -> Result<Vec<ResolvedSolver>> {
    spec.solvers.iter().map(|s| resolve_solver(built, s, spec.trace_stride, spec.time_budget)).collect()
}

fn refusal(solvers: &[ResolvedSolver]) -> Result<Option<Outcome>> {
    let refused: Vec<RefusedSolver> = solvers
        .iter()
        .filter(|s| !s.certified())
        .map(|s| RefusedSolver {
            name: &s.name,
            variant: s.config.variant,
            eta: s.config.eta,
            rho: s.config.rho,
            gamma_min: s.certificate.gamma_min(),
            interval: match &s.certificate {
                Certificate::Stoc(c) => &c.interval,
                Certificate::Vr(c) => &c.interval,
            },
        })
        .collect();
    if refused.is_empty() {
        return Ok(None);
    }
    let report = Refusal { refused, hint: "pass --allow-uncertified to run anyway, or omit rho to use certified parameters" };
    Ok(Some(Outcome { exit_code: EXIT_CONFIG, message: serde_json::to_string_pretty(&report)? }))
}

fn divergence_code(results: &[Vec<RunResult>]) -> i32 {
    if results.iter().any(|runs| !runs.is_empty() && runs.iter().all(RunResult::diverged)) {
        EXIT_DIVERGED
    } else {
        EXIT_OK
    }
}

fn execute(spec: &ExperimentSpec, built: &BuiltProblem, solvers: &[ResolvedSolver], dir: &Path, seed_base: u64, workers: usize) -> Result<(Summary, i32)> {
    let results = run_grid(built, solvers, spec.repetitions, seed_base, workers)?;
    let summary = Summary::new(built, solvers, &results, spec.repetitions, seed_base);
    write_artifacts(dir, &summary, &results)?;
    Ok((summary, divergence_code(&results)))
}

/// `run`: every solver × repetition, traces to CSV, summary to JSON.
pub fn cmd_run(opts: &RunOptions) -> Result<Outcome> {
    let spec = ExperimentSpec::load(&opts.spec)?;
    let built = spec.problem.build()?;
    let solvers = resolve_all(&spec, &built)?;
    if !opts.allow_uncertified {
        if let Some(refused) = refusal(&solvers)? {
            return Ok(refused);
        }
    }
    let dir = output_dir(&spec, &opts.out);
    let seed_base = opts.seed.unwrap_or(spec.seed_base);
    let (summary, code) = execute(&spec, &built, &solvers, &dir, seed_base, worker_count(opts.workers))?;
    let diverged: usize = summary.solvers.iter().map(|s| s.diverged_runs).sum();
    Ok(Outcome {
        exit_code: code,
        message: format!("wrote {} ({} solvers, {} repetitions, {diverged} diverged runs)", dir.display(), summary.solvers.len(), spec.repetitions),
    })
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub spec: PathBuf,
    pub variant: Variant,
    pub eta: Option<f64>,
    pub rho: Option<f64>,
    pub r: Option<f64>,
    pub batch_size: Option<usize>,
    pub epoch_len: Option<usize>,
    pub iterations: usize,
    /// Search certified parameters instead of checking given ones.
    pub suggest: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub variant: Variant,
    pub lipschitz: f64,
    pub eta: f64,
    pub rho: f64,
    pub r: f64,
    pub batch_size: usize,
    pub epoch_len: usize,
    pub accepted: bool,
    pub certificate: Certificate,
}

/// Only the problem part of a spec file is needed here.
fn load_problem(path: &Path) -> Result<ProblemSpec> {
    Ok(ExperimentSpec::load(path)?.problem)
}

pub fn check_report(built: &BuiltProblem, opts: &CheckOptions) -> Result<CheckReport> {
    let problem = &built.problem;
    let batch = opts.batch_size.unwrap_or_else(|| built.model.default_batch().min(problem.n()));
    let mut cfg = SolverConfig::new(opts.variant, opts.eta.unwrap_or_else(|| built.model.default_eta()), opts.rho.unwrap_or(1.0), batch, opts.iterations);
    cfg.epoch_len = opts.epoch_len;
    cfg.r = opts.r;
    let (cfg, certificate) = if opts.suggest {
        let s = suggest_params(problem, &cfg, &SuggestOptions { lipschitz: Some(built.lipschitz), ..SuggestOptions::default() })?;
        (s.config, s.certificate)
    } else {
        if opts.rho.is_none() {
            return Err(Error::config("check-params needs --rho (or --suggest)"));
        }
        let c = certify(problem, &cfg, built.lipschitz, DEFAULT_BETA)?;
        (cfg, c)
    };
    let p = cfg.validate(problem)?;
    Ok(CheckReport {
        variant: cfg.variant,
        lipschitz: built.lipschitz,
        eta: cfg.eta,
        rho: cfg.rho,
        r: p.r,
        batch_size: p.batch_size,
        epoch_len: p.epoch_len,
        accepted: certificate.accepted(),
        certificate,
    })
}

/// `check-params`: certificate JSON on stdout; exit 0 iff accepted.
pub fn cmd_check_params(opts: &CheckOptions) -> Result<Outcome> {
    let built = load_problem(&opts.spec)?.build()?;
    let report = check_report(&built, opts)?;
    Ok(Outcome { exit_code: if report.accepted { EXIT_OK } else { EXIT_CONFIG }, message: serde_json::to_string_pretty(&report)? })
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub run: RunOptions,
    pub rhos: Vec<f64>,
    /// Read `rhos` as multiples of `ρ*`.
    pub relative: bool,
    /// Overrides every solver's `η`.
    pub eta: Option<f64>,
}

pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_COLUMNS: [&str; 9] =
    ["rho", "solver", "certified", "runs", "diverged", "final_objective", "final_test_error", "final_test_loss", "min_theta"];

/// Directory for the `k`-th sweep point.
pub fn sweep_dir(root: &Path, k: usize, rho: f64) -> PathBuf {
    root.join(format!("rho_{k:02}_{rho:e}"))
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// `rho-sweep`: the `run` artifacts once per `ρ` plus a table of final
/// values. Uncertified points run and are flagged rather than refused, so a
/// sweep can straddle the certified region.
pub fn cmd_rho_sweep(opts: &SweepOptions) -> Result<Outcome> {
    if opts.rhos.is_empty() {
        return Err(Error::config("rho sweep needs at least one ρ"));
    }
    if let Some(bad) = opts.rhos.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::Config(format!("ρ must be positive and finite, got {bad}")));
    }
    let mut spec = ExperimentSpec::load(&opts.run.spec)?;
    let built = spec.problem.build()?;
    let scale = if opts.relative { super::output::ProblemSummary::of(&built).rho_star } else { 1.0 };
    let root = output_dir(&spec, &opts.run.out);
    let seed_base = opts.run.seed.unwrap_or(spec.seed_base);
    let workers = worker_count(opts.run.workers);
    let base_solvers = spec.solvers.clone();

    let mut table = csv::Writer::from_writer(Vec::new());
    table.write_record(SWEEP_COLUMNS)?;
    let mut worst = EXIT_OK;
    for (k, factor) in opts.rhos.iter().enumerate() {
        let rho = factor * scale;
        spec.solvers = base_solvers
            .iter()
            .cloned()
            .map(|mut s| {
                s.rho = Some(rho);
                if opts.eta.is_some() {
                    s.eta = opts.eta;
                }
                s
            })
            .collect();
        let solvers = resolve_all(&spec, &built)?;
        let (summary, code) = execute(&spec, &built, &solvers, &sweep_dir(&root, k, rho), seed_base, workers)?;
        worst = worst.max(code);
        for s in &summary.solvers {
            let finals = || s.runs.iter().filter(|r| matches!(r.status, super::runner::RunStatus::Completed)).filter_map(|r| r.final_record.as_ref());
            let cell = |v: Option<f64>| v.map(format_float).unwrap_or_default();
            table.write_record([
                format_float(rho),
                s.solver.name.clone(),
                s.certified.to_string(),
                s.runs.len().to_string(),
                s.diverged_runs.to_string(),
                cell(mean_of(finals().map(|r| r.objective))),
                cell(mean_of(finals().filter_map(|r| r.test_error))),
                cell(mean_of(finals().filter_map(|r| r.test_loss))),
                cell(mean_of(s.runs.iter().filter_map(|r| r.min_theta))),
            ])?;
        }
    }
    table.flush()?;
    let bytes = table.into_inner().map_err(|e| e.into_error())?;
    write_atomic(&root.join(SWEEP_FILE), &bytes)?;
    Ok(Outcome { exit_code: worst, message: format!("wrote {} ({} ρ values)", root.display(), opts.rhos.len()) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    GraphGuided,
    Overlap,
}

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub kind: GenKind,
    pub n: usize,
    /// Dimension (graph-guided) or grid side (overlap).
    pub size: usize,
    pub seed: u64,
    pub out: PathBuf,
}

/// Sidecar path next to a data file: `data.libsvm` → `data.json`.
pub fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("json")
}

/// `gen-data`: a synthetic dataset in LIBSVM format plus its JSON sidecar.
pub fn cmd_gen_data(opts: &GenOptions) -> Result<Outcome> {
    let (ds, sidecar) = match opts.kind {
        GenKind::GraphGuided => {
            let (ds, model, x_star) = gen_graph_guided(opts.n, opts.size, opts.seed)?;
            let sc = graph_sidecar(opts.seed, &ds, &model.support, x_star.as_slice());
            (ds, sc)
        }
        GenKind::Overlap => {
            let (ds, x_star) = gen_overlap_grid(opts.n, opts.size, opts.seed)?;
            let sc = Sidecar {
                version: SPEC_VERSION.into(),
                generator: "overlap".into(),
                seed: opts.seed,
                n: ds.n(),
                d: ds.d(),
                edges: Vec::new(),
                x_star: x_star.as_slice().to_vec(),
            };
            (ds, sc)
        }
    };
    let mut bytes = Vec::new();
    write_libsvm(&ds, &mut bytes)?;
    write_atomic(&opts.out, &bytes)?;
    let side = sidecar_path(&opts.out);
    write_atomic(&side, serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
    Ok(Outcome { exit_code: EXIT_OK, message: format!("wrote {} and {}", opts.out.display(), side.display()) })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseReport {
    pub path: String,
    pub n: usize,
    pub d: usize,
    pub classes: usize,
    pub nonzeros: usize,
}

/// `parse`: validates a LIBSVM file and prints its shape.
pub fn cmd_parse(path: &Path, options: &LibsvmOptions) -> Result<Outcome> {
    let ds = read_libsvm(path, options)?;
    let nonzeros = (0..ds.n()).map(|i| ds.features.row_entries(i).len()).sum();
    let report = ParseReport { path: path.display().to_string(), n: ds.n(), d: ds.d(), classes: ds.meta.classes, nonzeros };
    Ok(Outcome { exit_code: EXIT_OK, message: serde_json::to_string_pretty(&report)? })
}

/// Reads a spec and runs it with default options (used by examples/tests).
pub fn run_spec_file(path: &Path, out: &Path) -> Result<Outcome> {
    cmd_run(&RunOptions { spec: path.to_path_buf(), out: Some(out.to_path_buf()), ..RunOptions::default() })
}
