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

//! Resolves solver lines into certified configs and runs the
//! (solver, repetition) grid on a worker pool.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{BuiltProblem, SolverSpec};
use crate::error::{Error, Result};
use crate::metrics::{theta_sequence, LyapunovTracker, ProgressRecorder};
use crate::params::{certify, suggest_params, Certificate, SuggestOptions, DEFAULT_BETA};
use crate::problems::SmoothLoss;
use crate::solvers::{initial_state, run_from, trace_record, Observer, SolverConfig, SolverState, StepView, TraceRecord, Variant, VariantMemory};

/// A solver line with every parameter fixed and its certificate evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSolver {
    pub name: String,
    pub config: SolverConfig,
    pub certificate: Certificate,
    /// `(η, ρ, r)` came from the certified search rather than the spec.
    pub suggested: bool,
    pub lyapunov: bool,
}

impl ResolvedSolver {
    pub fn certified(&self) -> bool {
        self.certificate.accepted()
    }
}

/// Fills defaults, runs the certified search when `rho` is absent, and
/// evaluates the certificate otherwise.
pub fn resolve_solver(built: &BuiltProblem, spec: &SolverSpec, trace_stride: usize, time_budget: Option<f64>) -> Result<ResolvedSolver> {
    let problem = &built.problem;
    let batch = spec.batch_size.unwrap_or_else(|| built.model.default_batch().min(problem.n()));
    let eta = spec.eta.unwrap_or_else(|| built.model.default_eta());
    let mut template = SolverConfig::new(spec.variant, eta, spec.rho.unwrap_or(1.0), batch, spec.iterations).with_stride(trace_stride);
    template.epoch_len = spec.epoch_len;
    template.r = spec.r;
    template.time_limit_s = time_budget;
    template.store_saga_points = spec.lyapunov && spec.variant == Variant::Saga;

    if spec.rho.is_none() {
        if spec.eta.is_some() || spec.r.is_some() {
            return Err(Error::Config(format!("solver {:?}: η and r are chosen with ρ; give ρ too or neither", spec.name)));
        }
        let options = SuggestOptions { lipschitz: Some(built.lipschitz), ..SuggestOptions::default() };
        let s = suggest_params(problem, &template, &options)?;
        return Ok(ResolvedSolver { name: spec.name.clone(), config: s.config, certificate: s.certificate, suggested: true, lyapunov: spec.lyapunov });
    }
    let certificate = certify(problem, &template, built.lipschitz, DEFAULT_BETA)?;
    Ok(ResolvedSolver { name: spec.name.clone(), config: template, certificate, suggested: false, lyapunov: spec.lyapunov })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Diverged { iteration: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub solver: String,
    pub repetition: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub status: RunStatus,
    pub iterations: usize,
    /// Trace including the `t = 0` row; kept up to the divergence point.
    pub records: Vec<TraceRecord>,
    /// `min θ_t` over `1 ≤ t < T`.
    pub min_theta: Option<f64>,
}

impl RunResult {
    pub fn diverged(&self) -> bool {
        matches!(self.status, RunStatus::Diverged { .. })
    }
}

/// Test columns, Lyapunov values and step lengths, and a copy of every
/// record so a diverging run still leaves its trace.
struct RunObserver<'a> {
    test: &'a SmoothLoss,
    lyapunov: Option<LyapunovTracker<'a>>,
    progress: ProgressRecorder,
    records: Vec<TraceRecord>,
}

impl RunObserver<'_> {
    fn fill(&self, record: &mut TraceRecord, x: &nalgebra::DVector<f64>) -> Result<()> {
        record.test_error = Some(self.test.error_rate(x)?);
        record.test_loss = Some(self.test.full_value(x)?);
        if let Some(l) = &self.lyapunov {
            record.lyapunov = l.last();
        }
        Ok(())
    }
}

impl Observer for RunObserver<'_> {
    fn on_step(&mut self, step: &StepView<'_>, memory: &VariantMemory) -> Result<()> {
        self.progress.on_step(step, memory)?;
        if let Some(l) = &mut self.lyapunov {
            l.on_step(step, memory)?;
        }
        Ok(())
    }

    fn on_record(&mut self, record: &mut TraceRecord, state: &SolverState) -> Result<()> {
        self.fill(record, &state.x)?;
        self.records.push(record.clone());
        Ok(())
    }
}

/// One seeded run; divergence ends the run but is not an error.
pub fn run_one(built: &BuiltProblem, solver: &ResolvedSolver, repetition: usize, seed: u64) -> Result<RunResult> {
    let problem = &built.problem;
    let config = solver.config.clone().with_seed(seed);
    let state = initial_state(problem, &config)?;
    let lyapunov = if solver.lyapunov {
        let schedule = match &solver.certificate {
            Certificate::Vr(c) => Some(c.schedule.clone()),
            Certificate::Stoc(_) => None,
        };
        Some(LyapunovTracker::new(problem, &state, *solver.certificate.constants(), schedule)?)
    } else {
        None
    };
    let mut observer = RunObserver { test: &built.test, lyapunov, progress: ProgressRecorder::default(), records: Vec::new() };
    let mut first = trace_record(problem, &state, config.rho, 0.0)?;
    observer.fill(&mut first, &state.x)?;
    observer.records.push(first);

    let (status, iterations) = match run_from(problem, &config, state, &mut observer) {
        Ok(out) => (RunStatus::Completed, out.state.t),
        Err(Error::Divergence { iteration, reason }) => (RunStatus::Diverged { iteration, reason }, iteration),
        Err(e) => return Err(e),
    };
    let theta = theta_sequence(&observer.progress.step_sq);
    let min_theta = theta.iter().skip(1).copied().reduce(f64::min).or(theta.first().copied());
    Ok(RunResult { solver: solver.name.clone(), repetition, seed, status, iterations, records: observer.records, min_theta })
}

/// Worker count from the flag/environment, else the machine's parallelism.
pub fn worker_count(requested: Option<usize>) -> usize {
    requested
        .filter(|w| *w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every `(solver, repetition)` pair with seed `seed_base + repetition`
/// (shared across solvers, so they start from the same point). Results are
/// grouped by solver in input order.
pub fn run_grid(built: &BuiltProblem, solvers: &[ResolvedSolver], repetitions: usize, seed_base: u64, workers: usize) -> Result<Vec<Vec<RunResult>>> {
    let jobs: Vec<(usize, usize)> = (0..solvers.len()).flat_map(|s| (0..repetitions).map(move |r| (s, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<RunResult> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, r)| run_one(built, &solvers[s], r, seed_base.wrapping_add(r as u64)))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut grouped: Vec<Vec<RunResult>> = vec![Vec::new(); solvers.len()];
    for (res, &(s, _)) in results.into_iter().zip(&jobs) {
        grouped[s].push(res);
    }
    Ok(grouped)
}

/// Across-repetition means at one trace index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub solver: String,
    pub t: usize,
    /// Repetitions contributing (diverged or time-limited runs drop out).
    pub runs: usize,
    pub wall_time_s: f64,
    pub ifo: f64,
    pub objective: f64,
    pub test_error: Option<f64>,
    pub test_loss: Option<f64>,
    pub feas_sq: f64,
    pub dual_sq: f64,
    pub subgrad_sq: f64,
    pub lyapunov: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

fn mean_opt<'a>(rows: &[&'a TraceRecord], f: impl Fn(&'a TraceRecord) -> Option<f64>) -> Option<f64> {
    let present: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
    (!present.is_empty()).then(|| mean(present.into_iter()))
}

/// Means over repetitions at each recorded `t`, in repetition order.
pub fn aggregate(solver: &str, runs: &[RunResult]) -> Vec<AggregateRow> {
    let mut by_t: BTreeMap<usize, Vec<&TraceRecord>> = BTreeMap::new();
    for run in runs {
        for rec in &run.records {
            by_t.entry(rec.t).or_default().push(rec);
        }
    }
    by_t.into_iter()
        .map(|(t, rows)| AggregateRow {
            solver: solver.to_string(),
            t,
            runs: rows.len(),
            wall_time_s: mean(rows.iter().map(|r| r.wall_time_s)),
            ifo: mean(rows.iter().map(|r| r.ifo as f64)),
            objective: mean(rows.iter().map(|r| r.objective)),
            test_error: mean_opt(&rows, |r| r.test_error),
            test_loss: mean_opt(&rows, |r| r.test_loss),
            feas_sq: mean(rows.iter().map(|r| r.feas_sq)),
            dual_sq: mean(rows.iter().map(|r| r.dual_sq)),
            subgrad_sq: mean(rows.iter().map(|r| r.subgrad_sq)),
            lyapunov: mean_opt(&rows, |r| r.lyapunov),
        })
        .collect()
}
