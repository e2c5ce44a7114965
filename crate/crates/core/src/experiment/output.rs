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

//! CSV and JSON artifacts. Every CSV has a fixed header; floats use Rust's
//! shortest round-trip formatting and missing values are empty cells.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::runner::{AggregateRow, ResolvedSolver, RunResult};
use super::spec::BuiltProblem;
use crate::error::Result;
use crate::params::rho_star;
use crate::solvers::TraceRecord;

/// Column order of per-run trace files.
pub const TRACE_COLUMNS: [&str; 10] =
    ["t", "wall_time_s", "ifo", "objective", "test_error", "test_loss", "feas_sq", "dual_sq", "subgrad_sq", "lyapunov"];

/// Column order of the aggregate file.
pub const AGGREGATE_COLUMNS: [&str; 12] = [
    "solver",
    "t",
    "runs",
    "wall_time_s",
    "ifo",
    "objective",
    "test_error",
    "test_loss",
    "feas_sq",
    "dual_sq",
    "subgrad_sq",
    "lyapunov",
];

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Shortest round-trip text; scientific outside `[1e-4, 1e15)`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn num(v: f64) -> String {
    format_float(v)
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes via a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn trace_csv(records: &[TraceRecord]) -> Result<Vec<u8>> {
    csv_bytes(
        &TRACE_COLUMNS,
        records.iter().map(|r| {
            vec![
                r.t.to_string(),
                num(r.wall_time_s),
                r.ifo.to_string(),
                num(r.objective),
                opt(r.test_error),
                opt(r.test_loss),
                num(r.feas_sq),
                num(r.dual_sq),
                num(r.subgrad_sq),
                opt(r.lyapunov),
            ]
        }),
    )
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &AGGREGATE_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.solver.clone(),
                r.t.to_string(),
                r.runs.to_string(),
                num(r.wall_time_s),
                num(r.ifo),
                num(r.objective),
                opt(r.test_error),
                opt(r.test_loss),
                num(r.feas_sq),
                num(r.dual_sq),
                num(r.subgrad_sq),
                opt(r.lyapunov),
            ]
        }),
    )
}

pub fn run_file_name(solver: &str, repetition: usize) -> String {
    format!("{solver}_rep{repetition}.csv")
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemSummary {
    pub name: String,
    pub n_train: usize,
    pub d: usize,
    pub p: usize,
    pub q: usize,
    pub lipschitz: f64,
    pub rho_star: f64,
    pub phi_min_a: f64,
    pub norm_ata: f64,
}

impl ProblemSummary {
    pub fn of(built: &BuiltProblem) -> Self {
        let p = &built.problem;
        let l = built.lipschitz;
        ProblemSummary {
            name: built.name.clone(),
            n_train: p.n(),
            d: p.d(),
            p: p.p(),
            q: p.q(),
            lipschitz: l,
            rho_star: rho_star(l, l + 1.0, p.constraints.phi_min_a),
            phi_min_a: p.constraints.phi_min_a,
            norm_ata: p.constraints.norm_ata,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub repetition: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub status: super::runner::RunStatus,
    pub iterations: usize,
    pub final_record: Option<TraceRecord>,
    pub min_theta: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverSummary {
    #[serde(flatten)]
    pub solver: ResolvedSolver,
    pub certified: bool,
    pub diverged_runs: usize,
    pub runs: Vec<RunSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub version: String,
    pub problem: ProblemSummary,
    pub repetitions: usize,
    pub seed_base: u64,
    pub solvers: Vec<SolverSummary>,
}

impl Summary {
    pub fn new(built: &BuiltProblem, solvers: &[ResolvedSolver], results: &[Vec<RunResult>], repetitions: usize, seed_base: u64) -> Self {
        let solvers = solvers
            .iter()
            .zip(results)
            .map(|(s, runs)| SolverSummary {
                solver: s.clone(),
                certified: s.certified(),
                diverged_runs: runs.iter().filter(|r| r.diverged()).count(),
                runs: runs
                    .iter()
                    .map(|r| RunSummary {
                        repetition: r.repetition,
                        seed: r.seed,
                        status: r.status.clone(),
                        iterations: r.iterations,
                        final_record: r.records.last().cloned(),
                        min_theta: r.min_theta,
                    })
                    .collect(),
            })
            .collect();
        Summary { version: super::spec::SPEC_VERSION.into(), problem: ProblemSummary::of(built), repetitions, seed_base, solvers }
    }
}

/// Per-run traces, the aggregate, and the summary under `dir`.
pub fn write_artifacts(dir: &Path, summary: &Summary, results: &[Vec<RunResult>]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut rows = Vec::new();
    for (s, runs) in summary.solvers.iter().zip(results) {
        for run in runs {
            write_atomic(&dir.join(run_file_name(&s.solver.name, run.repetition)), &trace_csv(&run.records)?)?;
        }
        rows.extend(super::runner::aggregate(&s.solver.name, runs));
    }
    write_atomic(&dir.join(AGGREGATE_FILE), &aggregate_csv(&rows)?)?;
    write_atomic(&dir.join(SUMMARY_FILE), serde_json::to_string_pretty(summary)?.as_bytes())?;
    Ok(())
}
