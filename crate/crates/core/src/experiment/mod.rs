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

//! Reproducible experiment grids: a versioned JSON spec in, per-run trace
//! CSVs, an across-repetition aggregate and a JSON summary out.

pub mod cli;
mod commands;
mod output;
mod runner;
mod spec;

pub use commands::{
    check_report, cmd_check_params, cmd_gen_data, cmd_parse, cmd_rho_sweep, cmd_run, exit_code_for, run_spec_file, sidecar_path, sweep_dir,
    CheckOptions, CheckReport, GenKind, GenOptions, Outcome, ParseReport, RunOptions, SweepOptions, EXIT_CONFIG, EXIT_DIVERGED, EXIT_INTERNAL,
    EXIT_OK, SWEEP_COLUMNS, SWEEP_FILE,
};
pub use output::{
    aggregate_csv, run_file_name, trace_csv, write_artifacts, ProblemSummary, RunSummary, SolverSummary, Summary, AGGREGATE_COLUMNS,
    AGGREGATE_FILE, SUMMARY_FILE, TRACE_COLUMNS,
};
pub use runner::{aggregate, resolve_solver, run_grid, run_one, worker_count, AggregateRow, ResolvedSolver, RunResult, RunStatus};
pub use spec::{BuiltProblem, DataSpec, ExperimentSpec, ModelSpec, ProblemSpec, Sidecar, SolverSpec, SPEC_VERSION};
