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

//! Argument parsing for the `nc-admm` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::commands::{
    cmd_check_params, cmd_gen_data, cmd_parse, cmd_rho_sweep, cmd_run, exit_code_for, CheckOptions, GenKind, GenOptions, Outcome, RunOptions,
    SweepOptions,
};
use crate::data::{BinaryLabelRule, LabelKind, LibsvmOptions};
use crate::error::Result;
use crate::solvers::Variant;

#[derive(Debug, Parser)]
#[command(name = "nc-admm", version, about = "Nonconvex stochastic ADMM experiment harness")]
pub struct Cli {
    /// Worker threads for repetitions and grid points.
    #[arg(long, global = true, env = "NC_ADMM_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Dete,
    Stoc,
    Svrg,
    Saga,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Dete => Variant::Dete,
            VariantArg::Stoc => Variant::Stoc,
            VariantArg::Svrg => Variant::Svrg,
            VariantArg::Saga => Variant::Saga,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKindArg {
    GraphGuided,
    Overlap,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LabelArg {
    Auto,
    Binary,
    Multiclass,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every solver and repetition of an experiment spec.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the spec's seed base.
        #[arg(long)]
        seed: Option<u64>,
        /// Run solvers whose parameters fail their certificate.
        #[arg(long)]
        allow_uncertified: bool,
    },
    /// Evaluate (or search for) certified parameters on a spec's problem.
    CheckParams {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        epoch_len: Option<usize>,
        /// Horizon `T` (enters the SAGA certificate).
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        /// Search for certified parameters instead of checking given ones.
        #[arg(long)]
        suggest: bool,
    },
    /// Re-run a spec's solvers across a list of penalties.
    RhoSweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated penalties.
        #[arg(long, value_delimiter = ',', required = true)]
        rhos: Vec<f64>,
        /// Interpret --rhos as multiples of ρ*.
        #[arg(long)]
        relative: bool,
        /// Step size for every solver.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Write a synthetic dataset as LIBSVM plus a JSON sidecar.
    GenData {
        #[arg(long, value_enum)]
        kind: GenKindArg,
        #[arg(long)]
        n: usize,
        /// Dimension (graph-guided) or grid side (overlap).
        #[arg(long, default_value_t = 50)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a LIBSVM file.
    Parse {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = LabelArg::Auto)]
        labels: LabelArg,
        #[arg(long)]
        dim: Option<usize>,
    },
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let workers = cli.workers;
    match cli.command {
        Command::Run { spec, out, seed, allow_uncertified } => cmd_run(&RunOptions { spec, out, seed, workers, allow_uncertified }),
        Command::CheckParams { spec, variant, eta, rho, r, batch_size, epoch_len, iterations, suggest } => {
            cmd_check_params(&CheckOptions { spec, variant: variant.into(), eta, rho, r, batch_size, epoch_len, iterations, suggest })
        }
        Command::RhoSweep { spec, out, seed, rhos, relative, eta } => cmd_rho_sweep(&SweepOptions {
            run: RunOptions { spec, out, seed, workers, allow_uncertified: true },
            rhos,
            relative,
            eta,
        }),
        Command::GenData { kind, n, size, seed, out } => {
            let kind = match kind {
                GenKindArg::GraphGuided => GenKind::GraphGuided,
                GenKindArg::Overlap => GenKind::Overlap,
            };
            cmd_gen_data(&GenOptions { kind, n, size, seed, out })
        }
        Command::Parse { path, labels, dim } => {
            let labels = match labels {
                LabelArg::Auto => LabelKind::Auto,
                LabelArg::Binary => LabelKind::Binary(BinaryLabelRule::SmallerIsNegative),
                LabelArg::Multiclass => LabelKind::Multiclass,
            };
            cmd_parse(&path, &LibsvmOptions { labels, dim })
        }
    }
}

/// Parses `args`, runs the command, prints its output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { super::commands::EXIT_CONFIG } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(outcome) => {
            // A closed pipe (e.g. `| head`) is not a failure of the command.
            let _ = if outcome.exit_code == 0 {
                writeln!(std::io::stdout(), "{}", outcome.message)
            } else {
                writeln!(std::io::stderr(), "{}", outcome.message)
            };
            outcome.exit_code
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            exit_code_for(&e)
        }
    }
}
