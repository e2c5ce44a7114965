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

//! Versioned JSON experiment description and problem construction.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{gen_graph_guided, gen_overlap_grid, read_libsvm, split, synth::OVERLAP_GRID, Dataset, LabelKind, LibsvmOptions};
use crate::error::{Error, Result};
use crate::params::estimate_lipschitz;
use crate::problems::{CompositeProblem, SmoothLoss, SmoothedMultiTaskLoss};
use crate::solvers::Variant;

pub const SPEC_VERSION: &str = "v1";

fn default_nu() -> f64 {
    1e-5
}
fn default_nu2() -> f64 {
    1e-4
}
fn default_one_f() -> f64 {
    1.0
}
fn default_edge_weight() -> f64 {
    0.05
}
fn default_copies() -> usize {
    2
}
fn default_grid() -> usize {
    OVERLAP_GRID
}
fn default_fraction() -> f64 {
    0.5
}
fn default_data_seed() -> u64 {
    1
}
fn default_repetitions() -> usize {
    1
}
fn default_stride() -> usize {
    1
}

/// Where samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// Gaussian features with a sparse precision matrix; its support drives `A`.
    GraphGuided { n: usize, d: usize },
    /// Standard normal features on a `grid x grid` coefficient matrix.
    Overlap {
        n: usize,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    /// A LIBSVM file, optionally with the JSON sidecar written by `gen-data`.
    Libsvm {
        path: PathBuf,
        #[serde(default)]
        labels: LabelKind,
        #[serde(default)]
        dim: Option<usize>,
        #[serde(default)]
        sidecar: Option<PathBuf>,
    },
}

/// Which composite model to fit on the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Sigmoid loss, `ν‖Ax‖₁` with edge-difference rows plus identity.
    GraphGuided {
        #[serde(default = "default_edge_weight")]
        edge_weight: f64,
        #[serde(default = "default_nu")]
        nu: f64,
    },
    /// Sigmoid loss, `ν‖Ax‖₁` with `A = [I; ...; I]`.
    Overlap {
        #[serde(default = "default_copies")]
        copies: usize,
        #[serde(default = "default_nu")]
        nu: f64,
    },
    /// Multinomial loss with log-sum and nuclear-norm penalties.
    Multitask {
        #[serde(default = "default_nu")]
        nu1: f64,
        #[serde(default = "default_nu2")]
        nu2: f64,
        #[serde(default = "default_one_f")]
        beta: f64,
        #[serde(default = "default_one_f")]
        theta: f64,
    },
}

impl ModelSpec {
    /// Step size used when a solver fixes `ρ` but not `η`.
    pub fn default_eta(&self) -> f64 {
        match self {
            ModelSpec::Multitask { .. } => 0.8,
            _ => 1.0,
        }
    }

    pub fn default_batch(&self) -> usize {
        match self {
            ModelSpec::Overlap { .. } => 200,
            _ => 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub data: DataSpec,
    /// Defaults to the model matching synthetic data; required for LIBSVM input.
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_data_seed")]
    pub data_seed: u64,
}

/// One solver line of an experiment. Leaving `rho` out asks for certified
/// parameters; otherwise missing `eta` takes the model default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub name: String,
    pub variant: Variant,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub epoch_len: Option<usize>,
    pub iterations: usize,
    /// Record the variant's Lyapunov sequence in the `lyapunov` column.
    #[serde(default)]
    pub lyapunov: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub version: String,
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverSpec>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_stride")]
    pub trace_stride: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Per-run solver time limit in seconds.
    #[serde(default)]
    pub time_budget: Option<f64>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| Error::Config(format!("experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a spec; relative data paths resolve against the spec's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read spec {}: {e}", path.display())))?;
        let mut spec = Self::from_json(&text)?;
        if let (DataSpec::Libsvm { path: data, sidecar, .. }, Some(dir)) = (&mut spec.problem.data, path.parent()) {
            for p in std::iter::once(data).chain(sidecar.as_mut()) {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SPEC_VERSION {
            return Err(Error::Config(format!("unsupported spec version {:?}, expected {SPEC_VERSION:?}", self.version)));
        }
        if self.solvers.is_empty() {
            return Err(Error::config("experiment lists no solvers"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.trace_stride == 0 {
            return Err(Error::config("trace stride must be at least 1"));
        }
        let mut names: Vec<&str> = self.solvers.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate solver name {:?}", w[0])));
        }
        for s in &self.solvers {
            if s.name.is_empty() || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(Error::Config(format!("solver name {:?} must be non-empty [A-Za-z0-9_-]", s.name)));
            }
        }
        if !(self.problem.train_fraction > 0.0 && self.problem.train_fraction < 1.0) {
            return Err(Error::config("train fraction must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Metadata stored next to generated LIBSVM files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub version: String,
    pub generator: String,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    /// Precision-matrix edges `(i, j)`, `i < j` (graph-guided data only).
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    pub x_star: Vec<f64>,
}

impl Sidecar {
    pub fn support(&self) -> Result<DMatrix<bool>> {
        let mut s = DMatrix::from_element(self.d, self.d, false);
        for &(i, j) in &self.edges {
            if i >= self.d || j >= self.d || i == j {
                return Err(Error::Config(format!("sidecar edge ({i}, {j}) invalid for d = {}", self.d)));
            }
            s[(i, j)] = true;
            s[(j, i)] = true;
        }
        Ok(s)
    }
}

/// A constructed problem with its held-out split.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub name: String,
    pub problem: CompositeProblem,
    pub model: ModelSpec,
    /// Held-out data loss (no penalty), for the test columns.
    pub test: SmoothLoss,
    pub lipschitz: f64,
}

fn edges_of(support: &DMatrix<bool>) -> Vec<(usize, usize)> {
    let d = support.nrows();
    (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| support[(i, j)]).collect()
}

pub fn graph_sidecar(seed: u64, ds: &Dataset, support: &DMatrix<bool>, x_star: &[f64]) -> Sidecar {
    Sidecar {
        version: SPEC_VERSION.into(),
        generator: "graph_guided".into(),
        seed,
        n: ds.n(),
        d: ds.d(),
        edges: edges_of(support),
        x_star: x_star.to_vec(),
    }
}

fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read sidecar {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("sidecar {}: {e}", path.display())))
}

impl ProblemSpec {
    /// Generates or loads the data, splits it, and assembles the problem.
    pub fn build(&self) -> Result<BuiltProblem> {
        let (data, support, default_model) = match &self.data {
            DataSpec::GraphGuided { n, d } => {
                let (ds, model, _) = gen_graph_guided(*n, *d, self.data_seed)?;
                (ds, Some(model.support), Some(ModelSpec::GraphGuided { edge_weight: default_edge_weight(), nu: default_nu() }))
            }
            DataSpec::Overlap { n, grid } => {
                let (ds, _) = gen_overlap_grid(*n, *grid, self.data_seed)?;
                (ds, None, Some(ModelSpec::Overlap { copies: default_copies(), nu: default_nu() }))
            }
            DataSpec::Libsvm { path, labels, dim, sidecar } => {
                let ds = read_libsvm(path, &LibsvmOptions { labels: *labels, dim: *dim })?;
                let support = match sidecar {
                    Some(p) => {
                        let sc = read_sidecar(p)?;
                        if sc.d != ds.d() {
                            return Err(Error::Config(format!("sidecar d = {} but data has d = {}", sc.d, ds.d())));
                        }
                        Some(sc.support()?)
                    }
                    None => None,
                };
                (ds, support, None)
            }
        };
        let model = self
            .model
            .clone()
            .or(default_model)
            .ok_or_else(|| Error::config("LIBSVM input needs an explicit model"))?;
        let (train, test) = split(&data, self.train_fraction, self.data_seed)?;
        let (problem, test_loss) = match &model {
            ModelSpec::GraphGuided { edge_weight, nu } => {
                let support = support.ok_or_else(|| Error::config("graph-guided model needs a precision support (graph data or sidecar)"))?;
                let p = CompositeProblem::graph_guided(&train, &support, *edge_weight, *nu)?;
                (p, SmoothLoss::Sigmoid(crate::problems::SigmoidLoss::from_dataset(&test)?))
            }
            ModelSpec::Overlap { copies, nu } => {
                let p = CompositeProblem::overlap(&train, *copies, *nu)?;
                (p, SmoothLoss::Sigmoid(crate::problems::SigmoidLoss::from_dataset(&test)?))
            }
            ModelSpec::Multitask { nu1, nu2, beta, theta } => {
                let p = CompositeProblem::multitask(&train, *nu1, *nu2, *beta, *theta)?;
                (p, SmoothLoss::SmoothedMultiTask(SmoothedMultiTaskLoss::from_dataset(&test, 0.0, *beta, *theta)?))
            }
        };
        let lipschitz = estimate_lipschitz(&problem.loss);
        Ok(BuiltProblem { name: data.meta.name.clone(), problem, model, test: test_loss, lipschitz })
    }
}
