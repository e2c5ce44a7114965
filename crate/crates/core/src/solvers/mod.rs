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


//! Linearized ADMM with deterministic, mini-batch, SVRG and SAGA gradients.
//!
//! One effective iteration is
//!
//! ```text
//! y⁺ = argmin_y L_ρ(x, y, λ)
//! x⁺ = x − (η/r)[ĝ + ρAᵀ(Ax + By⁺ − c − λ/ρ)]
//! λ⁺ = λ − ρ(Ax⁺ + By⁺ − c)
//! ```
//!
//! where `ĝ` is the variant's estimate of `∇f(x)`.

mod gradients;
mod updates;

pub use gradients::{is_full_batch, sample_batch, saga_gradient, stoc_gradient, svrg_gradient, SagaMemory, SvrgMemory};
pub use updates::{dual_identity_residual, lambda_update, x_update_uzawa, y_update};

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;
use crate::problems::CompositeProblem;
use crate::rng::{stream, substream};

/// Iterates with `‖x‖` above this are treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Variant {
    Dete,
    Stoc,
    Svrg,
    Saga,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Dete, Variant::Stoc, Variant::Svrg, Variant::Saga];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Dete => "DETE",
            Variant::Stoc => "STOC",
            Variant::Svrg => "SVRG",
            Variant::Saga => "SAGA",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DETE" => Ok(Variant::Dete),
            "STOC" => Ok(Variant::Stoc),
            "SVRG" => Ok(Variant::Svrg),
            "SAGA" => Ok(Variant::Saga),
            _ => Err(Error::config(format!("unknown variant {s:?}"))),
        }
    }
}

fn default_one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Step size `η`.
    pub eta: f64,
    /// Penalty `ρ`.
    pub rho: f64,
    /// Uzawa scalar; `None` means the minimum `ηρ‖AᵀA‖ + 1`.
    #[serde(default)]
    pub r: Option<f64>,
    /// Mini-batch size `M` (ignored by DETE).
    #[serde(default = "default_one")]
    pub batch_size: usize,
    /// SVRG epoch length `m`; `None` means `max(1, ⌊n/M⌋)`.
    #[serde(default)]
    pub epoch_len: Option<usize>,
    /// Effective iterations `T`.
    pub iterations: usize,
    #[serde(default)]
    pub seed: u64,
    /// Keep SAGA's `z_i` points (needed by the `Θ` sequence and variance bounds).
    #[serde(default)]
    pub store_saga_points: bool,
    /// Record every this many iterations (and always the last one).
    #[serde(default = "default_one")]
    pub trace_stride: usize,
    /// Stop early once solver time (records excluded) reaches this many seconds.
    #[serde(default)]
    pub time_limit_s: Option<f64>,
}

/// A config with its defaults filled in against a concrete problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub r: f64,
    pub batch_size: usize,
    pub epoch_len: usize,
}

impl SolverConfig {
    pub fn new(variant: Variant, eta: f64, rho: f64, batch_size: usize, iterations: usize) -> Self {
        SolverConfig {
            variant,
            eta,
            rho,
            r: None,
            batch_size,
            epoch_len: None,
            iterations,
            seed: 0,
            store_saga_points: false,
            trace_stride: 1,
            time_limit_s: None,
        }
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit_s = Some(seconds);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_epoch_len(mut self, m: usize) -> Self {
        self.epoch_len = Some(m);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.trace_stride = stride;
        self
    }

    pub fn with_saga_points(mut self, store: bool) -> Self {
        self.store_saga_points = store;
        self
    }

    /// Checks every bound and fills in defaults.
    pub fn validate(&self, problem: &CompositeProblem) -> Result<ResolvedParams> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::config(format!("η must be positive and finite, got {}", self.eta)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::config(format!("ρ must be positive and finite, got {}", self.rho)));
        }
        if self.trace_stride == 0 {
            return Err(Error::config("trace stride must be at least 1"));
        }
        if self.time_limit_s.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::config("time limit must be positive"));
        }
        let n = problem.n();
        let batch_size = if self.variant == Variant::Dete { n } else { self.batch_size };
        if batch_size < 1 || batch_size > n {
            return Err(Error::config(format!("mini-batch size {batch_size} outside [1, {n}]")));
        }
        let epoch_len = self.epoch_len.unwrap_or((n / batch_size).max(1));
        if self.variant == Variant::Svrg && epoch_len < 1 {
            return Err(Error::config("SVRG epoch length must be at least 1"));
        }
        let r_min = self.eta * self.rho * problem.constraints.norm_ata + 1.0;
        let r = self.r.unwrap_or(r_min);
        if !(r >= r_min * (1.0 - 1e-12)) || !r.is_finite() {
            return Err(Error::config(format!("r = {r} below ηρ‖AᵀA‖ + 1 = {r_min}")));
        }
        if !problem.constraints.is_b_neg_identity() {
            return Err(Error::UnsupportedConstraint("solver needs B = -I".into()));
        }
        Ok(ResolvedParams { r, batch_size, epoch_len })
    }
}

/// Variant-specific memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VariantMemory {
    None,
    Svrg(SvrgMemory),
    Saga(SagaMemory),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub lambda: DVector<f64>,
    /// Previous primal iterate (`x` itself before the first step).
    pub x_prev: DVector<f64>,
    /// Effective iterations completed.
    pub t: usize,
    /// Component gradient evaluations so far.
    pub ifo: u64,
    pub memory: VariantMemory,
}

/// Seeded start: `x₀, y₀ ~ N(0, I)`, `λ₀ = 0`, plus the variant's memory at `x₀`.
pub fn initial_state(problem: &CompositeProblem, config: &SolverConfig) -> Result<SolverState> {
    let mut rng = substream(config.seed, stream::INIT);
    let x = DVector::from_iterator(problem.d(), (0..problem.d()).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let y = DVector::from_iterator(problem.p(), (0..problem.p()).map(|_| rng.sample::<f64, _>(StandardNormal)));
    state_at(problem, config, x, y, DVector::zeros(problem.q()))
}

/// Start from given `(x, y, λ)`.
pub fn state_at(problem: &CompositeProblem, config: &SolverConfig, x: DVector<f64>, y: DVector<f64>, lambda: DVector<f64>) -> Result<SolverState> {
    if x.len() != problem.d() || y.len() != problem.p() || lambda.len() != problem.q() {
        return Err(Error::input("initial point has wrong dimensions"));
    }
    let n = problem.n() as u64;
    let (memory, ifo) = match config.variant {
        Variant::Dete | Variant::Stoc => (VariantMemory::None, 0),
        Variant::Svrg => (VariantMemory::Svrg(SvrgMemory::new(&problem.loss, &x)?), n),
        Variant::Saga => (VariantMemory::Saga(SagaMemory::new(&problem.loss, &x, config.store_saga_points)?), n),
    };
    Ok(SolverState { x_prev: x.clone(), x, y, lambda, t: 0, ifo, memory })
}

/// One row of a run's trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    /// Solver time only; recording is excluded.
    pub wall_time_s: f64,
    pub ifo: u64,
    /// `f(x) + g(y)`.
    pub objective: f64,
    /// `f(x) + g(Ax)` when `B = −I`, `c = 0`.
    pub objective_eliminated: Option<f64>,
    pub feas_sq: f64,
    pub dual_sq: f64,
    pub subgrad_sq: f64,
    pub test_error: Option<f64>,
    pub test_loss: Option<f64>,
    pub lyapunov: Option<f64>,
}

/// Everything about one step, handed to [`Observer::on_step`].
pub struct StepView<'a> {
    /// Index of the new iterate (`t + 1`).
    pub t: usize,
    pub x_prev: &'a DVector<f64>,
    pub x: &'a DVector<f64>,
    pub y: &'a DVector<f64>,
    pub lambda_prev: &'a DVector<f64>,
    pub lambda: &'a DVector<f64>,
    pub g_hat: &'a DVector<f64>,
    pub batch: &'a [usize],
    pub params: &'a ResolvedParams,
}

/// Hooks into a run. Time spent here is not counted in `wall_time_s`.
pub trait Observer {
    fn on_step(&mut self, _step: &StepView<'_>, _state_memory: &VariantMemory) -> Result<()> {
        Ok(())
    }

    /// May fill the optional columns of `record`.
    fn on_record(&mut self, _record: &mut TraceRecord, _state: &SolverState) -> Result<()> {
        Ok(())
    }
}

pub struct NoObserver;

impl Observer for NoObserver {}

/// `(x_t, y_t, λ_t)` at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub t: usize,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub lambda: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub trace: Vec<TraceRecord>,
    /// Final state; its `(x, y)` is the last iterate.
    pub state: SolverState,
    /// The iterate drawn uniformly from `t = 1..=T`; `None` when `T = 0`.
    pub random_iterate: Option<Iterate>,
    pub params: ResolvedParams,
}

/// Runs from the seeded initial point without hooks.
pub fn solve(problem: &CompositeProblem, config: &SolverConfig) -> Result<RunOutput> {
    run(problem, config, &mut NoObserver)
}

/// Runs from the seeded initial point.
pub fn run(problem: &CompositeProblem, config: &SolverConfig, observer: &mut dyn Observer) -> Result<RunOutput> {
    config.validate(problem)?;
    let state = initial_state(problem, config)?;
    run_from(problem, config, state, observer)
}

/// Runs `config.iterations` effective iterations starting at `state`.
pub fn run_from(problem: &CompositeProblem, config: &SolverConfig, mut state: SolverState, observer: &mut dyn Observer) -> Result<RunOutput> {
    let params = config.validate(problem)?;
    let cs = &problem.constraints;
    let loss = &problem.loss;
    let n = problem.n();
    let (eta, rho, r) = (config.eta, config.rho, params.r);
    let total = config.iterations;

    let mut batch_rng = substream(config.seed, stream::BATCH);
    let output_index = if total > 0 { Some(substream(config.seed, stream::OUTPUT).random_range(1..=total)) } else { None };

    let mut trace = Vec::with_capacity(total / config.trace_stride + 1);
    let mut random_iterate = None;
    let mut elapsed = 0.0;

    for _ in 0..total {
        let clock = Instant::now();
        let batch = match config.variant {
            Variant::Dete => Vec::new(),
            _ => sample_batch(&mut batch_rng, n, params.batch_size),
        };

        let y_next = y_update(problem, &state.x, &state.lambda, rho)?;

        let g_hat = match &mut state.memory {
            VariantMemory::None if config.variant == Variant::Dete => {
                state.ifo += n as u64;
                loss.mean_grad_unchecked(&state.x, 0..n, n)
            }
            VariantMemory::None => {
                state.ifo += batch.len() as u64;
                stoc_gradient(loss, &state.x, &batch)?
            }
            VariantMemory::Svrg(mem) => {
                if mem.inner == params.epoch_len {
                    mem.retake(loss, &state.x);
                    state.ifo += n as u64;
                }
                mem.inner += 1;
                state.ifo += 2 * batch.len() as u64;
                svrg_gradient(loss, &state.x, mem, &batch)?
            }
            VariantMemory::Saga(mem) => {
                state.ifo += batch.len() as u64;
                saga_gradient(loss, &state.x, mem, &batch)?
            }
        };

        let x_next = x_update_uzawa(cs, &state.x, &y_next, &state.lambda, &g_hat, eta, rho, r)?;
        let lambda_next = lambda_update(cs, &state.lambda, &x_next, &y_next, rho);

        if let VariantMemory::Saga(mem) = &mut state.memory {
            state.ifo += mem.refresh(loss, &x_next, &batch) as u64;
        }

        let t_next = state.t + 1;
        check_finite(t_next, &x_next, &y_next, &lambda_next)?;

        let x_prev = std::mem::replace(&mut state.x, x_next);
        let lambda_prev = std::mem::replace(&mut state.lambda, lambda_next);
        state.x_prev = x_prev;
        state.y = y_next;
        state.t = t_next;
        elapsed += clock.elapsed().as_secs_f64();

        let view = StepView {
            t: t_next,
            x_prev: &state.x_prev,
            x: &state.x,
            y: &state.y,
            lambda_prev: &lambda_prev,
            lambda: &state.lambda,
            g_hat: &g_hat,
            batch: &batch,
            params: &params,
        };
        observer.on_step(&view, &state.memory)?;

        if output_index == Some(t_next) {
            random_iterate = Some(Iterate { t: t_next, x: state.x.clone(), y: state.y.clone(), lambda: state.lambda.clone() });
        }

        let out_of_time = config.time_limit_s.is_some_and(|limit| elapsed >= limit);
        if t_next.is_multiple_of(config.trace_stride) || t_next == total || out_of_time {
            if cfg!(debug_assertions) {
                if let VariantMemory::Saga(mem) = &state.memory {
                    mem.check_consistency(1e-8)?;
                }
            }
            let mut record = trace_record(problem, &state, rho, elapsed)?;
            observer.on_record(&mut record, &state)?;
            trace.push(record);
        }
        if out_of_time {
            break;
        }
    }

    Ok(RunOutput { trace, state, random_iterate, params })
}

fn check_finite(t: usize, x: &DVector<f64>, y: &DVector<f64>, lambda: &DVector<f64>) -> Result<()> {
    let norm = x.norm();
    if !norm.is_finite() || y.iter().chain(lambda.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Divergence { iteration: t, reason: "non-finite iterate".into() });
    }
    if norm > DIVERGENCE_NORM {
        return Err(Error::Divergence { iteration: t, reason: format!("‖x‖ = {norm:e} exceeds {DIVERGENCE_NORM:e}") });
    }
    Ok(())
}

/// Residuals and objective of `state`, as stored in the trace; `elapsed` is
/// the solver time so far.
pub fn trace_record(problem: &CompositeProblem, state: &SolverState, rho: f64, elapsed: f64) -> Result<TraceRecord> {
    let report = metrics::stationarity_after_step(problem, &state.x, &state.y, &state.lambda, &state.x_prev, rho)?;
    Ok(TraceRecord {
        t: state.t,
        wall_time_s: elapsed,
        ifo: state.ifo,
        objective: problem.objective(&state.x, &state.y)?,
        objective_eliminated: problem.eliminated_objective(&state.x)?,
        feas_sq: report.feasibility_sq,
        dual_sq: report.dual_sq,
        subgrad_sq: report.subgrad_dist_sq,
        test_error: None,
        test_loss: None,
        lyapunov: None,
    })
}
