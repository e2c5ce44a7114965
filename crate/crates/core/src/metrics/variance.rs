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


//! Empirical variance of the variance-reduced estimators against their bounds.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::SmoothLoss;
use crate::rng::{stream, substream};
use crate::solvers::{sample_batch, saga_gradient, svrg_gradient, SagaMemory, SolverState, SvrgMemory, VariantMemory};

/// Largest `n` enumerated exhaustively (with `M = 1`).
pub const ENUMERATION_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    /// `E‖ĝ − ∇f(x)‖²`, exact or Monte-Carlo.
    pub empirical_var: f64,
    /// `(L²/M)‖x − x̃‖²` or `(L²/(Mn)) Σ ‖x − z_i‖²`.
    pub bound: f64,
    pub exhaustive: bool,
}

fn estimate(
    loss: &SmoothLoss,
    x: &DVector<f64>,
    batch_size: usize,
    n_draws: usize,
    seed: u64,
    estimator: impl Fn(&[usize]) -> Result<DVector<f64>>,
) -> Result<(f64, bool)> {
    let n = loss.n();
    let full = loss.full_grad(x)?;
    if batch_size == 1 && n <= ENUMERATION_LIMIT {
        let mut acc = 0.0;
        for i in 0..n {
            acc += (estimator(&[i])? - &full).norm_squared();
        }
        return Ok((acc / n as f64, true));
    }
    if n_draws == 0 {
        return Err(Error::config("Monte-Carlo variance needs at least one draw"));
    }
    let mut rng = substream(seed, stream::DIAGNOSTICS);
    let mut acc = 0.0;
    for _ in 0..n_draws {
        // Diagnostics draw with replacement even at M = n.
        let batch: Vec<usize> = if batch_size >= n {
            use rand::Rng as _;
            (0..batch_size).map(|_| rng.random_range(0..n)).collect()
        } else {
            sample_batch(&mut rng, n, batch_size)
        };
        acc += (estimator(&batch)? - &full).norm_squared();
    }
    Ok((acc / n_draws as f64, false))
}

pub fn svrg_variance(loss: &SmoothLoss, x: &DVector<f64>, memory: &SvrgMemory, batch_size: usize, l: f64, n_draws: usize, seed: u64) -> Result<VarianceReport> {
    let (empirical_var, exhaustive) = estimate(loss, x, batch_size, n_draws, seed, |b| svrg_gradient(loss, x, memory, b))?;
    let bound = l * l / batch_size as f64 * (x - &memory.snapshot).norm_squared();
    Ok(VarianceReport { empirical_var, bound, exhaustive })
}

pub fn saga_variance(loss: &SmoothLoss, x: &DVector<f64>, memory: &SagaMemory, batch_size: usize, l: f64, n_draws: usize, seed: u64) -> Result<VarianceReport> {
    if memory.point_table.is_none() {
        return Err(Error::Capability("SAGA variance bound needs store_saga_points = true".into()));
    }
    let (empirical_var, exhaustive) = estimate(loss, x, batch_size, n_draws, seed, |b| saga_gradient(loss, x, memory, b))?;
    let spread = super::lyapunov::table_spread(memory, x)? * memory.n as f64;
    let bound = l * l / (batch_size as f64 * memory.n as f64) * spread;
    Ok(VarianceReport { empirical_var, bound, exhaustive })
}

/// Dispatches on the state's variant; only SVRG and SAGA have a bound.
pub fn variance_diagnostics(loss: &SmoothLoss, state: &SolverState, batch_size: usize, l: f64, n_draws: usize, seed: u64) -> Result<VarianceReport> {
    match &state.memory {
        VariantMemory::Svrg(m) => svrg_variance(loss, &state.x, m, batch_size, l, n_draws, seed),
        VariantMemory::Saga(m) => saga_variance(loss, &state.x, m, batch_size, l, n_draws, seed),
        VariantMemory::None => Err(Error::config("variance diagnostics apply to SVRG and SAGA only")),
    }
}
