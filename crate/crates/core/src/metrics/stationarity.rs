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


//! ε-stationarity residuals.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{BlockKind, CompositeProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    /// `‖Ax + By − c‖²`.
    pub feasibility_sq: f64,
    /// `‖∇f(x) − Aᵀλ‖²`.
    pub dual_sq: f64,
    /// `dist(Bᵀλ, ∂g(y))²`.
    pub subgrad_dist_sq: f64,
    /// Largest of the three.
    pub epsilon: f64,
}

impl StationarityReport {
    fn new(feasibility_sq: f64, dual_sq: f64, subgrad_dist_sq: f64) -> Self {
        let epsilon = feasibility_sq.max(dual_sq).max(subgrad_dist_sq);
        StationarityReport { feasibility_sq, dual_sq, subgrad_dist_sq, epsilon }
    }
}

/// `dist(v, ∂(ν‖·‖₁)(y))²`: per coordinate `|v_i − ν sign(y_i)|` when
/// `y_i ≠ 0`, else `max(|v_i| − ν, 0)`.
pub fn l1_subgrad_dist_sq(v: &[f64], y: &[f64], nu: f64) -> f64 {
    v.iter()
        .zip(y)
        .map(|(vi, yi)| {
            let d = if *yi != 0.0 { vi - nu * yi.signum() } else { (vi.abs() - nu).max(0.0) };
            d * d
        })
        .sum()
}

fn primal_dual(problem: &CompositeProblem, x: &DVector<f64>, y: &DVector<f64>, lambda: &DVector<f64>) -> Result<(f64, f64, DVector<f64>)> {
    let cs = &problem.constraints;
    if lambda.len() != cs.q() || y.len() != cs.p() {
        return Err(Error::input("iterate has wrong dimensions"));
    }
    let feas = cs.residual(x, y).norm_squared();
    let dual = (problem.loss.full_grad(x)? - cs.a.apply_transpose(lambda)).norm_squared();
    Ok((feas, dual, cs.b.apply_transpose(lambda)))
}

/// Residuals at `(x, y, λ)`. Nuclear-norm blocks have no closed-form
/// distance; use [`stationarity_after_step`] for those.
pub fn stationarity(problem: &CompositeProblem, x: &DVector<f64>, y: &DVector<f64>, lambda: &DVector<f64>) -> Result<StationarityReport> {
    let (feas, dual, v) = primal_dual(problem, x, y, lambda)?;
    let mut sub = 0.0;
    for block in problem.regularizer.blocks() {
        match block.kind {
            BlockKind::L1 => {
                let r = block.range.clone();
                sub += l1_subgrad_dist_sq(&v.as_slice()[r.clone()], &y.as_slice()[r], block.weight);
            }
            BlockKind::Nuclear { .. } => {
                return Err(Error::Capability("nuclear-norm subgradient distance needs the previous iterate".into()));
            }
        }
    }
    Ok(StationarityReport::new(feas, dual, sub))
}

/// Residuals right after a step `x_prev → x`. Nuclear blocks use the bound
/// `‖ρBᵀA(x − x_prev)‖²` restricted to the block, which dominates the
/// distance because `y` solved its subproblem exactly.
pub fn stationarity_after_step(
    problem: &CompositeProblem,
    x: &DVector<f64>,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    x_prev: &DVector<f64>,
    rho: f64,
) -> Result<StationarityReport> {
    let (feas, dual, v) = primal_dual(problem, x, y, lambda)?;
    let cs = &problem.constraints;
    let mut surrogate: Option<DVector<f64>> = None;
    let mut sub = 0.0;
    for block in problem.regularizer.blocks() {
        let r = block.range.clone();
        match block.kind {
            BlockKind::L1 => sub += l1_subgrad_dist_sq(&v.as_slice()[r.clone()], &y.as_slice()[r], block.weight),
            BlockKind::Nuclear { .. } => {
                let s = surrogate.get_or_insert_with(|| cs.b.apply_transpose(&cs.a.apply(&(x - x_prev))) * rho);
                sub += s.as_slice()[r].iter().map(|u| u * u).sum::<f64>();
            }
        }
    }
    Ok(StationarityReport::new(feas, dual, sub))
}
