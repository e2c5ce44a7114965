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


//! Composite problems `min f(x) + g(y)  s.t.  Ax + By = c`.

pub mod constraints;
pub mod loss;
pub mod regularizer;

pub use constraints::{
    build_graph_guided_a, build_graph_guided_a_weighted, build_multitask_constraints, build_overlap_a, ConstraintSystem,
};
pub use loss::{SigmoidLoss, SmoothLoss, SmoothedMultiTaskLoss};
pub use regularizer::{nuclear_norm, prox_l1, prox_nuclear, Block, BlockKind, BlockSeparableRegularizer};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeProblem {
    pub loss: SmoothLoss,
    pub regularizer: BlockSeparableRegularizer,
    pub constraints: ConstraintSystem,
}

impl CompositeProblem {
    pub fn new(loss: SmoothLoss, regularizer: BlockSeparableRegularizer, constraints: ConstraintSystem) -> Result<Self> {
        if loss.dim() != constraints.d() {
            return Err(Error::input(format!("loss dimension {} but A has {} columns", loss.dim(), constraints.d())));
        }
        if regularizer.dim() != constraints.p() {
            return Err(Error::input(format!("regularizer dimension {} but B has {} columns", regularizer.dim(), constraints.p())));
        }
        if loss.n() == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(CompositeProblem { loss, regularizer, constraints })
    }

    /// Sigmoid loss with `ν‖Ax‖₁` over a graph-guided `A`.
    pub fn graph_guided(train: &Dataset, support: &DMatrix<bool>, edge_weight: f64, nu: f64) -> Result<Self> {
        let cs = build_graph_guided_a_weighted(support, edge_weight)?;
        let g = BlockSeparableRegularizer::l1(cs.p(), nu)?;
        Self::new(SmoothLoss::Sigmoid(SigmoidLoss::from_dataset(train)?), g, cs)
    }

    /// Sigmoid loss with `ν‖y‖₁` over `k` stacked copies of `x`.
    pub fn overlap(train: &Dataset, copies: usize, nu: f64) -> Result<Self> {
        let cs = build_overlap_a(train.d(), copies)?;
        let g = BlockSeparableRegularizer::l1(cs.p(), nu)?;
        Self::new(SmoothLoss::Sigmoid(SigmoidLoss::from_dataset(train)?), g, cs)
    }

    /// Multinomial logistic loss with the log-sum + nuclear-norm split.
    pub fn multitask(train: &Dataset, nu1: f64, nu2: f64, beta: f64, theta: f64) -> Result<Self> {
        let loss = SmoothedMultiTaskLoss::from_dataset(train, nu1, beta, theta)?;
        let (cs, g) = build_multitask_constraints(loss.classes, train.d(), nu1, nu2, loss.kappa0())?;
        Self::new(SmoothLoss::SmoothedMultiTask(loss), g, cs)
    }

    pub fn n(&self) -> usize {
        self.loss.n()
    }

    pub fn d(&self) -> usize {
        self.constraints.d()
    }

    pub fn p(&self) -> usize {
        self.constraints.p()
    }

    pub fn q(&self) -> usize {
        self.constraints.q()
    }

    /// `f(x) + g(y)`.
    pub fn objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        Ok(self.loss.full_value(x)? + self.regularizer.value(y)?)
    }

    /// `f(x) + g(Ax)`, defined when `B = −I` and `c = 0`.
    pub fn eliminated_objective(&self, x: &DVector<f64>) -> Result<Option<f64>> {
        let cs = &self.constraints;
        if !(cs.is_b_neg_identity() && cs.has_zero_offset()) {
            return Ok(None);
        }
        Ok(Some(self.loss.full_value(x)? + self.regularizer.value(&cs.a.apply(x))?))
    }

    /// `L_ρ(x, y, λ) = f(x) + g(y) − ⟨λ, Ax + By − c⟩ + (ρ/2)‖Ax + By − c‖²`.
    pub fn augmented_lagrangian(&self, x: &DVector<f64>, y: &DVector<f64>, lambda: &DVector<f64>, rho: f64) -> Result<f64> {
        if lambda.len() != self.q() {
            return Err(Error::input("multiplier has wrong dimension"));
        }
        let res = self.constraints.residual(x, y);
        Ok(self.objective(x, y)? - lambda.dot(&res) + 0.5 * rho * res.norm_squared())
    }
}
