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


//! Gradient estimators: plain mini-batch, SVRG and SAGA.

use nalgebra::DVector;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::SmoothLoss;
use crate::rng::Rng;

/// `M` indices drawn uniformly with replacement; with `M = n` the batch is
/// the full index set in order, so every estimator reduces to `∇f(x)`.
pub fn sample_batch(rng: &mut Rng, n: usize, m: usize) -> Vec<usize> {
    if m >= n {
        return (0..n).collect();
    }
    (0..m).map(|_| rng.random_range(0..n)).collect()
}

/// True when `batch` is exactly `0..n` in order.
pub fn is_full_batch(batch: &[usize], n: usize) -> bool {
    batch.len() == n && batch.iter().enumerate().all(|(k, i)| k == *i)
}

fn check_batch(loss: &SmoothLoss, x: &DVector<f64>, batch: &[usize]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::config("mini-batch must not be empty"));
    }
    if x.len() != loss.dim() {
        return Err(Error::input(format!("point has dimension {}, loss expects {}", x.len(), loss.dim())));
    }
    let n = loss.n();
    if let Some(bad) = batch.iter().find(|i| **i >= n) {
        return Err(Error::input(format!("sample index {bad} out of range [0, {n})")));
    }
    Ok(())
}

/// `(1/M) Σ_{i∈I} ∇f_i(x)`.
pub fn stoc_gradient(loss: &SmoothLoss, x: &DVector<f64>, batch: &[usize]) -> Result<DVector<f64>> {
    check_batch(loss, x, batch)?;
    Ok(loss.mean_grad_unchecked(x, batch.iter().copied(), batch.len()))
}

/// Snapshot `x̃` and `∇f(x̃)` for the current epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrgMemory {
    pub snapshot: DVector<f64>,
    pub snapshot_grad: DVector<f64>,
    /// Epoch counter `s`.
    pub epoch: usize,
    /// Position within the epoch, `0..m`.
    pub inner: usize,
}

impl SvrgMemory {
    /// Takes `x` as the snapshot and evaluates the full gradient there.
    pub fn new(loss: &SmoothLoss, x: &DVector<f64>) -> Result<Self> {
        Ok(SvrgMemory { snapshot: x.clone(), snapshot_grad: loss.full_grad(x)?, epoch: 0, inner: 0 })
    }

    pub(crate) fn retake(&mut self, loss: &SmoothLoss, x: &DVector<f64>) {
        self.snapshot.copy_from(x);
        self.snapshot_grad = loss.mean_grad_unchecked(x, 0..loss.n(), loss.n());
        self.epoch += 1;
        self.inner = 0;
    }

    /// Recomputes `∇f(x̃)` and compares, relative tolerance `tol`.
    pub fn verify(&self, loss: &SmoothLoss, tol: f64) -> Result<()> {
        let fresh = loss.full_grad(&self.snapshot)?;
        let err = (&fresh - &self.snapshot_grad).norm();
        if err > tol * fresh.norm().max(1e-300) && err > 0.0 {
            return Err(Error::Internal(format!("stale snapshot gradient (error {err:e})")));
        }
        Ok(())
    }
}

/// `(1/M) Σ_{i∈I} (∇f_i(x) − ∇f_i(x̃)) + ∇f(x̃)`.
pub fn svrg_gradient(loss: &SmoothLoss, x: &DVector<f64>, memory: &SvrgMemory, batch: &[usize]) -> Result<DVector<f64>> {
    check_batch(loss, x, batch)?;
    if memory.snapshot.len() != x.len() || memory.snapshot_grad.len() != x.len() {
        return Err(Error::Internal("snapshot does not match the problem dimension".into()));
    }
    let n = loss.n();
    if is_full_batch(batch, n) {
        return Ok(loss.mean_grad_unchecked(x, 0..n, n));
    }
    let at_x = loss.mean_grad_unchecked(x, batch.iter().copied(), batch.len());
    let at_snapshot = loss.mean_grad_unchecked(&memory.snapshot, batch.iter().copied(), batch.len());
    Ok(at_x - at_snapshot + &memory.snapshot_grad)
}

/// Gradient table `∇f_i(z_i)` (row-major `n x d`), its running mean `ψ`,
/// and optionally the points `z_i` themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SagaMemory {
    pub n: usize,
    pub d: usize,
    pub grad_table: Vec<f64>,
    pub psi: DVector<f64>,
    pub point_table: Option<Vec<f64>>,
}

impl SagaMemory {
    /// Every `z_i = x`.
    pub fn new(loss: &SmoothLoss, x: &DVector<f64>, store_points: bool) -> Result<Self> {
        if x.len() != loss.dim() {
            return Err(Error::input("point has wrong dimension"));
        }
        let (n, d) = (loss.n(), loss.dim());
        let mut grad_table = vec![0.0; n * d];
        let mut g = DVector::zeros(d);
        for i in 0..n {
            loss.component_grad_into(i, x, &mut g);
            grad_table[i * d..(i + 1) * d].copy_from_slice(g.as_slice());
        }
        let mut memory = SagaMemory { n, d, grad_table, psi: DVector::zeros(d), point_table: None };
        memory.psi = memory.table_mean();
        if store_points {
            memory.point_table = Some((0..n).flat_map(|_| x.iter().copied()).collect());
        }
        Ok(memory)
    }

    pub fn grad_row(&self, i: usize) -> &[f64] {
        &self.grad_table[i * self.d..(i + 1) * self.d]
    }

    pub fn point_row(&self, i: usize) -> Option<&[f64]> {
        self.point_table.as_ref().map(|p| &p[i * self.d..(i + 1) * self.d])
    }

    /// Mean of the table rows, summed in index order.
    pub fn table_mean(&self) -> DVector<f64> {
        let mut acc = DVector::zeros(self.d);
        for i in 0..self.n {
            for (a, v) in acc.iter_mut().zip(self.grad_row(i)) {
                *a += v;
            }
        }
        acc / self.n as f64
    }

    /// Errors when `ψ` has drifted from the table mean by more than `tol` (relative).
    pub fn check_consistency(&self, tol: f64) -> Result<()> {
        let mean = self.table_mean();
        let err = (&mean - &self.psi).norm();
        let scale = mean.norm().max(self.psi.norm());
        if err > tol * scale && err > 1e-300 {
            return Err(Error::Internal(format!("SAGA running mean drifted by {err:e}")));
        }
        Ok(())
    }

    /// Sets `z_i = x` for each distinct `i` in `batch`, updating `ψ`
    /// incrementally. Returns how many component gradients were evaluated.
    pub fn refresh(&mut self, loss: &SmoothLoss, x: &DVector<f64>, batch: &[usize]) -> usize {
        let mut unique = batch.to_vec();
        unique.sort_unstable();
        unique.dedup();
        let d = self.d;
        let inv_n = 1.0 / self.n as f64;
        let mut g = DVector::zeros(d);
        for &i in &unique {
            loss.component_grad_into(i, x, &mut g);
            let row = &mut self.grad_table[i * d..(i + 1) * d];
            for ((p, old), new) in self.psi.iter_mut().zip(row.iter_mut()).zip(g.iter()) {
                *p -= (*old - new) * inv_n;
                *old = *new;
            }
            if let Some(points) = self.point_table.as_mut() {
                points[i * d..(i + 1) * d].copy_from_slice(x.as_slice());
            }
        }
        unique.len()
    }
}

/// `(1/M) Σ_{i∈I} (∇f_i(x) − ∇f_i(z_i)) + ψ`.
pub fn saga_gradient(loss: &SmoothLoss, x: &DVector<f64>, memory: &SagaMemory, batch: &[usize]) -> Result<DVector<f64>> {
    check_batch(loss, x, batch)?;
    if memory.d != x.len() || memory.n != loss.n() {
        return Err(Error::Internal("gradient table does not match the problem".into()));
    }
    let n = loss.n();
    if is_full_batch(batch, n) {
        return Ok(loss.mean_grad_unchecked(x, 0..n, n));
    }
    let mut out = loss.mean_grad_unchecked(x, batch.iter().copied(), batch.len());
    let mut table = DVector::<f64>::zeros(memory.d);
    for &i in batch {
        for (t, v) in table.iter_mut().zip(memory.grad_row(i)) {
            *t += v;
        }
    }
    let inv = batch.len() as f64;
    for ((o, t), p) in out.iter_mut().zip(table.iter()).zip(memory.psi.iter()) {
        *o += p - t / inv;
    }
    Ok(out)
}
