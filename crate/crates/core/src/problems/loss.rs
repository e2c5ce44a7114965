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

//! Smooth finite-sum losses `f(x) = (1/n) Σ f_i(x)`.
//!
//! Every mini-batch mean is accumulated sequentially in the order the
//! indices are given, so the same index list always yields the same bits and
//! the full index set `0..n` reproduces the full gradient exactly.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Features, Labels};
use crate::error::{Error, Result};

/// Logistic function `1 / (1 + e^{-u})`, evaluated without overflow.
#[inline]
pub fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Sigmoid loss `f_i(x) = 1 / (1 + exp(b_i a_iᵀx))`; nonconvex, values in (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmoidLoss {
    pub features: Features,
    /// ±1 labels.
    pub labels: Vec<f64>,
}

impl SigmoidLoss {
    pub fn new(features: Features, labels: Vec<f64>) -> Result<Self> {
        if features.n() != labels.len() {
            return Err(Error::input("feature rows and labels differ in length"));
        }
        if labels.iter().any(|b| *b != 1.0 && *b != -1.0) {
            return Err(Error::input("sigmoid loss needs ±1 labels"));
        }
        Ok(SigmoidLoss { features, labels })
    }

    pub fn from_dataset(ds: &Dataset) -> Result<Self> {
        match &ds.labels {
            Labels::Binary(b) => Self::new(ds.features.clone(), b.clone()),
            Labels::Multiclass { .. } => Err(Error::input("sigmoid loss needs a binary dataset")),
        }
    }

    #[inline]
    fn margin(&self, i: usize, x: &[f64]) -> f64 {
        self.labels[i] * self.features.row_dot(i, x)
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        // 1/(1+e^u) = logistic(-u)
        logistic(-self.margin(i, x))
    }

    /// `out += scale * ∇f_i(x)` where `∇f_i = -b_i a_i e^u/(1+e^u)^2`.
    fn add_component_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        let s = logistic(self.margin(i, x));
        let weight = -self.labels[i] * s * (1.0 - s);
        self.features.row_axpy(i, scale * weight, out);
    }
}

/// Multinomial logistic loss on an `m x d` coefficient matrix (stored
/// row-major, class `c` at `c*d..(c+1)*d`) plus the smooth part of the
/// log-sum penalty, `ν1 (Σ κ(|X_cj|) - κ0 ‖X‖₁)` with `κ(α) = β log(1 + α/θ)`
/// and `κ0 = β/θ`. The remaining convex `ν1 κ0 ‖X‖₁` belongs to the regularizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedMultiTaskLoss {
    pub features: Features,
    /// Class indices in `[0, classes)`.
    pub labels: Vec<usize>,
    pub classes: usize,
    pub nu1: f64,
    pub beta: f64,
    pub theta: f64,
}

impl SmoothedMultiTaskLoss {
    pub fn new(features: Features, labels: Vec<usize>, classes: usize, nu1: f64, beta: f64, theta: f64) -> Result<Self> {
        if theta <= 0.0 || beta < 0.0 || !beta.is_finite() || !theta.is_finite() {
            return Err(Error::config(format!("log-sum parameters need β ≥ 0 and θ > 0 (got β={beta}, θ={theta})")));
        }
        if nu1 < 0.0 {
            return Err(Error::config("ν1 must be nonnegative"));
        }
        if classes == 0 || labels.iter().any(|c| *c >= classes) {
            return Err(Error::input("class labels outside [0, classes)"));
        }
        if features.n() != labels.len() {
            return Err(Error::input("feature rows and labels differ in length"));
        }
        Ok(SmoothedMultiTaskLoss { features, labels, classes, nu1, beta, theta })
    }

    pub fn from_dataset(ds: &Dataset, nu1: f64, beta: f64, theta: f64) -> Result<Self> {
        match &ds.labels {
            Labels::Multiclass { classes, labels } => Self::new(ds.features.clone(), labels.clone(), *classes, nu1, beta, theta),
            Labels::Binary(b) => {
                let labels = b.iter().map(|v| usize::from(*v > 0.0)).collect();
                Self::new(ds.features.clone(), labels, 2, nu1, beta, theta)
            }
        }
    }

    /// `κ'(0) = β/θ`.
    pub fn kappa0(&self) -> f64 {
        self.beta / self.theta
    }

    fn scores(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let d = self.features.d();
        (0..self.classes).map(|c| self.features.row_dot(i, &x[c * d..(c + 1) * d])).collect()
    }

    fn component_value(&self, i: usize, x: &[f64]) -> f64 {
        let s = self.scores(i, x);
        let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        lse - s[self.labels[i]]
    }

    fn add_component_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        let d = self.features.d();
        let mut s = self.scores(i, x);
        let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in s.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for (c, p) in s.iter().enumerate() {
            let target = if c == self.labels[i] { 1.0 } else { 0.0 };
            let coeff = p / total - target;
            if coeff != 0.0 {
                self.features.row_axpy(i, scale * coeff, &mut out[c * d..(c + 1) * d]);
            }
        }
    }

    /// `ν1 Σ (κ(|x|) - κ0 |x|)`, always ≤ 0.
    pub fn penalty_value(&self, x: &[f64]) -> f64 {
        if self.nu1 == 0.0 || self.beta == 0.0 {
            return 0.0;
        }
        let k0 = self.kappa0();
        let mut acc = 0.0;
        for v in x {
            let a = v.abs();
            acc += self.beta * (a / self.theta).ln_1p() - k0 * a;
        }
        self.nu1 * acc
    }

    /// `out += ν1 sign(x)(β/(θ+|x|) - β/θ)`, exactly 0 at `x = 0`.
    pub fn add_penalty_grad(&self, x: &[f64], out: &mut [f64]) {
        if self.nu1 == 0.0 || self.beta == 0.0 {
            return;
        }
        let k0 = self.kappa0();
        for (o, v) in out.iter_mut().zip(x) {
            if *v != 0.0 {
                *o += self.nu1 * v.signum() * (self.beta / (self.theta + v.abs()) - k0);
            }
        }
    }

    /// Index of the highest-scoring class.
    pub fn predict(&self, i: usize, x: &[f64]) -> usize {
        let s = self.scores(i, x);
        let mut best = 0;
        for c in 1..s.len() {
            if s[c] > s[best] {
                best = c;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SmoothLoss {
    Sigmoid(SigmoidLoss),
    SmoothedMultiTask(SmoothedMultiTaskLoss),
}

impl SmoothLoss {
    /// Number of components `n`.
    pub fn n(&self) -> usize {
        self.features().n()
    }

    /// Primal dimension (`d`, or `m*d` for the multi-task loss).
    pub fn dim(&self) -> usize {
        match self {
            SmoothLoss::Sigmoid(l) => l.features.d(),
            SmoothLoss::SmoothedMultiTask(l) => l.classes * l.features.d(),
        }
    }

    pub fn features(&self) -> &Features {
        match self {
            SmoothLoss::Sigmoid(l) => &l.features,
            SmoothLoss::SmoothedMultiTask(l) => &l.features,
        }
    }

    fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::input(format!("point has dimension {}, loss expects {}", x.len(), self.dim())));
        }
        Ok(())
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        let n = self.n();
        if let Some(bad) = indices.iter().find(|i| **i >= n) {
            return Err(Error::input(format!("sample index {bad} out of range [0, {n})")));
        }
        Ok(())
    }

    fn raw_component_value(&self, i: usize, x: &[f64]) -> f64 {
        match self {
            SmoothLoss::Sigmoid(l) => l.component_value(i, x),
            SmoothLoss::SmoothedMultiTask(l) => l.component_value(i, x),
        }
    }

    fn raw_add_component_grad(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        match self {
            SmoothLoss::Sigmoid(l) => l.add_component_grad(i, x, scale, out),
            SmoothLoss::SmoothedMultiTask(l) => l.add_component_grad(i, x, scale, out),
        }
    }

    fn penalty_value(&self, x: &[f64]) -> f64 {
        match self {
            SmoothLoss::Sigmoid(_) => 0.0,
            SmoothLoss::SmoothedMultiTask(l) => l.penalty_value(x),
        }
    }

    fn add_penalty_grad(&self, x: &[f64], out: &mut [f64]) {
        if let SmoothLoss::SmoothedMultiTask(l) = self {
            l.add_penalty_grad(x, out);
        }
    }

    /// `f_i(x)`.
    pub fn component_value(&self, i: usize, x: &DVector<f64>) -> Result<f64> {
        self.check_point(x)?;
        self.check_indices(&[i])?;
        Ok(self.raw_component_value(i, x.as_slice()) + self.penalty_value(x.as_slice()))
    }

    /// `∇f_i(x)`.
    pub fn component_grad(&self, i: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_point(x)?;
        self.check_indices(&[i])?;
        let mut out = DVector::zeros(self.dim());
        self.component_grad_into(i, x, &mut out);
        Ok(out)
    }

    /// Unchecked `out = ∇f_i(x)`.
    pub(crate) fn component_grad_into(&self, i: usize, x: &DVector<f64>, out: &mut DVector<f64>) {
        out.fill(0.0);
        self.raw_add_component_grad(i, x.as_slice(), 1.0, out.as_mut_slice());
        self.add_penalty_grad(x.as_slice(), out.as_mut_slice());
    }

    /// `(1/|I|) Σ_{i∈I} f_i(x)`.
    pub fn value(&self, x: &DVector<f64>, indices: &[usize]) -> Result<f64> {
        self.check_point(x)?;
        self.check_indices(indices)?;
        if indices.is_empty() {
            return Err(Error::input("empty index set"));
        }
        Ok(self.mean_value_unchecked(x, indices.iter().copied(), indices.len()))
    }

    /// `(1/|I|) Σ_{i∈I} ∇f_i(x)`.
    pub fn grad(&self, x: &DVector<f64>, indices: &[usize]) -> Result<DVector<f64>> {
        self.check_point(x)?;
        self.check_indices(indices)?;
        if indices.is_empty() {
            return Err(Error::input("empty index set"));
        }
        Ok(self.mean_grad_unchecked(x, indices.iter().copied(), indices.len()))
    }

    pub fn full_value(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.mean_value_unchecked(x, 0..self.n(), self.n()))
    }

    pub fn full_grad(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_point(x)?;
        Ok(self.mean_grad_unchecked(x, 0..self.n(), self.n()))
    }

    pub(crate) fn mean_value_unchecked(&self, x: &DVector<f64>, indices: impl Iterator<Item = usize>, count: usize) -> f64 {
        let xs = x.as_slice();
        let mut acc = 0.0;
        for i in indices {
            acc += self.raw_component_value(i, xs);
        }
        acc / count as f64 + self.penalty_value(xs)
    }

    pub(crate) fn mean_grad_unchecked(&self, x: &DVector<f64>, indices: impl Iterator<Item = usize>, count: usize) -> DVector<f64> {
        let xs = x.as_slice();
        let mut out = DVector::zeros(self.dim());
        let buf = out.as_mut_slice();
        for i in indices {
            self.raw_add_component_grad(i, xs, 1.0, buf);
        }
        let inv = count as f64;
        for v in buf.iter_mut() {
            *v /= inv;
        }
        self.add_penalty_grad(xs, buf);
        out
    }

    /// Misclassification rate of `x` on this loss's samples, in `[0, 1]`.
    pub fn error_rate(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_point(x)?;
        let n = self.n();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let wrong = match self {
            SmoothLoss::Sigmoid(l) => (0..n)
                .filter(|&i| {
                    let score = l.features.row_dot(i, x.as_slice());
                    let predicted = if score >= 0.0 { 1.0 } else { -1.0 };
                    predicted != l.labels[i]
                })
                .count(),
            SmoothLoss::SmoothedMultiTask(l) => (0..n).filter(|&i| l.predict(i, x.as_slice()) != l.labels[i]).count(),
        };
        Ok(wrong as f64 / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigmoid_single(a: Vec<f64>, b: f64) -> SmoothLoss {
        SmoothLoss::Sigmoid(SigmoidLoss::new(Features::from_rows(&[a]).unwrap(), vec![b]).unwrap())
    }

    #[test]
    fn sigmoid_at_zero_is_half() {
        let loss = sigmoid_single(vec![1.0, -2.0], -1.0);
        assert_eq!(loss.full_value(&DVector::zeros(2)).unwrap(), 0.5);
    }

    #[test]
    fn sigmoid_scalar_oracle() {
        let loss = sigmoid_single(vec![1.0, 0.0], 1.0);
        let x = DVector::from_vec(vec![3f64.ln(), 0.0]);
        assert!((loss.full_value(&x).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_grad_at_zero_is_quarter_mean() {
        let rows = vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.0, 3.0]];
        let labels = vec![1.0, -1.0, 1.0];
        let loss = SmoothLoss::Sigmoid(SigmoidLoss::new(Features::from_rows(&rows).unwrap(), labels.clone()).unwrap());
        let g = loss.grad(&DVector::zeros(2), &[0, 2]).unwrap();
        for j in 0..2 {
            let expected = -(labels[0] * rows[0][j] + labels[2] * rows[2][j]) / 4.0 / 2.0;
            assert!((g[j] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_index() {
        let loss = sigmoid_single(vec![1.0], 1.0);
        assert!(matches!(loss.value(&DVector::zeros(1), &[1]), Err(Error::Input(_))));
        assert!(matches!(loss.grad(&DVector::zeros(1), &[3]), Err(Error::Input(_))));
        assert!(loss.grad(&DVector::zeros(2), &[0]).is_err());
    }

    #[test]
    fn multitask_rejects_bad_logsum_params() {
        let f = Features::from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(SmoothedMultiTaskLoss::new(f.clone(), vec![0], 2, 1.0, 1.0, 0.0), Err(Error::Config(_))));
        assert!(matches!(SmoothedMultiTaskLoss::new(f.clone(), vec![0], 2, 1.0, -1.0, 1.0), Err(Error::Config(_))));
        assert!(SmoothedMultiTaskLoss::new(f, vec![0], 2, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn multitask_grad_at_zero() {
        let rows = vec![vec![1.0, -1.0], vec![0.5, 2.0]];
        let loss = SmoothedMultiTaskLoss::new(Features::from_rows(&rows).unwrap(), vec![2, 0], 3, 0.7, 1.3, 0.4).unwrap();
        let kappa0 = loss.kappa0();
        assert_eq!(kappa0, 1.3 / 0.4);
        let loss = SmoothLoss::SmoothedMultiTask(loss);
        let g = loss.grad(&DVector::zeros(6), &[0]).unwrap();
        for c in 0..3 {
            let coeff = 1.0 / 3.0 - if c == 2 { 1.0 } else { 0.0 };
            for j in 0..2 {
                assert!((g[c * 2 + j] - coeff * rows[0][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn logistic_is_stable() {
        assert_eq!(logistic(1000.0), 1.0);
        assert_eq!(logistic(-1000.0), 0.0);
        assert!((logistic(0.0) - 0.5).abs() < 1e-16);
    }
}
