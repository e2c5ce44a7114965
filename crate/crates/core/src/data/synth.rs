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

//! Synthetic binary-classification data for the graph-guided and
//! overlapping-group experiments.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, Features, Labels};
use crate::error::{Error, Result};
use crate::rng::{stream, substream};

/// Probability that an off-diagonal precision entry is drawn nonzero.
pub const PRECISION_NONZERO_PROB: f64 = 0.05;
/// Smallest eigenvalue enforced on the symmetrized precision matrix.
pub const PRECISION_MIN_EIGENVALUE: f64 = 0.1;
/// Side of the square coefficient matrix in the overlap task.
pub const OVERLAP_GRID: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionModel {
    pub lambda: DMatrix<f64>,
    /// Off-diagonal nonzero pattern of `lambda`.
    pub support: DMatrix<bool>,
    /// Diagonal shift added after symmetrization.
    pub shift: f64,
}

impl PrecisionModel {
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.lambda.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn edge_count(&self) -> usize {
        let d = self.support.nrows();
        (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| self.support[(i, j)]).count()
    }
}

/// Sparse precision matrix: each off-diagonal raw entry is zero with
/// probability 0.95, else uniform on `[-0.75,-0.25] ∪ [0.25,0.75]`; the raw
/// matrix is symmetrized and its diagonal shifted so that `λ_min = 0.1`.
pub fn gen_precision(d: usize, seed: u64) -> Result<PrecisionModel> {
    if d == 0 {
        return Err(Error::input("dimension must be at least 1"));
    }
    let mut rng = substream(seed, stream::PRECISION);
    let mut raw = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            if rng.random::<f64>() < PRECISION_NONZERO_PROB {
                let magnitude = rng.random_range(0.25..0.75);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                raw[(i, j)] = sign * magnitude;
            }
        }
    }
    let mut lambda = (&raw + raw.transpose()) * 0.5;
    let min_eig = SymmetricEigen::new(lambda.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = (PRECISION_MIN_EIGENVALUE - min_eig).max(0.0);
    for i in 0..d {
        lambda[(i, i)] += shift;
    }
    let support = DMatrix::from_fn(d, d, |i, j| i != j && lambda[(i, j)] != 0.0);
    Ok(PrecisionModel { lambda, support, shift })
}

/// Maps `z ~ N(0, I)` to `N(0, Λ⁻¹)` through the inverse transposed Cholesky factor.
fn precision_sampler(model: &PrecisionModel) -> Result<DMatrix<f64>> {
    let chol = model
        .lambda
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("precision matrix is not positive definite".into()))?;
    let lt = chol.l().transpose();
    let d = lt.nrows();
    lt.solve_upper_triangular(&DMatrix::identity(d, d))
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))
}

fn sign_label(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Graph-guided task: features `N(0, Λ⁻¹)`, `x*` standard normal and
/// `b_i = sign(a_iᵀx* + ε_i)` with `ε_i ~ U[0, 1]`.
pub fn gen_graph_guided(n: usize, d: usize, seed: u64) -> Result<(Dataset, PrecisionModel, DVector<f64>)> {
    if n == 0 {
        return Err(Error::input("sample count must be at least 1"));
    }
    let model = gen_precision(d, seed)?;
    let sampler = precision_sampler(&model)?;

    let mut truth_rng = substream(seed, stream::TRUTH);
    let x_star = DVector::from_iterator(d, (0..d).map(|_| truth_rng.sample::<f64, _>(StandardNormal)));

    let mut feat_rng = substream(seed, stream::FEATURES);
    let mut noise_rng = substream(seed, stream::NOISE);
    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut z = DVector::<f64>::zeros(d);
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut feat_rng);
        }
        let a = &sampler * &z;
        let eps: f64 = noise_rng.random::<f64>();
        labels.push(sign_label(a.dot(&x_star) + eps));
        values.extend(a.iter());
    }
    let features = Features::dense(n, d, values)?;
    let ds = Dataset::new(format!("graph_guided_n{n}_d{d}"), format!("synthetic:graph_guided:seed={seed}"), features, Labels::Binary(labels))?;
    Ok((ds, model, x_star))
}

/// Overlapping-group task with the default 20 x 20 coefficient grid (`d = 400`).
pub fn gen_overlap(n: usize, seed: u64) -> Result<(Dataset, DVector<f64>)> {
    gen_overlap_grid(n, OVERLAP_GRID, seed)
}

/// `x* = vec(X)` (column-major) where only the first column of the
/// `grid x grid` matrix `X` is nonzero; features and noise standard normal.
pub fn gen_overlap_grid(n: usize, grid: usize, seed: u64) -> Result<(Dataset, DVector<f64>)> {
    if n == 0 || grid == 0 {
        return Err(Error::input("sample count and grid size must be at least 1"));
    }
    let d = grid * grid;
    let mut truth_rng = substream(seed, stream::TRUTH);
    let mut x_star = DVector::<f64>::zeros(d);
    for i in 0..grid {
        x_star[i] = truth_rng.sample(StandardNormal);
    }

    let mut feat_rng = substream(seed, stream::FEATURES);
    let mut noise_rng = substream(seed, stream::NOISE);
    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let start = values.len();
        values.extend((0..d).map(|_| feat_rng.sample::<f64, _>(StandardNormal)));
        let margin: f64 = values[start..].iter().zip(x_star.iter()).map(|(a, x)| a * x).sum();
        let eps: f64 = noise_rng.sample(StandardNormal);
        labels.push(sign_label(margin + eps));
    }
    let features = Features::dense(n, d, values)?;
    let ds = Dataset::new(format!("overlap_n{n}_d{d}"), format!("synthetic:overlap:seed={seed}"), features, Labels::Binary(labels))?;
    Ok((ds, x_star))
}
