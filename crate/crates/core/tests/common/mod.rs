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


//! Small instances shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nc_admm::data::{gen_graph_guided, gen_overlap_grid, Dataset, Features, Labels};
use nc_admm::problems::CompositeProblem;

/// Graph-guided fused lasso on synthetic Gaussian-graph data.
pub fn graph_guided(n: usize, d: usize, seed: u64) -> CompositeProblem {
    let (ds, model, _) = gen_graph_guided(n, d, seed).unwrap();
    CompositeProblem::graph_guided(&ds, &model.support, 0.05, 1e-5).unwrap()
}

/// Overlap group lasso on a `grid × grid` image task.
pub fn overlap(n: usize, grid: usize, copies: usize, seed: u64) -> CompositeProblem {
    let (ds, _) = gen_overlap_grid(n, grid, seed).unwrap();
    CompositeProblem::overlap(&ds, copies, 1e-5).unwrap()
}

/// Random dense binary dataset with features in `[-1, 1]`.
pub fn random_binary(n: usize, d: usize, seed: u64) -> Dataset {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let labels: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    Dataset::new("random", "test", Features::dense(n, d, values).unwrap(), Labels::Binary(labels)).unwrap()
}

/// Random dense multiclass dataset.
pub fn random_multiclass(n: usize, d: usize, classes: usize, seed: u64) -> Dataset {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    Dataset::new("random", "test", Features::dense(n, d, values).unwrap(), Labels::Multiclass { classes, labels }).unwrap()
}

/// Chain-graph support on `d` nodes.
pub fn chain_support(d: usize) -> DMatrix<bool> {
    let mut s = DMatrix::from_element(d, d, false);
    for i in 0..d.saturating_sub(1) {
        s[(i, i + 1)] = true;
        s[(i + 1, i)] = true;
    }
    s
}

/// Tiny graph-guided problem on random data.
pub fn tiny_graph(n: usize, d: usize, seed: u64) -> CompositeProblem {
    CompositeProblem::graph_guided(&random_binary(n, d, seed), &chain_support(d), 0.05, 1e-3).unwrap()
}

pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
