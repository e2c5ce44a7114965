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


//! Linear coupling `Ax + By = c` and the builders for the experiment families.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::regularizer::{Block, BlockKind, BlockSeparableRegularizer};
use crate::error::{Error, Result};
use crate::linalg::{gram_extreme_eigenvalues, LinearMap};

/// Relative floor under which `λ_min(AᵀA)` is treated as zero.
const RANK_TOLERANCE: f64 = 1e-12;

/// `(A, B, c)` with the extreme eigenvalues of `AᵀA` cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub a: LinearMap,
    pub b: LinearMap,
    pub c: DVector<f64>,
    /// `λ_min(AᵀA)`, positive.
    pub phi_min_a: f64,
    /// `λ_max(AᵀA)`.
    pub norm_ata: f64,
}

impl ConstraintSystem {
    /// Validates shapes and requires `A` to have full column rank.
    pub fn new(a: LinearMap, b: LinearMap, c: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.nrows() || c.len() != a.nrows() {
            return Err(Error::input(format!(
                "shape mismatch: A is {}x{}, B is {}x{}, c has {}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.len()
            )));
        }
        let (min, max) = gram_extreme_eigenvalues(&a)?;
        if !(min > RANK_TOLERANCE * max.max(1.0)) {
            return Err(Error::config(format!("A must have full column rank (λ_min(AᵀA) = {min:e})")));
        }
        Ok(ConstraintSystem { a, b, c, phi_min_a: min, norm_ata: max })
    }

    /// `B = -I`, `c = 0`.
    pub fn with_neg_identity(a: LinearMap) -> Result<Self> {
        let q = a.nrows();
        Self::new(a, LinearMap::neg_identity(q), DVector::zeros(q))
    }

    /// Primal dimension `d`.
    pub fn d(&self) -> usize {
        self.a.ncols()
    }

    /// Auxiliary dimension `p`.
    pub fn p(&self) -> usize {
        self.b.ncols()
    }

    /// Dual dimension `q`.
    pub fn q(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_b_neg_identity(&self) -> bool {
        self.b.is_neg_identity()
    }

    pub fn has_zero_offset(&self) -> bool {
        self.c.iter().all(|v| *v == 0.0)
    }

    /// `Ax + By − c`.
    pub fn residual(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.a.apply(x) + self.b.apply(y) - &self.c
    }
}

/// Graph-guided constraint with unit edge weights.
pub fn build_graph_guided_a(support: &DMatrix<bool>) -> Result<ConstraintSystem> {
    build_graph_guided_a_weighted(support, 1.0)
}

/// One row `w(e_i − e_j)` per edge `i < j` of the upper triangle of
/// `support`, followed by `I_d`; `B = −I`, `c = 0`.
///
/// The identity rows make `A` full column rank. Small `w` keeps `AᵀA` close
/// to the identity, which the parameter certificates need.
pub fn build_graph_guided_a_weighted(support: &DMatrix<bool>, edge_weight: f64) -> Result<ConstraintSystem> {
    if !support.is_square() {
        return Err(Error::input("support must be square"));
    }
    if !(edge_weight > 0.0) || !edge_weight.is_finite() {
        return Err(Error::config(format!("edge weight must be positive, got {edge_weight}")));
    }
    let d = support.nrows();
    let edges: Vec<(usize, usize)> =
        (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| support[(i, j)]).collect();
    if edges.is_empty() {
        return ConstraintSystem::with_neg_identity(LinearMap::identity(d));
    }
    let mut a = DMatrix::zeros(edges.len() + d, d);
    for (r, &(i, j)) in edges.iter().enumerate() {
        a[(r, i)] = edge_weight;
        a[(r, j)] = -edge_weight;
    }
    for i in 0..d {
        a[(edges.len() + i, i)] = 1.0;
    }
    ConstraintSystem::with_neg_identity(LinearMap::from_dense_auto(a))
}

/// `A = [I_d; …; I_d]` (`k` copies), `B = −I_{kd}`, `c = 0`.
pub fn build_overlap_a(d: usize, k: usize) -> Result<ConstraintSystem> {
    if k < 1 {
        return Err(Error::config("overlap needs at least one copy"));
    }
    if d < 1 {
        return Err(Error::input("dimension must be at least 1"));
    }
    let a = if k == 1 { LinearMap::identity(d) } else { LinearMap::StackedIdentity { dim: d, copies: k } };
    ConstraintSystem::with_neg_identity(a)
}

/// Multi-task split: `A = [I; I]` on `vec(X)` (`m·d` entries), and
/// `g(y) = ν1κ0‖y₁‖₁ + ν2‖mat(y₂)‖_*`.
pub fn build_multitask_constraints(
    m: usize,
    d: usize,
    nu1: f64,
    nu2: f64,
    kappa0: f64,
) -> Result<(ConstraintSystem, BlockSeparableRegularizer)> {
    if m < 1 || d < 1 {
        return Err(Error::input("classes and dimension must be at least 1"));
    }
    let md = m * d;
    let cs = build_overlap_a(md, 2)?;
    let g = BlockSeparableRegularizer::new(vec![
        Block { range: 0..md, kind: BlockKind::L1, weight: nu1 * kappa0 },
        Block { range: md..2 * md, kind: BlockKind::Nuclear { rows: m, cols: d }, weight: nu2 },
    ])?;
    Ok((cs, g))
}
