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

//! Small linear-algebra layer: a linear map that is dense, CSR-sparse or a
//! scaled identity, plus extreme eigenvalues of its Gram matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matrices whose nonzero density is below this are stored sparse.
pub const SPARSE_DENSITY_THRESHOLD: f64 = 0.10;

/// Above this column count the Gram spectrum is found iteratively.
pub const DENSE_EIGEN_LIMIT: usize = 2000;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed, explicit zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= nrows || c >= ncols {
                return Err(Error::input(format!("triplet ({r}, {c}) outside {nrows}x{ncols}")));
            }
        }
        sorted.sort_by_key(|a| (a.0, a.1));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut m = CsrMatrix { nrows, ncols, row_ptr, col_idx, values };
        m.drop_zeros();
        Ok(m)
    }

    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let mut triplets = Vec::new();
        for r in 0..dense.nrows() {
            for c in 0..dense.ncols() {
                let v = dense[(r, c)];
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_triplets(dense.nrows(), dense.ncols(), &triplets).expect("indices in range")
    }

    fn drop_zeros(&mut self) {
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k] != 0.0 {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[r + 1] = col_idx.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of one row, in increasing column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, v) in self.row(r) {
            acc += v * x[c];
        }
        acc
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                out[(r, c)] = v;
            }
        }
        out
    }
}

/// A linear map `R^ncols -> R^nrows`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LinearMap {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
    /// `scale * I_dim`.
    ScaledIdentity { dim: usize, scale: f64 },
    /// `[I_dim; I_dim; ...]` with `copies` identity blocks.
    StackedIdentity { dim: usize, copies: usize },
}

impl LinearMap {
    pub fn identity(dim: usize) -> Self {
        LinearMap::ScaledIdentity { dim, scale: 1.0 }
    }

    pub fn neg_identity(dim: usize) -> Self {
        LinearMap::ScaledIdentity { dim, scale: -1.0 }
    }

    /// Stores `dense` sparse when its density is under [`SPARSE_DENSITY_THRESHOLD`].
    pub fn from_dense_auto(dense: DMatrix<f64>) -> Self {
        let total = dense.nrows() * dense.ncols();
        let nnz = dense.iter().filter(|v| **v != 0.0).count();
        if total > 0 && (nnz as f64) < SPARSE_DENSITY_THRESHOLD * total as f64 {
            LinearMap::Sparse(CsrMatrix::from_dense(&dense))
        } else {
            LinearMap::Dense(dense)
        }
    }

    pub fn nrows(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.nrows(),
            LinearMap::Sparse(m) => m.nrows(),
            LinearMap::ScaledIdentity { dim, .. } => *dim,
            LinearMap::StackedIdentity { dim, copies } => dim * copies,
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.ncols(),
            LinearMap::Sparse(m) => m.ncols(),
            LinearMap::ScaledIdentity { dim, .. } | LinearMap::StackedIdentity { dim, .. } => *dim,
        }
    }

    pub fn is_neg_identity(&self) -> bool {
        match self {
            LinearMap::ScaledIdentity { scale, .. } => *scale == -1.0,
            LinearMap::StackedIdentity { .. } => false,
            LinearMap::Dense(m) => {
                m.is_square() && m.iter().enumerate().all(|(k, v)| {
                    let (r, c) = (k % m.nrows(), k / m.nrows());
                    *v == if r == c { -1.0 } else { 0.0 }
                })
            }
            LinearMap::Sparse(m) => {
                m.nrows() == m.ncols()
                    && m.nnz() == m.nrows()
                    && (0..m.nrows()).all(|r| {
                        let mut it = m.row(r);
                        matches!(it.next(), Some((c, v)) if c == r && v == -1.0)
                    })
            }
        }
    }

    /// `self * x`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(x.len(), self.ncols());
        match self {
            LinearMap::Dense(m) => m * x,
            LinearMap::Sparse(m) => {
                let xs = x.as_slice();
                DVector::from_iterator(m.nrows(), (0..m.nrows()).map(|r| m.row_dot(r, xs)))
            }
            LinearMap::ScaledIdentity { scale, .. } => x * *scale,
            LinearMap::StackedIdentity { dim, copies } => {
                DVector::from_iterator(dim * copies, (0..*copies).flat_map(|_| x.iter().copied()))
            }
        }
    }

    /// `selfᵀ * v`.
    pub fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(v.len(), self.nrows());
        match self {
            LinearMap::Dense(m) => m.tr_mul(v),
            LinearMap::Sparse(m) => {
                let mut out = DVector::zeros(m.ncols());
                for r in 0..m.nrows() {
                    let vr = v[r];
                    if vr == 0.0 {
                        continue;
                    }
                    for (c, a) in m.row(r) {
                        out[c] += a * vr;
                    }
                }
                out
            }
            LinearMap::ScaledIdentity { scale, .. } => v * *scale,
            LinearMap::StackedIdentity { dim, copies } => {
                let mut out = DVector::zeros(*dim);
                for k in 0..*copies {
                    out += v.rows(k * dim, *dim);
                }
                out
            }
        }
    }

    /// `selfᵀ self x`.
    pub fn gram_apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.apply_transpose(&self.apply(x))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            LinearMap::Dense(m) => m.clone(),
            LinearMap::Sparse(m) => m.to_dense(),
            LinearMap::ScaledIdentity { dim, scale } => DMatrix::identity(*dim, *dim) * *scale,
            LinearMap::StackedIdentity { dim, copies } => {
                let mut m = DMatrix::zeros(dim * copies, *dim);
                for k in 0..*copies {
                    m.view_mut((k * dim, 0), (*dim, *dim)).fill_with_identity();
                }
                m
            }
        }
    }

    /// Dense `selfᵀ self`.
    pub fn gram_dense(&self) -> DMatrix<f64> {
        match self {
            LinearMap::Dense(m) => m.tr_mul(m),
            LinearMap::Sparse(m) => {
                let mut g = DMatrix::zeros(m.ncols(), m.ncols());
                for r in 0..m.nrows() {
                    let entries: Vec<(usize, f64)> = m.row(r).collect();
                    for &(i, vi) in &entries {
                        for &(j, vj) in &entries {
                            g[(i, j)] += vi * vj;
                        }
                    }
                }
                g
            }
            LinearMap::ScaledIdentity { dim, scale } => DMatrix::identity(*dim, *dim) * (scale * scale),
            LinearMap::StackedIdentity { dim, copies } => DMatrix::identity(*dim, *dim) * *copies as f64,
        }
    }

    /// Spectral norm of the map, `sqrt(λ_max(selfᵀ self))`.
    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(gram_extreme_eigenvalues(self)?.1.max(0.0).sqrt())
    }
}

/// `(λ_min, λ_max)` of `AᵀA`.
///
/// Dense symmetric eigensolve up to [`DENSE_EIGEN_LIMIT`] columns, otherwise
/// power iteration for the top and CG-backed inverse iteration for the bottom.
pub fn gram_extreme_eigenvalues(a: &LinearMap) -> Result<(f64, f64)> {
    if let LinearMap::ScaledIdentity { scale, .. } = a {
        let s = scale * scale;
        return Ok((s, s));
    }
    if let LinearMap::StackedIdentity { copies, .. } = a {
        let s = *copies as f64;
        return Ok((s, s));
    }
    let d = a.ncols();
    if d == 0 {
        return Err(Error::input("map with zero columns"));
    }
    if d <= DENSE_EIGEN_LIMIT {
        let eig = SymmetricEigen::try_new(a.gram_dense(), 1e-14, 10_000)
            .ok_or_else(|| Error::Numerical("symmetric eigensolve did not converge".into()))?;
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Ok((min, max));
    }
    let max = power_iteration(a, 1e-10, 100_000)?;
    let min = inverse_iteration(a, 1e-10, 10_000)?;
    Ok((min, max))
}

fn start_vector(d: usize) -> DVector<f64> {
    // Deterministic, not aligned with any coordinate axis.
    DVector::from_iterator(d, (0..d).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0)).normalize()
}

fn power_iteration(a: &LinearMap, tol: f64, max_iter: usize) -> Result<f64> {
    let mut v = start_vector(a.ncols());
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = a.gram_apply(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v = w / norm;
        if (next - lambda).abs() <= tol * next.abs().max(1.0) {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::Numerical("power iteration did not converge".into()))
}

fn inverse_iteration(a: &LinearMap, tol: f64, max_iter: usize) -> Result<f64> {
    let mut v = start_vector(a.ncols());
    let mut mu = f64::INFINITY;
    for _ in 0..max_iter {
        let w = conjugate_gradient(a, &v, 1e-13, 10 * a.ncols() + 100)?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numerical("inverse iteration broke down".into()));
        }
        v = w / norm;
        let next = v.dot(&a.gram_apply(&v));
        if (next - mu).abs() <= tol * next.abs().max(1e-300) {
            return Ok(next);
        }
        mu = next;
    }
    Err(Error::Numerical("inverse iteration did not converge".into()))
}

/// Solves `AᵀA x = b` by conjugate gradients.
fn conjugate_gradient(a: &LinearMap, b: &DVector<f64>, tol: f64, max_iter: usize) -> Result<DVector<f64>> {
    let mut x = DVector::zeros(b.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.dot(&r);
    let target = tol * tol * rs.max(1e-300);
    for _ in 0..max_iter {
        if rs <= target {
            return Ok(x);
        }
        let ap = a.gram_apply(&p);
        let denom = p.dot(&ap);
        if denom <= 0.0 {
            return Err(Error::Numerical("AᵀA is singular".into()));
        }
        let alpha = rs / denom;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rs_next = r.dot(&r);
        p = &r + &p * (rs_next / rs);
        rs = rs_next;
    }
    Ok(x)
}

/// Squared Euclidean norm.
pub fn norm_sq(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x * x).sum()
}
