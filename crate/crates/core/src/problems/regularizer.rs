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

//! Block-separable convex regularizers and their proximal maps.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `argmin_y t‖y‖₁ + ½‖y − v‖²`, i.e. coordinatewise soft thresholding.
pub fn prox_l1(v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    if !(t >= 0.0) {
        return Err(Error::input(format!("threshold must be nonnegative, got {t}")));
    }
    Ok(v.map(|x| soft(x, t)))
}

#[inline]
fn soft(x: f64, t: f64) -> f64 {
    let a = x.abs() - t;
    if a > 0.0 {
        a.copysign(x)
    } else {
        0.0
    }
}

/// `argmin_Y t‖Y‖_* + ½‖Y − V‖²_F` by singular-value soft thresholding.
pub fn prox_nuclear(v: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0) {
        return Err(Error::input(format!("threshold must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(v.clone());
    }
    if v.is_empty() {
        return Ok(v.clone());
    }
    let svd = v
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Numerical("SVD returned no singular vectors".into())),
    };
    let shrunk = svd.singular_values.map(|s| (s - t).max(0.0));
    let mut out = DMatrix::zeros(v.nrows(), v.ncols());
    for (k, s) in shrunk.iter().enumerate() {
        if *s > 0.0 {
            out += (u.column(k) * vt.row(k)) * *s;
        }
    }
    Ok(out)
}

/// Sum of singular values.
pub fn nuclear_norm(v: &DMatrix<f64>) -> Result<f64> {
    if v.is_empty() {
        return Ok(0.0);
    }
    v.clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .map(|s| s.singular_values.sum())
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlockKind {
    L1,
    /// Block holds a `rows x cols` matrix in row-major order.
    Nuclear { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub range: Range<usize>,
    pub kind: BlockKind,
    pub weight: f64,
}

impl Block {
    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }
}

/// Row-major view of a slice as a matrix.
pub(crate) fn block_matrix(values: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, values)
}

fn write_row_major(m: &DMatrix<f64>, out: &mut [f64]) {
    let cols = m.ncols();
    for r in 0..m.nrows() {
        for c in 0..cols {
            out[r * cols + c] = m[(r, c)];
        }
    }
}

/// `g(y) = Σ_b w_b g_b(y_b)` over contiguous blocks partitioning `[0, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSeparableRegularizer {
    blocks: Vec<Block>,
    dim: usize,
}

impl BlockSeparableRegularizer {
    /// Blocks must be listed in order and cover `[0, p)` without gaps.
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let mut next = 0;
        for b in &blocks {
            if b.range.start != next || b.range.end < b.range.start {
                return Err(Error::config("regularizer blocks must partition [0, p) in order"));
            }
            if !(b.weight >= 0.0) || !b.weight.is_finite() {
                return Err(Error::config(format!("block weight must be finite and nonnegative, got {}", b.weight)));
            }
            if let BlockKind::Nuclear { rows, cols } = b.kind {
                if rows * cols != b.len() {
                    return Err(Error::config(format!("nuclear block {rows}x{cols} does not match length {}", b.len())));
                }
            }
            next = b.range.end;
        }
        Ok(BlockSeparableRegularizer { blocks, dim: next })
    }

    /// `ν‖y‖₁` on all of `[0, p)`.
    pub fn l1(p: usize, weight: f64) -> Result<Self> {
        Self::new(vec![Block { range: 0..p, kind: BlockKind::L1, weight }])
    }

    /// `g ≡ 0` on `[0, p)`.
    pub fn zero(p: usize) -> Self {
        Self::l1(p, 0.0).expect("zero weight is valid")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::input(format!("regularizer expects dimension {}, got {}", self.dim, y.len())));
        }
        Ok(())
    }

    pub fn block_value(&self, block: &Block, y: &DVector<f64>) -> Result<f64> {
        let ys = &y.as_slice()[block.range.clone()];
        if block.weight == 0.0 {
            return Ok(0.0);
        }
        Ok(block.weight
            * match block.kind {
                BlockKind::L1 => ys.iter().map(|v| v.abs()).sum::<f64>(),
                BlockKind::Nuclear { rows, cols } => nuclear_norm(&block_matrix(ys, rows, cols))?,
            })
    }

    pub fn value(&self, y: &DVector<f64>) -> Result<f64> {
        self.check(y)?;
        let mut acc = 0.0;
        for b in &self.blocks {
            acc += self.block_value(b, y)?;
        }
        Ok(acc)
    }

    /// `argmin_y step·g(y) + ½‖y − v‖²`, block by block.
    pub fn prox(&self, v: &DVector<f64>, step: f64) -> Result<DVector<f64>> {
        self.check(v)?;
        if !(step >= 0.0) {
            return Err(Error::input(format!("prox step must be nonnegative, got {step}")));
        }
        let mut out = v.clone();
        for b in &self.blocks {
            let t = step * b.weight;
            if t == 0.0 {
                continue;
            }
            let slice = &mut out.as_mut_slice()[b.range.clone()];
            match b.kind {
                BlockKind::L1 => slice.iter_mut().for_each(|x| *x = soft(*x, t)),
                BlockKind::Nuclear { rows, cols } => {
                    let m = prox_nuclear(&block_matrix(slice, rows, cols), t)?;
                    write_row_major(&m, slice);
                }
            }
        }
        Ok(out)
    }
}
