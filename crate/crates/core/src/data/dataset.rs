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

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (u, v) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += u[k] * v[k];
        }
    }
    let mut tail = 0.0;
    for (u, v) in ra.iter().zip(rb) {
        tail += u * v;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Sample-major feature matrix (one row per sample).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Features {
    /// Row-major `n x d` values.
    Dense { n: usize, d: usize, values: Vec<f64> },
    Sparse(CsrMatrix),
}

impl Features {
    pub fn dense(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::input(format!("expected {} values for {n}x{d}, got {}", n * d, values.len())));
        }
        Ok(Features::Dense { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::input("ragged feature rows"));
        }
        Self::dense(rows.len(), d, rows.concat())
    }

    pub fn n(&self) -> usize {
        match self {
            Features::Dense { n, .. } => *n,
            Features::Sparse(m) => m.nrows(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Features::Dense { d, .. } => *d,
            Features::Sparse(m) => m.ncols(),
        }
    }

    /// `a_iᵀ x` for `x` of length `d`.
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        match self {
            Features::Dense { d, values, .. } => {
                dot(&values[i * d..(i + 1) * d], &x[..*d])
            }
            Features::Sparse(m) => m.row_dot(i, x),
        }
    }

    /// `out += alpha * a_i`.
    #[inline]
    pub fn row_axpy(&self, i: usize, alpha: f64, out: &mut [f64]) {
        match self {
            Features::Dense { d, values, .. } => {
                let row = &values[i * d..(i + 1) * d];
                for (o, a) in out.iter_mut().zip(row) {
                    *o += alpha * a;
                }
            }
            Features::Sparse(m) => {
                for (c, v) in m.row(i) {
                    out[c] += alpha * v;
                }
            }
        }
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        match self {
            Features::Dense { d, values, .. } => values[i * d..(i + 1) * d].iter().map(|v| v * v).sum(),
            Features::Sparse(m) => m.row(i).map(|(_, v)| v * v).sum(),
        }
    }

    /// Nonzero `(column, value)` entries of a row.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, f64)> {
        match self {
            Features::Dense { d, values, .. } => values[i * d..(i + 1) * d]
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(c, v)| (c, *v))
                .collect(),
            Features::Sparse(m) => m.row(i).collect(),
        }
    }

    /// Rows `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Features {
        match self {
            Features::Dense { d, values, .. } => {
                let mut out = Vec::with_capacity(indices.len() * d);
                for &i in indices {
                    out.extend_from_slice(&values[i * d..(i + 1) * d]);
                }
                Features::Dense { n: indices.len(), d: *d, values: out }
            }
            Features::Sparse(m) => {
                let mut triplets = Vec::new();
                for (r, &i) in indices.iter().enumerate() {
                    triplets.extend(m.row(i).map(|(c, v)| (r, c, v)));
                }
                Features::Sparse(CsrMatrix::from_triplets(indices.len(), m.ncols(), &triplets).expect("in range"))
            }
        }
    }

    pub fn has_non_finite(&self) -> bool {
        match self {
            Features::Dense { values, .. } => values.iter().any(|v| !v.is_finite()),
            Features::Sparse(m) => (0..m.nrows()).any(|r| m.row(r).any(|(_, v)| !v.is_finite())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Labels {
    /// Values in {-1, +1}.
    Binary(Vec<f64>),
    /// Class indices in `[0, classes)`.
    Multiclass { classes: usize, labels: Vec<usize> },
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Binary(v) => v.len(),
            Labels::Multiclass { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn classes(&self) -> usize {
        match self {
            Labels::Binary(_) => 2,
            Labels::Multiclass { classes, .. } => *classes,
        }
    }

    pub fn select(&self, indices: &[usize]) -> Labels {
        match self {
            Labels::Binary(v) => Labels::Binary(indices.iter().map(|&i| v[i]).collect()),
            Labels::Multiclass { classes, labels } => Labels::Multiclass {
                classes: *classes,
                labels: indices.iter().map(|&i| labels[i]).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub name: String,
    pub n: usize,
    pub d: usize,
    pub classes: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Features,
    pub labels: Labels,
    pub meta: DatasetMeta,
}

impl Dataset {
    /// Validates label ranges and feature finiteness.
    pub fn new(name: impl Into<String>, source: impl Into<String>, features: Features, labels: Labels) -> Result<Self> {
        if features.n() != labels.len() {
            return Err(Error::input(format!("{} feature rows but {} labels", features.n(), labels.len())));
        }
        match &labels {
            Labels::Binary(v) => {
                if let Some(bad) = v.iter().find(|b| **b != 1.0 && **b != -1.0) {
                    return Err(Error::input(format!("binary label {bad} not in {{-1, +1}}")));
                }
            }
            Labels::Multiclass { classes, labels } => {
                if let Some(bad) = labels.iter().find(|c| **c >= *classes) {
                    return Err(Error::input(format!("class label {bad} outside [0, {classes})")));
                }
            }
        }
        if features.has_non_finite() {
            return Err(Error::input("non-finite feature value"));
        }
        let meta = DatasetMeta {
            name: name.into(),
            n: features.n(),
            d: features.d(),
            classes: labels.classes(),
            source: source.into(),
        };
        Ok(Dataset { features, labels, meta })
    }

    pub fn n(&self) -> usize {
        self.features.n()
    }

    pub fn d(&self) -> usize {
        self.features.d()
    }

    pub fn subset(&self, indices: &[usize], suffix: &str) -> Dataset {
        let features = self.features.select(indices);
        let labels = self.labels.select(indices);
        let meta = DatasetMeta {
            name: format!("{}{}", self.meta.name, suffix),
            n: indices.len(),
            d: features.d(),
            classes: self.meta.classes,
            source: self.meta.source.clone(),
        };
        Dataset { features, labels, meta }
    }
}
