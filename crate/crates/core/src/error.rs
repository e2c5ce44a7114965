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

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument to an operation (wrong dimension, index out of range, negative threshold).
    #[error("input error: {0}")]
    Input(String),

    /// Invalid configuration (parameter bounds, missing variant fields).
    #[error("config error: {0}")]
    Config(String),

    /// A numerical routine failed (SVD / eigensolve / factorization).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The closed-form y-update only handles `B = -I`.
    #[error("unsupported constraint system: {0}")]
    UnsupportedConstraint(String),

    /// Operation needs data the run did not keep (e.g. SAGA point table).
    #[error("capability error: {0}")]
    Capability(String),

    /// Iterates became non-finite or exploded.
    #[error("divergence at iteration {iteration}: {reason}")]
    Divergence { iteration: usize, reason: String },

    /// Broken internal bookkeeping (stale snapshot gradient, drifting SAGA mean).
    #[error("internal invariant violated: {0}")]
    Internal(String),

    /// No certified parameter pair was found.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
