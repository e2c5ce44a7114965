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


//! Nonconvex nonsmooth ADMM with mini-batch stochastic gradients.
//!
//! Solves `min f(x) + g(y)  s.t.  Ax + By = c` where `f = (1/n) Σ f_i` is
//! smooth (possibly nonconvex) and `g` is block-separable with a cheap prox.
//! Four gradient oracles share one linearized x-update:
//!
//! * [`Variant::Dete`]: full gradient every step;
//! * [`Variant::Stoc`]: plain mini-batch gradient;
//! * [`Variant::Svrg`]: mini-batch gradient corrected by a periodic snapshot;
//! * [`Variant::Saga`]: mini-batch gradient corrected by a per-sample table.
//!
//! [`params`] certifies `(η, ρ, r)` choices against the convergence theory,
//! [`metrics`] computes stationarity residuals and Lyapunov sequences, and
//! [`experiment`] runs reproducible benchmark grids to CSV/JSON.

pub mod data;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod params;
pub mod problems;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use problems::CompositeProblem;
pub use solvers::{run, SolverConfig, SolverState, TraceRecord, Variant};
