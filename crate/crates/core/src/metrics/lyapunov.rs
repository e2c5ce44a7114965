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


//! Single-run Lyapunov values `Ψ̂`, `Φ̂`, `Θ̂`.
//!
//! All three are `L_ρ(x_t, y_t, λ_t) + (ζ/ρ)‖x_t − x_{t−1}‖²` plus a
//! variance-memory term: `h_t(‖x_t − x̃‖² + ‖x_{t−1} − x̃‖²)` for SVRG and
//! `(α_t/n) Σ_i (‖x_t − z_i^t‖² + ‖x_{t−1} − z_i^{t−1}‖²)` for SAGA.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{RecursionSchedule, ScheduleKind, TheoryConstants};
use crate::problems::CompositeProblem;
use crate::solvers::{Iterate, Observer, SagaMemory, SolverState, StepView, TraceRecord, VariantMemory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LyapunovKind {
    Psi,
    Phi,
    Theta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovTrace {
    pub kind: LyapunovKind,
    /// Index 0 is the initial point.
    pub values: Vec<f64>,
}

/// `Ψ̂ = L_ρ(x, y, λ) + (ζ/ρ)‖x − x_prev‖²`.
pub fn psi_value(
    problem: &CompositeProblem,
    x: &DVector<f64>,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    x_prev: &DVector<f64>,
    constants: &TheoryConstants,
) -> Result<f64> {
    let rho = constants.rho;
    Ok(problem.augmented_lagrangian(x, y, lambda, rho)? + constants.zeta / rho * (x - x_prev).norm_squared())
}

/// `Ψ̂_t` along stored iterates, with `x_{−1} = x_0`.
pub fn lyapunov_psi(problem: &CompositeProblem, iterates: &[Iterate], constants: &TheoryConstants) -> Result<LyapunovTrace> {
    let mut values = Vec::with_capacity(iterates.len());
    for (k, it) in iterates.iter().enumerate() {
        let prev = if k == 0 { &it.x } else { &iterates[k - 1].x };
        values.push(psi_value(problem, &it.x, &it.y, &it.lambda, prev, constants)?);
    }
    Ok(LyapunovTrace { kind: LyapunovKind::Psi, values })
}

/// `(1/n) Σ_i ‖x − z_i‖²`.
pub fn table_spread(memory: &SagaMemory, x: &DVector<f64>) -> Result<f64> {
    if memory.point_table.is_none() {
        return Err(Error::Capability("SAGA run did not keep its points (store_saga_points = false)".into()));
    }
    let mut acc = 0.0;
    for i in 0..memory.n {
        let z = memory.point_row(i).expect("points stored");
        acc += z.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    Ok(acc / memory.n as f64)
}

/// Observer that evaluates the variant's Lyapunov value after every step
/// and writes it into each trace record.
pub struct LyapunovTracker<'a> {
    problem: &'a CompositeProblem,
    constants: TheoryConstants,
    schedule: Option<RecursionSchedule>,
    kind: LyapunovKind,
    prev_spread: f64,
    pub trace: LyapunovTrace,
}

impl<'a> LyapunovTracker<'a> {
    /// `schedule` must be the SVRG `h` or SAGA `α` schedule for those variants.
    pub fn new(
        problem: &'a CompositeProblem,
        state: &SolverState,
        constants: TheoryConstants,
        schedule: Option<RecursionSchedule>,
    ) -> Result<Self> {
        let kind = match (&state.memory, schedule.as_ref().map(|s| s.kind)) {
            (VariantMemory::None, _) => LyapunovKind::Psi,
            (VariantMemory::Svrg(_), Some(ScheduleKind::SvrgH)) => LyapunovKind::Phi,
            (VariantMemory::Saga(m), Some(ScheduleKind::SagaAlpha)) => {
                if m.point_table.is_none() {
                    return Err(Error::Capability("Θ needs store_saga_points = true".into()));
                }
                LyapunovKind::Theta
            }
            _ => return Err(Error::config("variance-reduced Lyapunov sequence needs its matching schedule")),
        };
        let mut tracker = LyapunovTracker {
            problem,
            constants,
            schedule,
            kind,
            prev_spread: 0.0,
            trace: LyapunovTrace { kind, values: Vec::new() },
        };
        let v0 = psi_value(problem, &state.x, &state.y, &state.lambda, &state.x_prev, &tracker.constants)?;
        if let VariantMemory::Saga(m) = &state.memory {
            tracker.prev_spread = table_spread(m, &state.x)?;
        }
        tracker.trace.values.push(v0);
        Ok(tracker)
    }

    pub fn kind(&self) -> LyapunovKind {
        self.kind
    }

    pub fn last(&self) -> Option<f64> {
        self.trace.values.last().copied()
    }
}

impl Observer for LyapunovTracker<'_> {
    fn on_step(&mut self, step: &StepView<'_>, memory: &VariantMemory) -> Result<()> {
        let base = psi_value(self.problem, step.x, step.y, step.lambda, step.x_prev, &self.constants)?;
        let extra = match (memory, &self.schedule) {
            (VariantMemory::Svrg(m), Some(h)) => {
                let ht = h.at(m.inner);
                ht * ((step.x - &m.snapshot).norm_squared() + (step.x_prev - &m.snapshot).norm_squared())
            }
            (VariantMemory::Saga(m), Some(alpha)) => {
                let now = table_spread(m, step.x)?;
                let value = alpha.at(step.t) * (now + self.prev_spread);
                self.prev_spread = now;
                value
            }
            _ => 0.0,
        };
        self.trace.values.push(base + extra);
        Ok(())
    }

    fn on_record(&mut self, record: &mut TraceRecord, _state: &SolverState) -> Result<()> {
        record.lyapunov = self.last();
        Ok(())
    }
}
