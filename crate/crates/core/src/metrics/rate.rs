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


//! Progress measure `θ_t = ‖x_{t+1} − x_t‖² + ‖x_t − x_{t−1}‖²` and its
//! empirical decay rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::{Observer, StepView, VariantMemory};

/// Collects `‖x_{t+1} − x_t‖²` at every step.
#[derive(Debug, Default, Clone)]
pub struct ProgressRecorder {
    pub step_sq: Vec<f64>,
}

impl Observer for ProgressRecorder {
    fn on_step(&mut self, step: &StepView<'_>, _memory: &VariantMemory) -> Result<()> {
        self.step_sq.push((step.x - step.x_prev).norm_squared());
        Ok(())
    }
}

/// `θ_t` for `t = 0..T−1` from step lengths, with `x_{−1} = x_0`.
pub fn theta_sequence(step_sq: &[f64]) -> Vec<f64> {
    step_sq.iter().enumerate().map(|(t, d)| d + if t == 0 { 0.0 } else { step_sq[t - 1] }).collect()
}

/// Prefix minima: entry `k` is `min_{t ≤ k} v_t`.
pub fn running_min(v: &[f64]) -> Vec<f64> {
    let mut best = f64::INFINITY;
    v.iter()
        .map(|x| {
            best = best.min(*x);
            best
        })
        .collect()
}

/// Least-squares slope of `log v` against `log t` over positive entries;
/// `None` with fewer than two usable points.
pub fn loglog_slope(ts: &[f64], vs: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        ts.iter().zip(vs).filter(|(t, v)| **t > 0.0 && **v > 0.0 && v.is_finite()).map(|(t, v)| (t.ln(), v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Slope of `log v_{T−1}` vs `log T` for `T ∈ [lo, hi]` (1-based, clamped to
/// the data), sampled at up to 64 log-spaced points.
pub fn slope_between(by_t: &[f64], lo: usize, hi: usize) -> Option<f64> {
    let hi = hi.min(by_t.len());
    let lo = lo.max(1);
    if lo >= hi {
        return None;
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let samples = 64;
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    let mut last = 0;
    for k in 0..=samples {
        let t = ((a + (b - a) * k as f64 / samples as f64).exp().round() as usize).clamp(lo, hi);
        if t != last {
            last = t;
            ts.push(t as f64);
            vs.push(by_t[t - 1]);
        }
    }
    loglog_slope(&ts, &vs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    /// Entry `T − 1` is `min_{1 ≤ t < T} θ_t` (`θ_0` alone when `T = 1`),
    /// so the startup convention `x_{−1} = x_0` never sets the minimum.
    pub min_theta_by_t: Vec<f64>,
    /// Slope of `log min θ` vs `log T` over the tail half `T ∈ [T_max/2, T_max]`.
    pub slope_estimate: Option<f64>,
    /// No measurable progress to fit (all `θ` zero).
    pub flat: bool,
}

/// Summarizes per-step squared step lengths (see [`ProgressRecorder`]).
pub fn rate_summary(step_sq: &[f64]) -> Result<RateSummary> {
    if step_sq.len() < 4 {
        return Err(Error::input("rate summary needs at least 4 steps"));
    }
    let theta = theta_sequence(step_sq);
    let mut min_theta_by_t = vec![theta[0]];
    min_theta_by_t.extend(running_min(&theta[1..]));
    let t_max = min_theta_by_t.len();
    let flat = min_theta_by_t.iter().all(|v| *v == 0.0);
    let slope_estimate = if flat { None } else { slope_between(&min_theta_by_t, t_max / 2, t_max) };
    Ok(RateSummary { min_theta_by_t, slope_estimate, flat })
}

/// Where a noisy run stops improving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauSummary {
    /// Median `θ_t` over the second half of the run.
    pub level: f64,
    /// First `T > 1` with `min θ_T ≤ 10·level`, i.e. where the floor starts to
    /// dominate; `None` if the run starts that close to its floor.
    pub onset: Option<usize>,
    /// Slope of `min θ_T` over the tail half `[onset/2, onset]` of the descent.
    pub slope_to_plateau: Option<f64>,
}

const PLATEAU_FACTOR: f64 = 10.0;

pub fn plateau_summary(step_sq: &[f64]) -> Result<PlateauSummary> {
    let rate = rate_summary(step_sq)?;
    let theta = theta_sequence(step_sq);
    let mut tail: Vec<f64> = theta[theta.len() / 2..].to_vec();
    tail.sort_by(f64::total_cmp);
    let level = tail[tail.len() / 2];
    let onset = match rate.min_theta_by_t.iter().position(|v| *v <= PLATEAU_FACTOR * level) {
        Some(k) if k >= 1 => Some(k + 1),
        _ => None,
    };
    let slope_to_plateau = onset.and_then(|t| slope_between(&rate.min_theta_by_t, t / 2, t));
    Ok(PlateauSummary { level, onset, slope_to_plateau })
}
