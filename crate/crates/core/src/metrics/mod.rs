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


//! Stationarity residuals, Lyapunov sequences, variance checks and rates.

mod lyapunov;
mod rate;
mod stationarity;
mod variance;

pub use lyapunov::{lyapunov_psi, psi_value, table_spread, LyapunovKind, LyapunovTrace, LyapunovTracker};
pub use rate::{
    loglog_slope, plateau_summary, rate_summary, running_min, slope_between, theta_sequence, PlateauSummary, ProgressRecorder,
    RateSummary,
};
pub use stationarity::{l1_subgrad_dist_sq, stationarity, stationarity_after_step, StationarityReport};
pub use variance::{saga_variance, svrg_variance, variance_diagnostics, VarianceReport, ENUMERATION_LIMIT};
