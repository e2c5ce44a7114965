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


//! Theory-driven parameter certification and selection.

pub mod ext_f64;
mod lipschitz;
mod suggest;
mod theory;

pub use lipschitz::{estimate_lipschitz, sigmoid_curvature};
pub use suggest::{certify, suggest_params, Certificate, SuggestOptions, Suggestion, DEFAULT_BETA};
pub use theory::{
    rho_star, saga_feasible, saga_schedule, stoc_feasible, svrg_feasible, svrg_schedule, Interval, RecursionSchedule, RhoCase,
    ScheduleKind, StocCertificate, TheoryConstants, VrCertificate,
};
