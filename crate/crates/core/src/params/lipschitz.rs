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


//! Gradient Lipschitz constants of the implemented losses.

use std::sync::OnceLock;

use crate::problems::{loss::logistic, SmoothLoss};

/// `|d²/du² (1 + e^u)^{-1}| = s(1−s)|1−2s|` with `s` the logistic of `u`.
fn sigmoid_curvature_at(u: f64) -> f64 {
    let s = logistic(u);
    s * (1.0 - s) * (1.0 - 2.0 * s).abs()
}

/// `sup_u |d²/du² (1 + e^u)^{-1}|` by a dense scan of `[-20, 20]` refined
/// with golden-section search; about `0.0962`.
pub fn sigmoid_curvature() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        const STEPS: usize = 200_000;
        let (lo, hi) = (-20.0, 20.0);
        let h = (hi - lo) / STEPS as f64;
        let mut best = (lo, sigmoid_curvature_at(lo));
        for k in 1..=STEPS {
            let u = lo + k as f64 * h;
            let v = sigmoid_curvature_at(u);
            if v > best.1 {
                best = (u, v);
            }
        }
        let (mut a, mut b) = (best.0 - h, best.0 + h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if sigmoid_curvature_at(c) > sigmoid_curvature_at(d) {
                b = d;
            } else {
                a = c;
            }
        }
        sigmoid_curvature_at(0.5 * (a + b)).max(best.1)
    })
}

/// Upper bound on the Lipschitz constant of every `∇f_i`.
///
/// Sigmoid: `C_sig · max_i ‖a_i‖²`. Multinomial: `½ max_i ‖a_i‖²` plus the
/// log-sum curvature `ν1 β / θ²`.
pub fn estimate_lipschitz(loss: &SmoothLoss) -> f64 {
    let features = loss.features();
    let max_sq = (0..features.n()).map(|i| features.row_norm_sq(i)).fold(0.0, f64::max);
    match loss {
        SmoothLoss::Sigmoid(_) => sigmoid_curvature() * max_sq,
        SmoothLoss::SmoothedMultiTask(l) => 0.5 * max_sq + l.nu1 * l.beta / (l.theta * l.theta),
    }
}
