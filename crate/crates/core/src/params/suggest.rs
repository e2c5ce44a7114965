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


//! Certified parameter selection.

use serde::{Deserialize, Serialize};

use super::theory::{rho_star, saga_feasible, stoc_feasible, svrg_feasible, StocCertificate, VrCertificate};
use super::lipschitz::estimate_lipschitz;
use crate::error::{Error, Result};
use crate::problems::CompositeProblem;
use crate::solvers::{SolverConfig, Variant};

/// Default free parameter `β` of the SVRG/SAGA recursions.
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Stoc(StocCertificate),
    Vr(VrCertificate),
}

impl Certificate {
    pub fn accepted(&self) -> bool {
        match self {
            Certificate::Stoc(c) => c.accepted,
            Certificate::Vr(c) => c.accepted,
        }
    }

    /// `γ`, or the smallest `Γ_t`.
    pub fn gamma_min(&self) -> f64 {
        match self {
            Certificate::Stoc(c) => c.gamma,
            Certificate::Vr(c) => c.gamma_min,
        }
    }

    pub fn constants(&self) -> &super::TheoryConstants {
        match self {
            Certificate::Stoc(c) => &c.constants,
            Certificate::Vr(c) => &c.constants,
        }
    }
}

/// Evaluates the certificate matching `config.variant` with Lipschitz constant `l`.
pub fn certify(problem: &CompositeProblem, config: &SolverConfig, l: f64, beta: f64) -> Result<Certificate> {
    let p = config.validate(problem)?;
    let cs = &problem.constraints;
    Ok(match config.variant {
        Variant::Dete | Variant::Stoc => Certificate::Stoc(stoc_feasible(l, cs, config.eta, config.rho, p.r)?),
        Variant::Svrg => Certificate::Vr(svrg_feasible(l, cs, config.eta, config.rho, p.r, p.epoch_len, p.batch_size, beta)?),
        Variant::Saga => Certificate::Vr(saga_feasible(
            l,
            cs,
            config.eta,
            config.rho,
            p.r,
            config.iterations.max(1),
            problem.n(),
            p.batch_size,
            beta,
        )?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestOptions {
    pub beta: f64,
    /// Overrides [`estimate_lipschitz`].
    pub lipschitz: Option<f64>,
    /// `r = ηρ‖AᵀA‖ + r_margin`; 1 is the smallest admissible margin.
    pub r_margin: f64,
}

impl Default for SuggestOptions {
    fn default() -> Self {
        SuggestOptions { beta: DEFAULT_BETA, lipschitz: None, r_margin: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub config: SolverConfig,
    pub lipschitz: f64,
    pub certificate: Certificate,
}

/// One evaluated grid point, kept for the infeasibility report.
#[derive(Debug, Clone, Serialize)]
struct GridPoint {
    eta: f64,
    rho: f64,
    gamma_min: f64,
    in_interval: bool,
}

fn eta_grid() -> impl Iterator<Item = f64> {
    (-24..=24).map(|k| 10f64.powf(k as f64 / 6.0))
}

/// `ρ/ρ*` candidates in increasing order.
fn rho_factors() -> impl Iterator<Item = f64> {
    [1.1, 1.25, 1.5].into_iter().chain((1..=30).map(|k| 2f64.powi(k)))
}

/// Picks `(η, ρ, r)` that pass the certificate for `template.variant`,
/// keeping its `M`, `m`, `T` and seed.
///
/// The effective step `η/r` is capped by `1/(ρ‖AᵀA‖)`, so the search walks
/// `ρ` upward from just above `ρ*` and stops at the first `ρ` admitting a
/// certified `η`, taking the largest such `η` on a log grid. Errors with the
/// evaluated grid when no pair is certified.
pub fn suggest_params(problem: &CompositeProblem, template: &SolverConfig, options: &SuggestOptions) -> Result<Suggestion> {
    let l = options.lipschitz.unwrap_or_else(|| estimate_lipschitz(&problem.loss));
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::config(format!("Lipschitz constant must be positive, got {l}")));
    }
    if !(options.r_margin >= 1.0) {
        return Err(Error::config("r margin must be at least 1"));
    }
    let cs = &problem.constraints;
    let base = rho_star(l, l + 1.0, cs.phi_min_a);

    let mut grid = Vec::new();
    let mut best: Option<(SolverConfig, Certificate)> = None;
    'rho: for factor in rho_factors() {
        let rho = base * factor;
        for eta in eta_grid() {
            let mut cfg = template.clone();
            cfg.eta = eta;
            cfg.rho = rho;
            cfg.r = Some(eta * rho * cs.norm_ata + options.r_margin);
            let cert = certify(problem, &cfg, l, options.beta)?;
            let in_interval = match &cert {
                Certificate::Stoc(c) => c.interval.contains,
                Certificate::Vr(c) => c.interval.contains,
            };
            grid.push(GridPoint { eta, rho, gamma_min: cert.gamma_min(), in_interval });
            if cert.accepted() {
                best = Some((cfg, cert));
            }
        }
        if best.is_some() {
            break 'rho;
        }
    }
    match best {
        Some((config, certificate)) => Ok(Suggestion { config, lipschitz: l, certificate }),
        None => {
            let report = serde_json::json!({
                "variant": template.variant,
                "lipschitz": l,
                "rho_star": base,
                "phi_min_a": cs.phi_min_a,
                "norm_ata": cs.norm_ata,
                "grid": grid,
            });
            Err(Error::Infeasible(format!("no certified (η, ρ) on the grid: {report}")))
        }
    }
}
