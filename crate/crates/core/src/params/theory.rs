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


//! Theory constants and the `(η, ρ)` feasibility certificates for each
//! variant.
//!
//! Notation: `a = φ_min^A`, `h = φ_min^H`, `Φ = φ_max^H`, `L̃ = L + 1`.
//! The variance-reduced variants replace `L̃` by `L̃ + 2ĥ` (SVRG) or
//! `L̃ + 2α̂` (SAGA) in the interval formulas.

use serde::{Deserialize, Serialize};

use super::ext_f64;
use crate::error::{Error, Result};
use crate::problems::ConstraintSystem;

/// Relative tolerance used to decide `ρ = ρ*`.
const RHO_STAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub l: f64,
    pub l_tilde: f64,
    pub phi_min_a: f64,
    pub norm_ata: f64,
    pub eta: f64,
    pub rho: f64,
    pub r: f64,
    /// `r − ρηφ_min^A`, the largest eigenvalue of `H = rI − ρηAᵀA`.
    pub phi_max_h: f64,
    /// `r − ρη‖AᵀA‖`, the smallest eigenvalue of `H`.
    pub phi_min_h: f64,
    /// `5(L²η² + Φ²)/(aη²)`.
    pub zeta: f64,
    /// `5Φ²/(aη²)`.
    pub zeta1: f64,
    /// `h² + 20Φ²`.
    pub phi_h: f64,
    /// `(L̃ + √(40L² + L̃²))/(2a)`.
    pub rho_star: f64,
    /// `10Φ(L̃Φ + √(L̃²Φ² + 2L²φ^H))/(aφ^H)`.
    #[serde(with = "ext_f64")]
    pub rho_0: f64,
    /// `h² + (20Φ²/(ρa))(aρ − L̃ − 10L²/(ρa))`.
    #[serde(with = "ext_f64")]
    pub delta: f64,
    /// `L̃ + 10L²/(ρa) − aρ`.
    #[serde(with = "ext_f64")]
    pub varphi: f64,
    /// `h/η + aρ/2 − L̃/2 − 5(L²η² + 2Φ²)/(ρaη²)`.
    #[serde(with = "ext_f64")]
    pub gamma: f64,
}

impl TheoryConstants {
    pub fn new(l: f64, cs: &ConstraintSystem, eta: f64, rho: f64, r: f64) -> Result<Self> {
        Self::from_spectrum(l, cs.phi_min_a, cs.norm_ata, eta, rho, r)
    }

    pub fn from_spectrum(l: f64, phi_min_a: f64, norm_ata: f64, eta: f64, rho: f64, r: f64) -> Result<Self> {
        if !(l >= 0.0 && l.is_finite()) {
            return Err(Error::config(format!("Lipschitz constant must be finite and nonnegative, got {l}")));
        }
        if !(eta > 0.0 && rho > 0.0 && r > 0.0) {
            return Err(Error::config("η, ρ and r must be positive"));
        }
        if !(phi_min_a > 0.0 && norm_ata >= phi_min_a) {
            return Err(Error::config("need ‖AᵀA‖ ≥ φ_min^A > 0"));
        }
        let a = phi_min_a;
        let phi_max_h = r - rho * eta * a;
        let phi_min_h = r - rho * eta * norm_ata;
        let zeta = 5.0 * (l * l * eta * eta + phi_max_h * phi_max_h) / (a * eta * eta);
        let zeta1 = 5.0 * phi_max_h * phi_max_h / (a * eta * eta);
        let phi_h = phi_min_h * phi_min_h + 20.0 * phi_max_h * phi_max_h;
        let l_tilde = l + 1.0;
        let iv = Interval::evaluate(l, l_tilde, a, norm_ata, eta, rho, r, phi_min_h, phi_max_h, phi_h);
        let gamma = phi_min_h / eta + a * rho / 2.0 - l_tilde / 2.0 - (zeta + zeta1) / rho;
        Ok(TheoryConstants {
            l,
            l_tilde,
            phi_min_a,
            norm_ata,
            eta,
            rho,
            r,
            phi_max_h,
            phi_min_h,
            zeta,
            zeta1,
            phi_h,
            rho_star: iv.rho_star,
            rho_0: iv.rho_0,
            delta: iv.delta,
            varphi: iv.varphi,
            gamma,
        })
    }

    /// The interval analysis with `L̃` shifted by `2·shift`.
    pub fn interval(&self, shift: f64) -> Interval {
        Interval::evaluate(
            self.l,
            self.l_tilde + 2.0 * shift,
            self.phi_min_a,
            self.norm_ata,
            self.eta,
            self.rho,
            self.r,
            self.phi_min_h,
            self.phi_max_h,
            self.phi_h,
        )
    }
}

/// `ρ* = (L̃ + √(40L² + L̃²))/(2a)`, the positive root of `aρ² − L̃ρ − 10L²/a`.
pub fn rho_star(l: f64, l_tilde: f64, phi_min_a: f64) -> f64 {
    (l_tilde + (40.0 * l * l + l_tilde * l_tilde).sqrt()) / (2.0 * phi_min_a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoCase {
    /// `ρ < ρ*`: needs `ρ > ρ₀` and `η` between the two roots.
    BelowStar,
    /// `ρ = ρ*`.
    AtStar,
    /// `ρ > ρ*`: `η` above the smaller root.
    AboveStar,
}

/// Which `η` range the theory allows at this `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub case: RhoCase,
    /// The (possibly shifted) `L̃`.
    pub l_tilde: f64,
    pub rho_star: f64,
    #[serde(with = "ext_f64")]
    pub rho_0: f64,
    #[serde(with = "ext_f64")]
    pub delta: f64,
    pub varphi: f64,
    /// Open lower end for `η`.
    #[serde(with = "ext_f64")]
    pub eta_lower: f64,
    /// Upper end for `η` (open in the first case, closed otherwise).
    #[serde(with = "ext_f64")]
    pub eta_upper: f64,
    /// Whether `(η, ρ)` lies in the allowed set.
    pub contains: bool,
}

impl Interval {
    #[allow(clippy::too_many_arguments)]
    fn evaluate(
        l: f64,
        l_tilde: f64,
        a: f64,
        norm_ata: f64,
        eta: f64,
        rho: f64,
        r: f64,
        h: f64,
        big_phi: f64,
        phi_h: f64,
    ) -> Interval {
        let rs = rho_star(l, l_tilde, a);
        let rho_0 = if l_tilde.is_finite() {
            10.0 * big_phi * (l_tilde * big_phi + (l_tilde * l_tilde * big_phi * big_phi + 2.0 * l * l * phi_h).sqrt()) / (a * phi_h)
        } else {
            f64::INFINITY
        };
        let varphi = l_tilde + 10.0 * l * l / (rho * a) - a * rho;
        let delta = h * h - 20.0 * big_phi * big_phi / (rho * a) * varphi;
        let r_cap = (r - 1.0) / (rho * norm_ata);
        let case = if ((rho - rs) / rs).abs() <= RHO_STAR_TOL {
            RhoCase::AtStar
        } else if rho < rs {
            RhoCase::BelowStar
        } else {
            RhoCase::AboveStar
        };
        let (eta_lower, eta_upper, contains) = match case {
            RhoCase::BelowStar => {
                if delta < 0.0 || !delta.is_finite() || !(varphi > 0.0) {
                    (f64::NAN, f64::NAN, false)
                } else {
                    let sq = delta.sqrt();
                    let lo = (h - sq) / varphi;
                    let hi = (h + sq) / varphi;
                    (lo, hi, rho > rho_0 && eta > lo && eta < hi)
                }
            }
            RhoCase::AtStar => {
                let lo = 10.0 * big_phi * big_phi / (rho * a * h);
                (lo, r_cap, eta > lo && eta <= r_cap * (1.0 + 1e-12))
            }
            RhoCase::AboveStar => {
                if !delta.is_finite() {
                    (f64::NAN, r_cap, false)
                } else {
                    let lo = (h - delta.sqrt()) / varphi;
                    (lo, r_cap, eta > lo && eta <= r_cap * (1.0 + 1e-12))
                }
            }
        };
        Interval { case, l_tilde, rho_star: rs, rho_0, delta, varphi, eta_lower, eta_upper, contains }
    }
}

/// Plain mini-batch (and deterministic) certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StocCertificate {
    pub constants: TheoryConstants,
    pub interval: Interval,
    pub gamma: f64,
    pub accepted: bool,
}

pub fn stoc_feasible(l: f64, cs: &ConstraintSystem, eta: f64, rho: f64, r: f64) -> Result<StocCertificate> {
    let constants = TheoryConstants::new(l, cs, eta, rho, r)?;
    Ok(stoc_from_constants(constants))
}

pub(crate) fn stoc_from_constants(constants: TheoryConstants) -> StocCertificate {
    let interval = constants.interval(0.0);
    let gamma = constants.gamma;
    StocCertificate { constants, interval, gamma, accepted: interval.contains && gamma > 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    SvrgH,
    SagaAlpha,
}

/// `h_1..h_m` or `α_1..α_T` (index 0 holds `t = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionSchedule {
    pub kind: ScheduleKind,
    #[serde(with = "ext_f64::vec")]
    pub values: Vec<f64>,
    pub beta: f64,
    /// `ĥ` or `α̂`.
    #[serde(with = "ext_f64")]
    pub hat: f64,
}

impl RecursionSchedule {
    /// Value at 1-based `t`; `α_{T+1} = 0` past the end of a SAGA schedule.
    pub fn at(&self, t: usize) -> f64 {
        match self.kind {
            ScheduleKind::SagaAlpha if t > self.values.len() => 0.0,
            _ => self.values[t - 1],
        }
    }
}

/// `h_m = 10L²/(aρM)`, `h_t = (2+β)h_{t+1} + (10+aρ)L²/(2ρaM)`;
/// `ĥ = min((1+1/β)h_m, h_1)` (or `h_1` when `m = 1`).
pub fn svrg_schedule(l: f64, phi_min_a: f64, rho: f64, m: usize, batch: usize, beta: f64) -> Result<RecursionSchedule> {
    if m < 1 {
        return Err(Error::config("epoch length must be at least 1"));
    }
    if !(beta > 0.0) {
        return Err(Error::config("β must be positive"));
    }
    if batch < 1 {
        return Err(Error::config("mini-batch size must be at least 1"));
    }
    let a = phi_min_a;
    let mf = batch as f64;
    let mut values = vec![0.0; m];
    values[m - 1] = 10.0 * l * l / (a * rho * mf);
    let add = (10.0 + a * rho) * l * l / (2.0 * rho * a * mf);
    for t in (0..m - 1).rev() {
        values[t] = (2.0 + beta) * values[t + 1] + add;
    }
    let hat = if m == 1 { values[0] } else { ((1.0 + 1.0 / beta) * values[m - 1]).min(values[0]) };
    Ok(RecursionSchedule { kind: ScheduleKind::SvrgH, values, beta, hat })
}

/// `α_{T+1} = 0`, `α_t = (10L² + aρL²)/(2ρaM) + ((2n−M)/n + (n−M)β/n) α_{t+1}`;
/// `α̂ = min_t (n−M)(1+1/β)α_{t+1}/n`, which the terminal zero makes 0.
pub fn saga_schedule(l: f64, phi_min_a: f64, rho: f64, iterations: usize, n: usize, batch: usize, beta: f64) -> Result<RecursionSchedule> {
    if iterations < 1 {
        return Err(Error::config("SAGA schedule needs T ≥ 1"));
    }
    if batch < 1 || batch > n {
        return Err(Error::config(format!("mini-batch size {batch} outside [1, {n}]")));
    }
    if !(beta > 0.0) {
        return Err(Error::config("β must be positive"));
    }
    let a = phi_min_a;
    let (nf, mf) = (n as f64, batch as f64);
    let add = (10.0 * l * l + a * rho * l * l) / (2.0 * rho * a * mf);
    let factor = (2.0 * nf - mf) / nf + (nf - mf) * beta / nf;
    let mut values = vec![0.0; iterations];
    let mut next = 0.0;
    for t in (0..iterations).rev() {
        values[t] = add + factor * next;
        next = values[t];
    }
    let weight = (nf - mf) * (1.0 + 1.0 / beta) / nf;
    let hat = (1..=iterations)
        .map(|t| weight * if t < iterations { values[t] } else { 0.0 })
        .fold(f64::INFINITY, f64::min);
    Ok(RecursionSchedule { kind: ScheduleKind::SagaAlpha, values, beta, hat })
}

/// Certificate for SVRG and SAGA: all `Γ_t > 0` and `(η, ρ)` in the shifted interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VrCertificate {
    pub constants: TheoryConstants,
    pub schedule: RecursionSchedule,
    pub interval: Interval,
    #[serde(with = "ext_f64::vec")]
    pub gammas: Vec<f64>,
    #[serde(with = "ext_f64")]
    pub gamma_min: f64,
    pub accepted: bool,
}

impl VrCertificate {
    fn assemble(constants: TheoryConstants, schedule: RecursionSchedule, gammas: Vec<f64>) -> Self {
        let interval = constants.interval(schedule.hat);
        let gamma_min = gammas.iter().copied().fold(f64::INFINITY, |m, g| if g.is_nan() { f64::NAN } else { m.min(g) });
        let accepted = interval.contains && gamma_min > 0.0;
        VrCertificate { constants, schedule, interval, gammas, gamma_min, accepted }
    }
}

/// `Γ_t = γ − (1+1/β)h_{t+1}` for `t < m` and `Γ_m = γ − h_1`.
#[allow(clippy::too_many_arguments)]
pub fn svrg_feasible(l: f64, cs: &ConstraintSystem, eta: f64, rho: f64, r: f64, m: usize, batch: usize, beta: f64) -> Result<VrCertificate> {
    let constants = TheoryConstants::new(l, cs, eta, rho, r)?;
    let schedule = svrg_schedule(l, cs.phi_min_a, rho, m, batch, beta)?;
    let gammas = (1..=m)
        .map(|t| if t < m { constants.gamma - (1.0 + 1.0 / beta) * schedule.at(t + 1) } else { constants.gamma - schedule.at(1) })
        .collect();
    Ok(VrCertificate::assemble(constants, schedule, gammas))
}

/// `Γ_t = γ − ((n−M)/n)(1+1/β)α_{t+1}`.
#[allow(clippy::too_many_arguments)]
pub fn saga_feasible(
    l: f64,
    cs: &ConstraintSystem,
    eta: f64,
    rho: f64,
    r: f64,
    iterations: usize,
    n: usize,
    batch: usize,
    beta: f64,
) -> Result<VrCertificate> {
    let constants = TheoryConstants::new(l, cs, eta, rho, r)?;
    let schedule = saga_schedule(l, cs.phi_min_a, rho, iterations, n, batch, beta)?;
    let weight = (n - batch) as f64 / n as f64 * (1.0 + 1.0 / beta);
    let gammas = (1..=iterations)
        .map(|t| {
            let next = schedule.at(t + 1);
            // (n − M) = 0 removes the term even when α overflows.
            if weight == 0.0 {
                constants.gamma
            } else {
                constants.gamma - weight * next
            }
        })
        .collect();
    Ok(VrCertificate::assemble(constants, schedule, gammas))
}
