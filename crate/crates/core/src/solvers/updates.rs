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


//! The three ADMM block updates.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::problems::{CompositeProblem, ConstraintSystem};

/// `y⁺ = argmin_y L_ρ(x, y, λ)`. With `B = −I` this is
/// `prox_{g/ρ}(Ax − c − λ/ρ)`.
pub fn y_update(problem: &CompositeProblem, x: &DVector<f64>, lambda: &DVector<f64>, rho: f64) -> Result<DVector<f64>> {
    let cs = &problem.constraints;
    if !cs.is_b_neg_identity() {
        return Err(Error::UnsupportedConstraint("closed-form y-update needs B = -I".into()));
    }
    if !(rho > 0.0) {
        return Err(Error::config("ρ must be positive"));
    }
    let mut v = cs.a.apply(x) - &cs.c;
    v.axpy(-1.0 / rho, lambda, 1.0);
    problem.regularizer.prox(&v, 1.0 / rho)
}

/// Linearized step `x⁺ = x − (η/r)[ĝ + ρAᵀ(Ax + By⁺ − c − λ/ρ)]`, the exact
/// minimizer of the surrogate with `H = rI − ρηAᵀA`.
#[allow(clippy::too_many_arguments)]
pub fn x_update_uzawa(
    cs: &ConstraintSystem,
    x: &DVector<f64>,
    y_next: &DVector<f64>,
    lambda: &DVector<f64>,
    g_hat: &DVector<f64>,
    eta: f64,
    rho: f64,
    r: f64,
) -> Result<DVector<f64>> {
    if g_hat.len() != x.len() {
        return Err(Error::input("gradient estimate has wrong dimension"));
    }
    let r_min = eta * rho * cs.norm_ata + 1.0;
    if r < r_min * (1.0 - 1e-12) {
        return Err(Error::config(format!("r = {r} below ηρ‖AᵀA‖ + 1 = {r_min}")));
    }
    let mut res = cs.residual(x, y_next);
    res.axpy(-1.0 / rho, lambda, 1.0);
    let mut dir = cs.a.apply_transpose(&res);
    dir *= rho;
    dir += g_hat;
    let mut out = x.clone();
    out.axpy(-eta / r, &dir, 1.0);
    Ok(out)
}

/// `λ⁺ = λ − ρ(Ax⁺ + By⁺ − c)`.
pub fn lambda_update(cs: &ConstraintSystem, lambda: &DVector<f64>, x_next: &DVector<f64>, y_next: &DVector<f64>, rho: f64) -> DVector<f64> {
    let mut out = lambda.clone();
    out.axpy(-rho, &cs.residual(x_next, y_next), 1.0);
    out
}

/// `Aᵀλ⁺ − ĝ + (H/η)(x − x⁺)`, zero up to rounding for every step.
#[allow(clippy::too_many_arguments)]
pub fn dual_identity_residual(
    cs: &ConstraintSystem,
    x: &DVector<f64>,
    x_next: &DVector<f64>,
    lambda_next: &DVector<f64>,
    g_hat: &DVector<f64>,
    eta: f64,
    rho: f64,
    r: f64,
) -> DVector<f64> {
    let dx = x - x_next;
    let h_dx = &dx * r - cs.a.gram_apply(&dx) * (rho * eta);
    cs.a.apply_transpose(lambda_next) - g_hat + h_dx / eta
}
