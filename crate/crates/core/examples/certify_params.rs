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

//! Parameter certificates: the `(η, ρ)` regions in which the Lyapunov
//! sequences provably decrease, and the search that picks a pair from them.
//!
//! ```text
//! cargo run --example certify_params
//! ```

use nc_admm::data::gen_graph_guided;
use nc_admm::params::{certify, estimate_lipschitz, rho_star, suggest_params, SuggestOptions, DEFAULT_BETA};
use nc_admm::solvers::{SolverConfig, Variant};
use nc_admm::CompositeProblem;

fn main() -> nc_admm::Result<()> {
    let (data, precision, _) = gen_graph_guided(400, 10, 5)?;
    let problem = CompositeProblem::graph_guided(&data, &precision.support, 0.05, 1e-5)?;
    let l = estimate_lipschitz(&problem.loss);
    let a = problem.constraints.phi_min_a;
    let star = rho_star(l, l + 1.0, a);
    println!("L = {l:.4}, φ_min(AᵀA) = {a:.4}, ‖AᵀA‖ = {:.4}, ρ* = {star:.4}", problem.constraints.norm_ata);

    println!("\nSTOC certificate across ρ at η = 1:");
    for factor in [0.5, 0.99, 1.0, 1.1, 2.0, 10.0] {
        let config = SolverConfig::new(Variant::Stoc, 1.0, factor * star, 20, 1000);
        let c = certify(&problem, &config, l, DEFAULT_BETA)?;
        let iv = &c.constants().interval(0.0);
        println!(
            "  ρ = {:>8.3} ({:?}): η ∈ ({:.3e}, {:.3e}]  γ = {:>10.3e}  accepted = {}",
            factor * star,
            iv.case,
            iv.eta_lower,
            iv.eta_upper,
            c.gamma_min(),
            c.accepted()
        );
    }

    println!("\nSuggested parameters:");
    for variant in Variant::ALL {
        let template = SolverConfig::new(variant, 1.0, 1.0, 20, 50).with_epoch_len(2);
        match suggest_params(&problem, &template, &SuggestOptions::default()) {
            Ok(s) => println!(
                "  {:>4}: η = {:.3e}, ρ = {:.4e}, r = {:.4e}, min Γ = {:.3e}",
                variant.name(),
                s.config.eta,
                s.config.rho,
                s.config.r.unwrap_or(f64::NAN),
                s.certificate.gamma_min()
            ),
            Err(e) => println!("  {:>4}: {}", variant.name(), e.to_string().chars().take(100).collect::<String>()),
        }
    }
    Ok(())
}
