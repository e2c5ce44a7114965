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

//! Graph-guided fused lasso with a sigmoid loss: all four gradient oracles
//! from the same start, with certified `(η, ρ)`.
//!
//! ```text
//! cargo run --release --example graph_guided_fused_lasso [n] [d] [iterations]
//! ```

use nc_admm::data::{gen_graph_guided, split};
use nc_admm::params::{suggest_params, SuggestOptions};
use nc_admm::problems::SmoothLoss;
use nc_admm::solvers::{run, NoObserver, SolverConfig, Variant};
use nc_admm::CompositeProblem;

fn main() -> nc_admm::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(1000);
    let d = args.get(1).copied().unwrap_or(20);
    let iterations = args.get(2).copied().unwrap_or(500);

    let (data, precision, _) = gen_graph_guided(n, d, 7)?;
    let (train, test) = split(&data, 0.5, 7)?;
    let problem = CompositeProblem::graph_guided(&train, &precision.support, 0.05, 1e-5)?;
    let test_loss = SmoothLoss::Sigmoid(nc_admm::problems::SigmoidLoss::from_dataset(&test)?);
    println!(
        "n_train = {}, d = {}, edges = {}, ‖AᵀA‖ = {:.4}, φ_min(AᵀA) = {:.4}",
        problem.n(),
        problem.d(),
        precision.edge_count(),
        problem.constraints.norm_ata,
        problem.constraints.phi_min_a
    );

    // Certified for STOC; the variance-reduced runs reuse the same pair.
    let template = SolverConfig::new(Variant::Stoc, 1.0, 1.0, 50, iterations);
    let s = suggest_params(&problem, &template, &SuggestOptions::default())?;
    println!("L = {:.3}, η = {:.3e}, ρ = {:.3}, γ = {:.3}", s.lipschitz, s.config.eta, s.config.rho, s.certificate.gamma_min());

    println!("{:>5} {:>10} {:>12} {:>10} {:>11}", "", "IFO", "objective", "test err", "feas²");
    for variant in Variant::ALL {
        let mut config = s.config.clone().with_seed(1).with_stride(iterations);
        config.variant = variant;
        let out = run(&problem, &config, &mut NoObserver)?;
        let last = out.trace.last().expect("one record");
        println!(
            "{:>5} {:>10} {:>12.6} {:>10.4} {:>11.3e}",
            variant.name(),
            last.ifo,
            last.objective,
            test_loss.error_rate(&out.state.x)?,
            last.feas_sq
        );
    }
    Ok(())
}
