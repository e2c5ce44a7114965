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

//! Gradient noise of the three stochastic oracles along a run, against the
//! bounds `(L²/M)‖x − x̃‖²` (SVRG) and `(L²/(Mn)) Σ‖x − z_i‖²` (SAGA).
//!
//! ```text
//! cargo run --release --example variance_reduction
//! ```

use nc_admm::data::gen_graph_guided;
use nc_admm::metrics::variance_diagnostics;
use nc_admm::params::estimate_lipschitz;
use nc_admm::solvers::{initial_state, run_from, stoc_gradient, sample_batch, NoObserver, SolverConfig, Variant};
use nc_admm::rng::{stream, substream};
use nc_admm::CompositeProblem;

fn main() -> nc_admm::Result<()> {
    let (data, precision, _) = gen_graph_guided(300, 10, 2)?;
    let problem = CompositeProblem::graph_guided(&data, &precision.support, 0.05, 1e-5)?;
    let l = estimate_lipschitz(&problem.loss);
    let batch = 10;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}", "t", "STOC var", "SVRG var", "SVRG bound", "SAGA var", "SAGA bound");
    for t in [0, 10, 50, 200] {
        let svrg_cfg = SolverConfig::new(Variant::Svrg, 1.0, 5.0, batch, t).with_seed(4).with_stride(t.max(1));
        let saga_cfg = SolverConfig::new(Variant::Saga, 1.0, 5.0, batch, t).with_seed(4).with_stride(t.max(1)).with_saga_points(true);
        let svrg = run_from(&problem, &svrg_cfg, initial_state(&problem, &svrg_cfg)?, &mut NoObserver)?.state;
        let saga = run_from(&problem, &saga_cfg, initial_state(&problem, &saga_cfg)?, &mut NoObserver)?.state;
        let v_svrg = variance_diagnostics(&problem.loss, &svrg, batch, l, 2000, 9)?;
        let v_saga = variance_diagnostics(&problem.loss, &saga, batch, l, 2000, 9)?;

        // Plain mini-batch noise at the SVRG iterate, by Monte Carlo.
        let full = problem.loss.full_grad(&svrg.x)?;
        let mut rng = substream(9, stream::DIAGNOSTICS);
        let draws = 2000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let b = sample_batch(&mut rng, problem.n(), batch);
            acc += (stoc_gradient(&problem.loss, &svrg.x, &b)? - &full).norm_squared();
        }
        println!(
            "{t:>6} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            acc / draws as f64,
            v_svrg.empirical_var,
            v_svrg.bound,
            v_saga.empirical_var,
            v_saga.bound
        );
    }
    Ok(())
}
