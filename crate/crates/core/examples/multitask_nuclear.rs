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

//! Multi-task classification with a log-sum plus nuclear-norm penalty on
//! the coefficient matrix, split into a smooth nonconvex part and two
//! convex blocks `y = [vec X; vec X]`.
//!
//! ```text
//! cargo run --release --example multitask_nuclear
//! ```

use nc_admm::data::{split, Dataset, Features, Labels};
use nc_admm::rng::substream;
use nc_admm::solvers::{run, NoObserver, SolverConfig, Variant};
use nc_admm::CompositeProblem;
use rand::Rng;
use rand_distr::StandardNormal;

/// Three Gaussian blobs in `d` dimensions whose means span a 2-D subspace,
/// so the true coefficient matrix is low rank.
fn blobs(n: usize, d: usize, seed: u64) -> nc_admm::Result<Dataset> {
    let mut rng = substream(seed, 0);
    let means = [[2.0, 0.0], [-1.0, 1.7], [-1.0, -1.7]];
    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % 3;
        for j in 0..d {
            let mu = if j < 2 { means[c][j] } else { 0.0 };
            values.push(mu + rng.sample::<f64, _>(StandardNormal));
        }
        labels.push(c);
    }
    Dataset::new("blobs", "synthetic:blobs", Features::dense(n, d, values)?, Labels::Multiclass { classes: 3, labels })
}

fn main() -> nc_admm::Result<()> {
    let data = blobs(900, 8, 11)?;
    let (train, test) = split(&data, 0.5, 11)?;
    let problem = CompositeProblem::multitask(&train, 1e-3, 1e-2, 1.0, 1.0)?;
    println!("x ∈ R^{} (3 x 8), y ∈ R^{}, A = [I; I]", problem.d(), problem.p());

    let config = SolverConfig::new(Variant::Saga, 0.8, 2.0, 30, 600).with_stride(150);
    let out = run(&problem, &config, &mut NoObserver)?;
    for r in &out.trace {
        println!("t = {:>4}  objective = {:.5}  feas² = {:.2e}  subgrad² = {:.2e}", r.t, r.objective, r.feas_sq, r.subgrad_sq);
    }

    let x = nalgebra::DMatrix::from_row_slice(3, 8, out.state.x.as_slice());
    let sv = x.singular_values();
    println!("singular values of X: {:.3?}", sv.as_slice());
    let test_loss = nc_admm::problems::SmoothedMultiTaskLoss::from_dataset(&test, 0.0, 1.0, 1.0)?;
    let err = nc_admm::problems::SmoothLoss::SmoothedMultiTask(test_loss).error_rate(&out.state.x)?;
    println!("test error = {err:.3}");
    Ok(())
}
