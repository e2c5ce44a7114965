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

//! Sensitivity to the penalty: a fixed `η` and a grid of `ρ` around `ρ*`,
//! each run through the experiment harness, with certification flagged.
//!
//! ```text
//! cargo run --release --example rho_sweep [out_dir]
//! ```

use std::path::PathBuf;

use nc_admm::experiment::{cmd_rho_sweep, RunOptions, SweepOptions, SWEEP_FILE};

const SPEC: &str = r#"{
  "version": "v1",
  "problem": { "data": { "kind": "graph_guided", "n": 600, "d": 15 } },
  "solvers": [
    { "name": "stoc", "variant": "STOC", "iterations": 400, "batch_size": 30 },
    { "name": "svrg", "variant": "SVRG", "iterations": 400, "batch_size": 30 }
  ],
  "repetitions": 2,
  "trace_stride": 100
}"#;

fn main() -> nc_admm::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("nc-admm-rho-sweep"));
    std::fs::create_dir_all(&out)?;
    let spec = out.join("spec.json");
    std::fs::write(&spec, SPEC)?;

    let outcome = cmd_rho_sweep(&SweepOptions {
        run: RunOptions { spec, out: Some(out.clone()), ..RunOptions::default() },
        rhos: vec![0.1, 0.5, 1.0, 1.1, 2.0, 10.0],
        relative: true,
        eta: Some(1.0),
    })?;
    println!("{} (exit {})", outcome.message, outcome.exit_code);
    print!("{}", std::fs::read_to_string(out.join(SWEEP_FILE))?);
    Ok(())
}
