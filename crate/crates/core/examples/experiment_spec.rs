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

//! A full experiment from a JSON spec: certified parameters for each
//! solver, several seeds, per-run traces, an aggregate and a summary.
//! Equivalent to `nc-admm run --spec <file> --out <dir>`.
//!
//! ```text
//! cargo run --release --example experiment_spec [out_dir]
//! ```

use std::path::PathBuf;

use nc_admm::experiment::{run_spec_file, AGGREGATE_FILE};

const SPEC: &str = r#"{
  "version": "v1",
  "problem": {
    "data": { "kind": "graph_guided", "n": 1000, "d": 20 },
    "model": { "kind": "graph_guided", "edge_weight": 0.05, "nu": 1e-5 }
  },
  "solvers": [
    { "name": "dete", "variant": "DETE", "iterations": 300 },
    { "name": "stoc", "variant": "STOC", "iterations": 300, "lyapunov": true }
  ],
  "repetitions": 3,
  "seed_base": 10,
  "trace_stride": 50
}"#;

fn main() -> nc_admm::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("nc-admm-experiment"));
    std::fs::create_dir_all(&out)?;
    let spec = out.join("spec.json");
    std::fs::write(&spec, SPEC)?;
    let outcome = run_spec_file(&spec, &out)?;
    println!("{} (exit {})", outcome.message, outcome.exit_code);
    print!("{}", std::fs::read_to_string(out.join(AGGREGATE_FILE))?);
    Ok(())
}
