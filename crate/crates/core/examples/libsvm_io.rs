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

//! LIBSVM text format: write a generated dataset, parse it back, and read a
//! hand-written file with `{1, 2}` labels.
//!
//! ```text
//! cargo run --example libsvm_io
//! ```

use nc_admm::data::{gen_graph_guided, parse_libsvm, write_libsvm, Labels, LibsvmOptions};

fn main() -> nc_admm::Result<()> {
    let (data, _, _) = gen_graph_guided(5, 4, 1)?;
    let mut bytes = Vec::new();
    write_libsvm(&data, &mut bytes)?;
    print!("{}", String::from_utf8_lossy(&bytes));

    let back = parse_libsvm(bytes.as_slice(), "round-trip", &LibsvmOptions::default())?;
    let same = (0..data.n()).all(|i| data.features.row_entries(i) == back.features.row_entries(i)) && data.labels == back.labels;
    println!("round trip exact: {same}");

    let text = "2 1:0.5 3:2\n1 2:-1\r\n# comment\n\n2 4:1e-3\n";
    let parsed = parse_libsvm(text.as_bytes(), "inline", &LibsvmOptions::default())?;
    if let Labels::Binary(b) = &parsed.labels {
        println!("n = {}, d = {}, labels = {b:?}", parsed.n(), parsed.d());
    }
    println!("row 0 = {:?}", parsed.features.row_entries(0));

    match parse_libsvm("1 3:1 2:1\n".as_bytes(), "bad", &LibsvmOptions::default()) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("indices must increase"),
    }
    Ok(())
}
