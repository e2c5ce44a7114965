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

//! Datasets: synthetic generators, LIBSVM I/O and train/test splitting.

mod dataset;
pub mod libsvm;
pub mod synth;

pub use dataset::{Dataset, DatasetMeta, Features, Labels};
pub use libsvm::{parse_libsvm, read_libsvm, write_libsvm, BinaryLabelRule, LabelKind, LibsvmOptions};
pub use synth::{gen_graph_guided, gen_overlap, gen_overlap_grid, gen_precision, PrecisionModel};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{stream, substream};

/// Seeded shuffle, then the first `round(fraction * n)` samples become the
/// training set and the rest the test set.
pub fn split(dataset: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(dataset.n(), fraction, seed)?;
    Ok((dataset.subset(&train, "_train"), dataset.subset(&test, "_test")))
}

/// Indices chosen by [`split`], for callers that need the partition itself.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::config(format!("split fraction {fraction} not in (0, 1)")));
    }
    let n_train = (fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::config(format!("split of {n} samples at {fraction} leaves an empty side")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut substream(seed, stream::SPLIT));
    let test = order.split_off(n_train);
    Ok((order, test))
}
