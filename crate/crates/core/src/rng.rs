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

//! Seeded substreams of a counter-based generator. Each consumer owns its
//! own stream id so adding draws in one place never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type Rng = ChaCha12Rng;

/// Stream ids used across the crate.
pub mod stream {
    pub const PRECISION: u64 = 1;
    pub const TRUTH: u64 = 2;
    pub const FEATURES: u64 = 3;
    pub const NOISE: u64 = 4;
    pub const SPLIT: u64 = 5;
    pub const INIT: u64 = 10;
    pub const BATCH: u64 = 11;
    pub const OUTPUT: u64 = 12;
    pub const DIAGNOSTICS: u64 = 13;
}

pub fn substream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
