// Copyright 2026 The ec3probe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Seeded generators for test vectors and random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ec3::Ec3Instance;
use crate::operators::{QuantumState, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit vector with Gaussian-like components.
pub fn random_vector(len: usize, seed: u64) -> Vec<C64> {
    let mut r = rng(seed);
    let mut v: Vec<C64> = (0..len)
        .map(|_| C64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

pub fn random_state(n: usize, seed: u64) -> QuantumState {
    QuantumState::from_amplitudes(n, random_vector(1 << (n + 2), seed)).expect("shape")
}

/// Instance with `num_clauses` clauses, each drawn uniformly from the 3-subsets of `[1, n]`.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, num_clauses: usize) -> Ec3Instance {
    let pool: Vec<usize> = (1..=n).collect();
    let clauses = (0..num_clauses.max(1))
        .map(|_| {
            let mut pick: Vec<usize> = pool.choose_multiple(rng, 3).copied().collect();
            pick.sort_unstable();
            [pick[0], pick[1], pick[2]]
        })
        .collect();
    Ec3Instance::new(n, clauses).expect("generated clauses are valid")
}
