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

//! Classical simulation of probe-qubit spectroscopy for the 3-bit exact cover
//! problem (EC3).
//!
//! A probe qubit with frequency `ω` is weakly coupled (strength `c`) to an
//! `(n+1)`-qubit register whose Hamiltonian holds a `−1` reference block next
//! to the problem Hamiltonian. Starting from the uniform reference state, the
//! probe decays only when `ω` matches a register transition, so at `ω = 1`
//! decay signals that a satisfying assignment exists and leaves the register
//! in a superposition of all of them.
//!
//! - [`ec3`]: instances, clause energies, the brute-force oracle.
//! - [`operators`]: matrix-free Hamiltonian and excitation actions.
//! - [`evolution`]: exact, Krylov and Trotterized propagators.
//! - [`experiment`]: the full protocol, closed-form predictions, sweeps.
//! - [`verify`]: cross-checks against dense oracles.

pub mod dense;
pub mod ec3;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod operators;
pub mod random;
pub mod report;
pub mod verify;

pub use ec3::{
    brute_force_solve, build_hp_diagonal, clause_energy, parse_instance, problem_energy,
    Assignment, Clause, Ec3Instance, SpectrumSummary,
};
pub use error::{Error, Result};
pub use evolution::{
    coupling_step, diagonal_step, propagate_exact, propagate_trotter, Method, Propagator,
    PropagatorSpec, TrotterSteps,
};
pub use experiment::{
    analytic_prediction, extract_solutions, rabi_decay_probability, run_algorithm, sweep_omega,
    sweep_tau, AnalyticPrediction, DecayResult, SimulationParams,
};
pub use operators::{
    apply_excitation, apply_full_h, build_htilde, prepare_reference, HamiltonianParams,
    HtildeDiagonal, QuantumState,
};
