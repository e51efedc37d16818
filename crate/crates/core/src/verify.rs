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

//! Self-checks that compare each fast path against an independent dense or
//! closed-form route.

use crate::dense;
use crate::ec3::Ec3Instance;
use crate::error::{Error, Result};
use crate::evolution::{coupling_step, propagate_exact, propagate_trotter};
use crate::operators::{
    apply_excitation, apply_full_h, build_htilde, inner, max_abs_diff, prepare_reference,
    HamiltonianParams,
};
use crate::random::{random_state, random_vector};

pub const VERIFY_MAX_BITS: usize = 6;

pub const TROTTER_TEST_TAU: f64 = 50.0;
pub const TROTTER_TEST_STEPS: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub omega: f64,
    pub c: f64,
    pub seed: u64,
    /// Corrupts the coupling sign; every run with this set must fail.
    pub skew_coupling: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
}

impl CheckOutcome {
    fn below(name: &'static str, measured: f64, limit: f64) -> Self {
        Self {
            name,
            passed: measured <= limit,
            measured,
            limit,
        }
    }
}

/// Least-squares slope of `ln err` against `ln L`.
pub fn convergence_order(steps: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|&l| (l as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -sxy / sxx
}

/// Trotter error `‖trotter − exact‖∞` at each step count, starting from the
/// reference state.
pub fn trotter_errors(p: &HamiltonianParams, tau: f64, steps: &[usize]) -> Result<Vec<f64>> {
    let psi = prepare_reference(p.n())?;
    let exact = propagate_exact(p, &psi, tau)?;
    steps
        .iter()
        .map(|&l| Ok(propagate_trotter(p, &psi, tau, l)?.max_abs_diff(&exact)))
        .collect()
}

pub fn run_checks(inst: &Ec3Instance, opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let n = inst.n();
    if n > VERIFY_MAX_BITS {
        return Err(Error::Resource {
            what: "dense verification",
            n,
            cap: VERIFY_MAX_BITS,
        });
    }
    let mut p = HamiltonianParams::new(opts.omega, opts.c, build_htilde(inst)?)?;
    if opts.skew_coupling {
        p = p.with_skewed_coupling();
    }
    let dense_h = dense::hamiltonian(&p)?;
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    let mut asym = 0.0f64;
    for k in 0..3 {
        let u = random_state(n, opts.seed.wrapping_add(2 * k));
        let v = random_state(n, opts.seed.wrapping_add(2 * k + 1));
        let hv = apply_full_h(&p, &v)?;
        let hu = apply_full_h(&p, &u)?;
        worst = worst.max(max_abs_diff(
            &hv,
            &dense::matvec_real(&dense_h, v.amplitudes()),
        ));
        asym = asym.max((inner(u.amplitudes(), &hv) - inner(v.amplitudes(), &hu).conj()).norm());
    }
    out.push(CheckOutcome::below("dense_vs_matrix_free", worst, 1e-10));
    out.push(CheckOutcome::below("hermiticity", asym, 1e-10));

    let tensor = dense::excitation_tensor_form(n);
    let sum_gap = (dense::excitation_sum_form(n) - &tensor).abs().max();
    let w = random_vector(1 << (n + 1), opts.seed ^ 0x5a5a);
    let mf_gap = max_abs_diff(&apply_excitation(n, &w)?, &dense::matvec_real(&tensor, &w));
    out.push(CheckOutcome::below(
        "excitation_sum_vs_tensor",
        sum_gap.max(mf_gap),
        1e-12,
    ));

    let coupling = dense::coupling_part(&p)?;
    let mut gap = 0.0f64;
    for (k, dt) in [0.13, 0.5, 0.97].into_iter().enumerate() {
        let psi = random_state(n, opts.seed.wrapping_add(100 + k as u64));
        let want = dense::matvec_complex(&dense::expm_minus_i(&coupling, dt), psi.amplitudes());
        gap = gap.max(max_abs_diff(
            coupling_step(&p, &psi, dt)?.amplitudes(),
            &want,
        ));
    }
    out.push(CheckOutcome::below(
        "coupling_circuit_vs_exponential",
        gap,
        1e-10,
    ));

    // The propagators assume a Hermitian generator; skip them once that has failed.
    if asym <= 1e-10 {
        let psi = random_state(n, opts.seed.wrapping_add(7));
        let a = propagate_exact(&p, &psi, 123.0)?;
        let b = propagate_trotter(&p, &psi, 123.0, 10_000)?;
        let drift = (a.norm() - 1.0).abs().max((b.norm() - 1.0).abs());
        out.push(CheckOutcome::below("norm_preservation", drift, 1e-9));

        let errors = trotter_errors(&p, TROTTER_TEST_TAU, &TROTTER_TEST_STEPS)?;
        let order = convergence_order(&TROTTER_TEST_STEPS, &errors);
        out.push(CheckOutcome::below(
            "trotter_order",
            (order - 1.0).abs(),
            0.2,
        ));
    }
    Ok(out)
}
