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

//! Acceptance criteria. Each criterion prints one `PASS` or `FAIL` line;
//! the process exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use ec3probe::dense;
use ec3probe::evolution::{coupling_step, propagate_trotter, Method, Propagator, PropagatorSpec};
use ec3probe::experiment::{optimal_tau, resonant_matrix_element, Experiment};
use ec3probe::random::{random_instance, random_state, rng};
use ec3probe::verify::{convergence_order, trotter_errors, TROTTER_TEST_STEPS, TROTTER_TEST_TAU};
use ec3probe::{
    analytic_prediction, apply_full_h, brute_force_solve, build_htilde, extract_solutions,
    parse_instance, sweep_omega, sweep_tau, Ec3Instance, Error, HamiltonianParams,
    SimulationParams,
};
use rand::Rng;

const C: f64 = 0.002;

struct Verdict {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn fixture(name: &str) -> Ec3Instance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"));
    parse_instance(&std::fs::read_to_string(path).expect("fixture")).expect("fixture parses")
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|k| start + k as f64 * step).collect()
}

fn max_by_key(values: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    values.fold((f64::NEG_INFINITY, f64::NAN), |best, (v, at)| {
        if v > best.0 {
            (v, at)
        } else {
            best
        }
    })
}

struct Case {
    name: &'static str,
    inst: Ec3Instance,
    m: u64,
    demo_tau: f64,
    exp: Experiment,
}

fn criterion_1() -> (Verdict, Experiment) {
    let inst = fixture("case_i");
    let start = Instant::now();
    let exp = Experiment::new(&inst, &SimulationParams::default()).unwrap();
    let taus = grid(0.0, 1600.0, 5.0);
    let rows: Vec<(f64, f64)> = taus
        .iter()
        .map(|&t| (t, exp.run_at(t).unwrap().p_decay))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let p800 = rows.iter().find(|r| r.0 == 800.0).unwrap().1;
    let (dev, at) = max_by_key(
        rows.iter()
            .map(|&(t, p)| ((p - (C * t).sin().powi(2)).abs(), t)),
    );
    let ok = p800 >= 0.99 && dev <= 0.01 && elapsed < 60.0;
    (
        check(
            ok,
            format!(
                "case i: p(800) = {p800:.5} (>= 0.99), max |p - sin²(0.002τ)| = {dev:.5} at τ = {at} \
                 (<= 0.01), runtime {elapsed:.1} s (< 60 s)"
            ),
        ),
        exp,
    )
}

fn criterion_2(cases: &[Case]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut peaks = Vec::new();
    for case in cases {
        if case.name != "case i" {
            let p = case.exp.run_at(case.demo_tau).unwrap().p_decay;
            ok &= p >= 0.99;
            parts.push(format!("{}: p({}) = {p:.5}", case.name, case.demo_tau));
        }
        let want = optimal_tau(C, case.m);
        let rows: Vec<(f64, f64)> = grid(0.0, 1.3 * want, 1.0)
            .into_iter()
            .map(|t| (case.exp.run_at(t).unwrap().p_decay, t))
            .collect();
        let sweep_peak = first_lobe_peak(&rows);
        let rel = (sweep_peak - want).abs() / want;
        ok &= rel <= 0.05;
        parts.push(format!(
            "{} peak τ = {sweep_peak} vs {want:.1} ({:.2}%)",
            case.name,
            rel * 100.0
        ));
        peaks.push(sweep_peak);
    }
    let ordered = peaks.windows(2).all(|w| w[0] > w[1]);
    ok &= ordered;
    parts.push(format!("ordered i > ii > iii: {ordered}"));
    check(ok, parts.join("; "))
}

fn first_lobe_peak(rows: &[(f64, f64)]) -> f64 {
    let start = rows
        .iter()
        .position(|r| r.0 > 0.5)
        .expect("curve crosses 0.5");
    let end = rows[start..]
        .iter()
        .position(|r| r.0 <= 0.5)
        .map_or(rows.len(), |k| start + k);
    max_by_key(rows[start..end].iter().copied()).1
}

fn criterion_3(cases: &[Case]) -> Verdict {
    let mut worst: f64 = 0.0;
    for case in cases {
        let q01 = 2.0 * C * resonant_matrix_element(&case.inst).unwrap();
        worst = worst.max((q01 - 2.0 * C * (case.m as f64).sqrt()).abs());
    }
    check(
        worst <= 1e-10,
        format!("max |2c|<Ψ1|A|Ψ0>| - 2c√m| = {worst:.2e} over m = 1, 2, 4 (<= 1e-10)"),
    )
}

fn criterion_4() -> Verdict {
    let inst = fixture("no_solution_4bit");
    let sweep = sweep_tau(&inst, &SimulationParams::default(), &grid(0.0, 1600.0, 1.0)).unwrap();
    let worst = sweep.rows.iter().map(|r| r.p_decay).fold(0.0, f64::max);
    let om = sweep_omega(
        &inst,
        &SimulationParams::default(),
        &[1.0, 2.0, 3.0, 4.0, 5.0],
        None,
    )
    .unwrap();
    let first = om.first_resonant_omega;
    let extracted: BTreeSet<u64> = om
        .first_resonant()
        .map(|row| extract_solutions(&inst, &row.decay, 0.1).unwrap())
        .unwrap_or_default()
        .iter()
        .map(|a| a.code())
        .collect();
    let oracle: BTreeSet<u64> = brute_force_solve(&inst)
        .unwrap()
        .minimizers
        .iter()
        .map(|a| a.code())
        .collect();
    let ok = worst <= 0.01 && first == Some(2.0) && extracted == oracle;
    check(
        ok,
        format!(
            "unsat 4-bit: max p_decay over τ <= 1600 = {worst:.2e} (<= 0.01), first resonance ω = {first:?} \
             (2), extracted {} of {} minimizers, sets equal: {}",
            extracted.len(),
            oracle.len(),
            extracted == oracle
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut r = rng(5);
    let mut instances = Vec::new();
    while instances.len() < 12 {
        let n = r.gen_range(4..=6);
        let clauses = r.gen_range(1..=2 * n);
        let inst = random_instance(&mut r, n, clauses);
        let s = brute_force_solve(&inst).unwrap();
        if s.is_satisfiable() && s.max_excited_degeneracy() <= 8 && s.max_excited_degeneracy() > 0 {
            instances.push(inst);
        }
    }
    let taus = grid(0.0, 1600.0, 10.0);
    let mut ok = true;
    let mut worst_margin = f64::INFINITY;
    let mut worst_excess = f64::NEG_INFINITY;
    for inst in &instances {
        let sweep = sweep_tau(inst, &SimulationParams::default(), &taus).unwrap();
        let bound = analytic_prediction(inst, &SimulationParams::default(), sweep.m)
            .unwrap()
            .err_bound;
        for row in &sweep.rows {
            let excess = row.p_decay - row.p_analytic;
            worst_excess = worst_excess.max(excess);
            worst_margin = worst_margin.min(bound + 5e-3 - excess);
            ok &= excess <= bound + 5e-3;
        }
    }
    check(
        ok,
        format!(
            "{} random instances with m0 <= 8: max excess {worst_excess:.2e}, smallest margin to \
             (2/3)m0π²c² + 5e-3 is {worst_margin:.2e}",
            instances.len()
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut form_gap: f64 = 0.0;
    for n in 1..=4 {
        let d = dense::excitation_sum_form(n) - dense::excitation_tensor_form(n);
        form_gap = form_gap.max(d.amax());
    }
    let mut r = rng(6);
    let mut circuit_gap: f64 = 0.0;
    let mut herm_gap: f64 = 0.0;
    let mut norm_gap: f64 = 0.0;
    for trial in 0..24u64 {
        let n = r.gen_range(3..=4);
        let clauses = r.gen_range(1..=2 * n);
        let inst = random_instance(&mut r, n, clauses);
        let p = HamiltonianParams::new(
            r.gen_range(0.5..3.0),
            r.gen_range(1e-3..0.2),
            build_htilde(&inst).unwrap(),
        )
        .unwrap();
        let dt = r.gen_range(0.01..20.0);
        let psi = random_state(n, trial);
        let want = dense::matvec_complex(
            &dense::expm_minus_i(&dense::coupling_part(&p).unwrap(), dt),
            psi.amplitudes(),
        );
        let got = coupling_step(&p, &psi, dt).unwrap();
        let gap = got
            .amplitudes()
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        circuit_gap = circuit_gap.max(gap);

        let h = dense::hamiltonian(&p).unwrap();
        herm_gap = herm_gap.max((&h - h.transpose()).amax());
        let phi = random_state(n, trial + 1000);
        let hphi = apply_full_h(&p, &phi).unwrap();
        let hpsi = apply_full_h(&p, &psi).unwrap();
        let lhs: num_complex::Complex64 = psi
            .amplitudes()
            .iter()
            .zip(&hphi)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let rhs: num_complex::Complex64 = hpsi
            .iter()
            .zip(phi.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        herm_gap = herm_gap.max((lhs - rhs).norm());

        let tau = r.gen_range(0.0..1000.0);
        for method in [Method::ExactEig, Method::ExactKrylov] {
            let prop = Propagator::new(p.clone(), PropagatorSpec::with_method(method)).unwrap();
            norm_gap = norm_gap.max((prop.evolve(&psi, tau).unwrap().state.norm() - 1.0).abs());
        }
        norm_gap =
            norm_gap.max((propagate_trotter(&p, &psi, tau, 500).unwrap().norm() - 1.0).abs());
    }
    let ok = form_gap <= 1e-12 && circuit_gap <= 1e-10 && herm_gap <= 1e-9 && norm_gap <= 1e-9;
    check(
        ok,
        format!(
            "sum vs tensor form {form_gap:.1e} (<= 1e-12), coupling circuit vs dense exponential \
             {circuit_gap:.1e} (<= 1e-10), hermiticity {herm_gap:.1e} and norm drift {norm_gap:.1e} (<= 1e-9)"
        ),
    )
}

fn criterion_7(cases: &[Case]) -> Verdict {
    let bed = Ec3Instance::new(4, vec![[1, 2, 3], [2, 3, 4]]).unwrap();
    let p = HamiltonianParams::new(1.0, C, build_htilde(&bed).unwrap()).unwrap();
    let errors = trotter_errors(&p, TROTTER_TEST_TAU, &TROTTER_TEST_STEPS).unwrap();
    let order = convergence_order(&TROTTER_TEST_STEPS, &errors);
    let mut ok = (order - 1.0).abs() <= 0.2;
    let mut parts = vec![format!(
        "order {order:.3} on n = 4 at τ = 50, L = 64..4096 (1 ± 0.2)"
    )];
    for case in cases {
        let auto = SimulationParams::default().with_propagator(PropagatorSpec::trotter_auto());
        let d = Experiment::new(&case.inst, &auto)
            .unwrap()
            .run_at(case.demo_tau)
            .unwrap();
        let exact = case.exp.run_at(case.demo_tau).unwrap().p_decay;
        let gap = (d.p_decay - exact).abs();
        ok &= gap <= 1e-2;
        parts.push(format!(
            "{} τ = {}: L = {} gap {gap:.1e}",
            case.name,
            case.demo_tau,
            d.chosen_l.unwrap()
        ));
    }
    check(ok, parts.join("; "))
}

fn criterion_8() -> Verdict {
    let mut r = rng(8);
    let (mut tried, mut matched, mut rejected) = (0, 0, 0);
    let mut mismatches = Vec::new();
    while tried < 100 {
        let n = r.gen_range(3..=6);
        let clauses = r.gen_range(1..=2 * n);
        let inst = random_instance(&mut r, n, clauses);
        let oracle = brute_force_solve(&inst).unwrap();
        let m = oracle.solution_count();
        // With m >= 10 each solution carries at most 1/m < 0.1 of the conditional mass.
        if m >= 10 {
            rejected += 1;
            continue;
        }
        tried += 1;
        let tau = optimal_tau(C, m.max(1));
        let d = Experiment::new(&inst, &SimulationParams::new(1.0, C, tau))
            .unwrap()
            .run_at(tau)
            .unwrap();
        let got: BTreeSet<u64> = match extract_solutions(&inst, &d, 0.1) {
            Ok(v) => v.iter().map(|a| a.code()).collect(),
            Err(Error::NoDecay(_)) => BTreeSet::new(),
            Err(e) => panic!("{e}"),
        };
        let want: BTreeSet<u64> = oracle.solutions().iter().map(|a| a.code()).collect();
        if got == want {
            matched += 1;
        } else {
            mismatches.push(inst.to_json());
        }
    }
    let mut detail = format!("{matched}/{tried} random instances (n <= 6) match the oracle; {rejected} with m >= 10 skipped");
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first mismatch {first}"));
    }
    check(matched == tried, detail)
}

fn main() {
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let (v1, exp_i) = criterion_1();
    results.push((1, "decay curve, case i", v1));

    let cases = vec![
        Case {
            name: "case i",
            inst: fixture("case_i"),
            m: 1,
            demo_tau: 800.0,
            exp: exp_i,
        },
        build_case("case ii", "case_ii", 2, 550.0),
        build_case("case iii", "case_iii", 4, 400.0),
    ];
    results.push((2, "decay curves, cases ii and iii", criterion_2(&cases)));
    results.push((3, "resonant matrix element", criterion_3(&cases)));
    results.push((4, "unsatisfiable instance", criterion_4()));
    results.push((5, "off-resonance error bound", criterion_5()));
    results.push((6, "operator identities", criterion_6()));
    results.push((7, "trotter convergence", criterion_7(&cases)));
    results.push((8, "oracle equivalence", criterion_8()));

    let mut failed = 0;
    for (k, title, v) in &results {
        let tag = if v.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!v.passed);
        println!("[{tag}] criterion {k}: {title}: {}", v.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn build_case(name: &'static str, file: &str, m: u64, demo_tau: f64) -> Case {
    let inst = fixture(file);
    let exp = Experiment::new(&inst, &SimulationParams::default()).unwrap();
    Case {
        name,
        inst,
        m,
        demo_tau,
        exp,
    }
}
