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

//! The probe-decay protocol end to end, its closed-form predictions, and the
//! `τ`/`ω` sweeps built on top of it.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rayon::prelude::*;

use crate::ec3::{brute_force_solve, problem_energy, Assignment, Ec3Instance};
use crate::error::{Error, Result};
use crate::evolution::{Propagator, PropagatorSpec};
use crate::operators::{
    apply_excitation, build_htilde, inner, prepare_reference, state_index, HamiltonianParams,
    QuantumState, C64, ZERO,
};
use crate::random::rng;

/// Eigenvalue of the reference block.
pub const REFERENCE_ENERGY: f64 = -1.0;

/// Decay probability separating resonant from off-resonant channels.
pub const DECAY_THRESHOLD: f64 = 0.5;

/// Below this decay probability there is nothing to condition on.
pub const MIN_DECAY: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationParams {
    pub omega: f64,
    pub c: f64,
    pub tau: f64,
    pub propagator: PropagatorSpec,
    /// Draw this many simulated measurements in addition to the exact readout.
    pub shots: Option<u64>,
    pub seed: u64,
}

impl Default for SimulationParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            c: 0.002,
            tau: 0.0,
            propagator: PropagatorSpec::exact(),
            shots: None,
            seed: 0,
        }
    }
}

impl SimulationParams {
    pub fn new(omega: f64, c: f64, tau: f64) -> Self {
        Self {
            omega,
            c,
            tau,
            ..Self::default()
        }
    }

    pub fn with_propagator(mut self, spec: PropagatorSpec) -> Self {
        self.propagator = spec;
        self
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self {
            tau,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be > 0, got {}",
                self.omega
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "c must be > 0, got {}",
                self.c
            )));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau must be >= 0, got {}",
                self.tau
            )));
        }
        if self.shots == Some(0) {
            return Err(Error::InvalidParameter("shots must be positive".into()));
        }
        self.propagator.validate()
    }
}

/// Sampled measurements of the evolved state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotSummary {
    pub shots: u64,
    /// Shots with the probe found in `|0⟩`.
    pub decays: u64,
    /// Register outcomes among decayed shots with ancilla `|1⟩`.
    pub register_counts: BTreeMap<Assignment, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayResult {
    pub n: usize,
    pub omega: f64,
    pub tau: f64,
    /// Probability that the probe is measured in `|0⟩`.
    pub p_decay: f64,
    /// `P(register = z | probe = 0, ancilla = 1)`, indexed by assignment code.
    pub conditional_register: Vec<f64>,
    /// `P(ancilla = 1 | probe = 0)`.
    pub ancilla_one_mass: f64,
    pub chosen_l: Option<usize>,
    pub shots: Option<ShotSummary>,
}

impl DecayResult {
    pub fn probability_of(&self, a: &Assignment) -> f64 {
        self.conditional_register[a.code() as usize]
    }

    /// Assignments with conditional probability above `min`, ascending by code.
    pub fn support(&self, min: f64) -> impl Iterator<Item = (Assignment, f64)> + '_ {
        self.conditional_register
            .iter()
            .enumerate()
            .filter(move |(_, &p)| p > min)
            .map(|(code, &p)| (Assignment::from_code(self.n, code as u64), p))
    }
}

fn readout(state: &QuantumState, omega: f64, tau: f64, chosen_l: Option<usize>) -> DecayResult {
    let n = state.n();
    let amps = state.amplitudes();
    let p_decay = state.probe_zero_probability();
    let start = state_index(n, 0, 1, 0);
    let block = &amps[start..start + (1 << n)];
    let ancilla_one: f64 = block.iter().map(|a| a.norm_sqr()).sum();
    let (conditional_register, ancilla_one_mass) = if p_decay > MIN_DECAY && ancilla_one > 0.0 {
        (
            block.iter().map(|a| a.norm_sqr() / ancilla_one).collect(),
            ancilla_one / p_decay,
        )
    } else {
        (vec![0.0; 1 << n], 0.0)
    };
    DecayResult {
        n,
        omega,
        tau,
        p_decay,
        conditional_register,
        ancilla_one_mass,
        chosen_l,
        shots: None,
    }
}

fn sample_shots(state: &QuantumState, shots: u64, seed: u64) -> ShotSummary {
    let n = state.n();
    let weights: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let dist = WeightedIndex::new(&weights).expect("state has nonzero norm");
    let mut r = rng(seed);
    let half = 1usize << (n + 1);
    let block = 1usize << n;
    let mut decays = 0;
    let mut register_counts = BTreeMap::new();
    for _ in 0..shots {
        let idx = dist.sample(&mut r);
        if idx < half {
            decays += 1;
            if idx >= block {
                let a = Assignment::from_code(n, (idx - block) as u64);
                *register_counts.entry(a).or_insert(0) += 1;
            }
        }
    }
    ShotSummary {
        shots,
        decays,
        register_counts,
    }
}

/// One instance, probe frequency and coupling with its propagator prepared,
/// ready to be run at any number of evolution times.
pub struct Experiment {
    n: usize,
    propagator: Propagator,
    reference: QuantumState,
    params: SimulationParams,
}

impl Experiment {
    pub fn new(inst: &Ec3Instance, sp: &SimulationParams) -> Result<Self> {
        sp.validate()?;
        let h = HamiltonianParams::new(sp.omega, sp.c, build_htilde(inst)?)?;
        Ok(Self {
            n: inst.n(),
            propagator: Propagator::new(h, sp.propagator)?,
            reference: prepare_reference(inst.n())?,
            params: sp.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &SimulationParams {
        &self.params
    }

    /// Prepare the reference, evolve for `tau`, read out the probe.
    pub fn run_at(&self, tau: f64) -> Result<DecayResult> {
        let evolved = self.propagator.evolve(&self.reference, tau)?;
        let mut result = readout(
            &evolved.state,
            self.params.omega,
            tau,
            evolved.trotter_steps,
        );
        if let Some(shots) = self.params.shots {
            result.shots = Some(sample_shots(&evolved.state, shots, self.params.seed));
        }
        Ok(result)
    }

    /// Tries `τ = π/(2c√m)` for guesses `m = 1, 2, 4, …, 2^n` and keeps the
    /// guess with the largest decay probability (earliest on ties).
    pub fn doubling_search(&self) -> Result<DoublingSearch> {
        let guesses: Vec<u64> = (0..=self.n).map(|k| 1u64 << k).collect();
        let runs = guesses
            .iter()
            .map(|&m| self.run_at(optimal_tau(self.params.c, m)))
            .collect::<Result<Vec<_>>>()?;
        let (best, decay) = runs
            .into_iter()
            .enumerate()
            .fold(None::<(usize, DecayResult)>, |acc, (k, d)| match acc {
                Some((_, ref b)) if b.p_decay >= d.p_decay => acc,
                _ => Some((k, d)),
            })
            .expect("at least one guess");
        Ok(DoublingSearch {
            m_guess: guesses[best],
            tau: decay.tau,
            decay,
        })
    }
}

#[derive(Debug, Clone)]
pub struct DoublingSearch {
    pub m_guess: u64,
    pub tau: f64,
    pub decay: DecayResult,
}

/// Runs the full protocol once at `sp.tau`.
pub fn run_algorithm(inst: &Ec3Instance, sp: &SimulationParams) -> Result<DecayResult> {
    Experiment::new(inst, sp)?.run_at(sp.tau)
}

/// First peak of `sin²(c√m τ)`.
pub fn optimal_tau(c: f64, m: u64) -> f64 {
    PI / (2.0 * c * (m as f64).sqrt())
}

/// Rabi formula for a single channel: `sin²(Ωτ/2) Q²/Ω²` with
/// `Q = 2c√m_j` and `Ω² = Q² + (E_j − E_0 − ω)²`.
pub fn rabi_decay_probability(e_j: f64, e_0: f64, omega: f64, c: f64, m_j: u64, tau: f64) -> f64 {
    let q = 2.0 * c * (m_j as f64).sqrt();
    let detuning = e_j - e_0 - omega;
    let big_omega2 = q * q + detuning * detuning;
    if big_omega2 == 0.0 {
        return 0.0;
    }
    (0.5 * big_omega2.sqrt() * tau).sin().powi(2) * q * q / big_omega2
}

/// Sum of all off-resonant channel weights bounded by `(2/3) m₀ π² c²`.
pub fn off_resonance_bound(c: f64, m0: u64) -> f64 {
    2.0 / 3.0 * m0 as f64 * PI * PI * c * c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPrediction {
    /// Resonant matrix element `2c√m`.
    pub q01: f64,
    /// `sin²(q01 τ / 2)` at the requested `τ`.
    pub p_decay_analytic: f64,
    pub err_bound: f64,
    pub optimal_tau: f64,
    pub m: u64,
    /// Largest degeneracy among the excited levels.
    pub m0: u64,
}

/// Closed-form on-resonance predictions for `m` satisfying assignments;
/// `m₀` comes from the brute-force spectrum.
pub fn analytic_prediction(
    inst: &Ec3Instance,
    sp: &SimulationParams,
    m: u64,
) -> Result<AnalyticPrediction> {
    let m0 = brute_force_solve(inst)?.max_excited_degeneracy();
    analytic_from_counts(sp.c, sp.tau, m, m0)
}

pub fn analytic_from_counts(c: f64, tau: f64, m: u64, m0: u64) -> Result<AnalyticPrediction> {
    if m == 0 {
        return Err(Error::Domain(
            "no satisfying assignment, so there is no resonant channel at omega = 1".into(),
        ));
    }
    let q01 = 2.0 * c * (m as f64).sqrt();
    Ok(AnalyticPrediction {
        q01,
        p_decay_analytic: (0.5 * q01 * tau).sin().powi(2),
        err_bound: off_resonance_bound(c, m0),
        optimal_tau: optimal_tau(c, m),
        m,
        m0,
    })
}

/// `|⟨Ψ₁|A|Ψ₀⟩|`, where `Ψ₀` is the ancilla-0 uniform superposition and `Ψ₁`
/// the normalized superposition of satisfying assignments in the ancilla-1
/// block, evaluated with the matrix-free excitation.
pub fn resonant_matrix_element(inst: &Ec3Instance) -> Result<f64> {
    let spectrum = brute_force_solve(inst)?;
    let solutions = spectrum.solutions();
    if solutions.is_empty() {
        return Err(Error::Domain(
            "instance has no satisfying assignment".into(),
        ));
    }
    let n = inst.n();
    let block = 1usize << n;
    let mut psi0 = vec![ZERO; 2 * block];
    psi0[..block].fill(C64::new((-(n as f64) / 2.0).exp2(), 0.0));
    let mut psi1 = vec![ZERO; 2 * block];
    let amp = C64::new((solutions.len() as f64).sqrt().recip(), 0.0);
    for s in solutions {
        psi1[block + s.code() as usize] = amp;
    }
    Ok(inner(&psi1, &apply_excitation(n, &psi0)?).norm())
}

fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{what} grid is empty")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "{what} grid must be strictly ascending"
        )));
    }
    Ok(())
}

/// Evaluates `f` over the grid in parallel, keeping grid order and reporting
/// the lowest failing index.
fn map_grid<T, F>(grid: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = grid.par_iter().map(|&x| f(x)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::GridPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauRow {
    pub tau: f64,
    pub p_decay: f64,
    pub p_analytic: f64,
}

impl TauRow {
    pub fn abs_err(&self) -> f64 {
        (self.p_decay - self.p_analytic).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauSweep {
    pub rows: Vec<TauRow>,
    /// Solution count from the oracle, used for the analytic column.
    pub m: u64,
    pub m0: u64,
    pub chosen_l: Option<usize>,
}

impl TauSweep {
    pub fn max_abs_err(&self) -> f64 {
        self.rows.iter().map(TauRow::abs_err).fold(0.0, f64::max)
    }

    /// `τ` of the highest point in the first lobe above the decay threshold.
    pub fn first_peak_tau(&self) -> Option<f64> {
        let r = &self.rows;
        let start = r.iter().position(|row| row.p_decay > DECAY_THRESHOLD)?;
        let end = r[start..]
            .iter()
            .position(|row| row.p_decay <= DECAY_THRESHOLD)
            .map_or(r.len(), |k| start + k);
        r[start..end]
            .iter()
            .fold(None::<&TauRow>, |best, row| match best {
                Some(b) if b.p_decay >= row.p_decay => Some(b),
                _ => Some(row),
            })
            .map(|row| row.tau)
    }
}

/// One protocol run per grid point. The analytic column is the single
/// zero-energy channel of the oracle's solution count at the sweep's `ω`.
pub fn sweep_tau(inst: &Ec3Instance, base: &SimulationParams, grid: &[f64]) -> Result<TauSweep> {
    check_grid(grid, "tau")?;
    let spectrum = brute_force_solve(inst)?;
    let m = spectrum.solution_count();
    let m0 = spectrum.max_excited_degeneracy();
    let exp = Experiment::new(inst, base)?;
    let results = map_grid(grid, |tau| exp.run_at(tau))?;
    let chosen_l = results.iter().filter_map(|d| d.chosen_l).max();
    let rows = results
        .iter()
        .map(|d| TauRow {
            tau: d.tau,
            p_decay: d.p_decay,
            p_analytic: if m > 0 {
                rabi_decay_probability(0.0, REFERENCE_ENERGY, base.omega, base.c, m, d.tau)
            } else {
                0.0
            },
        })
        .collect();
    Ok(TauSweep {
        rows,
        m,
        m0,
        chosen_l,
    })
}

#[derive(Debug, Clone)]
pub struct OmegaRow {
    pub omega: f64,
    pub tau: f64,
    pub p_decay: f64,
    pub decay: DecayResult,
}

#[derive(Debug, Clone)]
pub struct OmegaSweep {
    pub rows: Vec<OmegaRow>,
    /// Smallest grid frequency whose decay probability exceeds [`DECAY_THRESHOLD`].
    pub first_resonant_omega: Option<f64>,
}

impl OmegaSweep {
    pub fn first_resonant(&self) -> Option<&OmegaRow> {
        self.rows.iter().find(|r| r.p_decay > DECAY_THRESHOLD)
    }
}

/// Steps the probe frequency over `grid`. Without `tau_override`, each point
/// runs the `m`-doubling search starting from `τ = π/(2c)`.
pub fn sweep_omega(
    inst: &Ec3Instance,
    base: &SimulationParams,
    grid: &[f64],
    tau_override: Option<f64>,
) -> Result<OmegaSweep> {
    check_grid(grid, "omega")?;
    if grid[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "omega grid must be positive".into(),
        ));
    }
    let rows = map_grid(grid, |omega| {
        let exp = Experiment::new(
            inst,
            &SimulationParams {
                omega,
                ..base.clone()
            },
        )?;
        let decay = match tau_override {
            Some(tau) => exp.run_at(tau)?,
            None => exp.doubling_search()?.decay,
        };
        Ok(OmegaRow {
            omega,
            tau: decay.tau,
            p_decay: decay.p_decay,
            decay,
        })
    })?;
    let first_resonant_omega = rows
        .iter()
        .find(|r| r.p_decay > DECAY_THRESHOLD)
        .map(|r| r.omega);
    Ok(OmegaSweep {
        rows,
        first_resonant_omega,
    })
}

/// Register level a probe at frequency `ω` is resonant with.
pub fn resonant_level(omega: f64) -> i64 {
    (omega + REFERENCE_ENERGY).round() as i64
}

/// Reads candidate assignments off the post-decay register distribution.
///
/// Returns those whose conditional probability exceeds `threshold`, by
/// probability descending then code. Each candidate is re-checked against the
/// classical energy and dropped unless it sits on the resonant level.
pub fn extract_solutions(
    inst: &Ec3Instance,
    dr: &DecayResult,
    threshold: f64,
) -> Result<Vec<Assignment>> {
    if dr.p_decay <= MIN_DECAY {
        return Err(Error::NoDecay(dr.p_decay));
    }
    let level = resonant_level(dr.omega);
    let mut found: Vec<(Assignment, f64)> = dr
        .support(threshold)
        .filter(|(a, p)| {
            let ok = i64::from(problem_energy(inst, a)) == level;
            if !ok {
                log::warn!("dropping {a} (p = {p:.3e}): energy is off the resonant level {level}");
            }
            ok
        })
        .collect();
    found.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    Ok(found.into_iter().map(|(a, _)| a).collect())
}

/// Follow-up spectroscopy when the `ω = 1` probe does not decay.
#[derive(Debug, Clone)]
pub struct Spectroscopy {
    pub first_resonant_omega: Option<f64>,
    /// Assignments read at the first resonance (minimal-violation set).
    pub minimizers: Vec<Assignment>,
    pub sweep: OmegaSweep,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub satisfiable: bool,
    pub search: DoublingSearch,
    pub solutions: Vec<Assignment>,
    pub follow_up: Option<Spectroscopy>,
}

/// Decides satisfiability from the probe alone: `m`-doubling search at
/// `base.omega`, then, if the probe never decays, an integer `ω` sweep up to
/// `M + 1` to locate the lowest occupied level.
pub fn solve(inst: &Ec3Instance, base: &SimulationParams, threshold: f64) -> Result<SolveReport> {
    let exp = Experiment::new(inst, base)?;
    let search = exp.doubling_search()?;
    let satisfiable = search.decay.p_decay > DECAY_THRESHOLD;
    let solutions = if satisfiable {
        extract_solutions(inst, &search.decay, threshold)?
    } else {
        Vec::new()
    };
    let follow_up = if satisfiable {
        None
    } else {
        let top = inst.num_clauses() as f64 + 1.0;
        let grid: Vec<f64> = std::iter::successors(Some(base.omega + 1.0), |w| Some(w + 1.0))
            .take_while(|&w| w <= top)
            .collect();
        if grid.is_empty() {
            None
        } else {
            let sweep = sweep_omega(inst, base, &grid, None)?;
            let minimizers = match sweep.first_resonant() {
                Some(row) => extract_solutions(inst, &row.decay, threshold)?,
                None => Vec::new(),
            };
            Some(Spectroscopy {
                first_resonant_omega: sweep.first_resonant_omega,
                minimizers,
                sweep,
            })
        }
    };
    Ok(SolveReport {
        satisfiable,
        search,
        solutions,
        follow_up,
    })
}
