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

//! Time evolution under the probe-coupled Hamiltonian.
//!
//! Two families of propagators live here: exact ones (dense
//! eigendecomposition for small registers, restarted Lanczos above that) and
//! the split-operator product of a diagonal phase step and a coupling step.

mod eig;
mod krylov;

pub use eig::EigenPropagator;
pub use krylov::expm_krylov;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{apply_full_h_into, state_index, HamiltonianParams, QuantumState, C64};

/// State dimension up to which the exact propagator uses the dense eigendecomposition.
pub const EIG_MAX_DIM: usize = 4096;

/// Auto-selection stops once the decay probability moves less than this between `L` and `2L`.
pub const AUTO_L_TOLERANCE: f64 = 1e-3;
pub const AUTO_L_START: usize = 16;
pub const AUTO_L_MAX: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Eigendecomposition up to [`EIG_MAX_DIM`], Krylov above.
    Exact,
    ExactEig,
    ExactKrylov,
    Trotter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrotterSteps {
    Fixed(usize),
    /// Doubling search, see [`propagate_trotter_auto`].
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Splitting {
    /// Diagonal step then coupling step, repeated `L` times.
    #[default]
    FirstOrder,
    /// Symmetric half-step variant. Off unless requested.
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingImpl {
    /// Hadamard conjugation around a conditional phase.
    #[default]
    Circuit,
    /// Closed-form exponential of the rank-2 coupling.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSpec {
    pub method: Method,
    pub trotter_steps: TrotterSteps,
    pub krylov_dim: usize,
    pub tolerance: f64,
    pub splitting: Splitting,
    pub coupling: CouplingImpl,
}

impl Default for PropagatorSpec {
    fn default() -> Self {
        Self {
            method: Method::Exact,
            trotter_steps: TrotterSteps::Auto,
            krylov_dim: 30,
            tolerance: 1e-10,
            splitting: Splitting::FirstOrder,
            coupling: CouplingImpl::Circuit,
        }
    }
}

impl PropagatorSpec {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn trotter(steps: usize) -> Self {
        Self {
            method: Method::Trotter,
            trotter_steps: TrotterSteps::Fixed(steps),
            ..Self::default()
        }
    }

    pub fn trotter_auto() -> Self {
        Self {
            method: Method::Trotter,
            trotter_steps: TrotterSteps::Auto,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let TrotterSteps::Fixed(0) = self.trotter_steps {
            return Err(Error::InvalidParameter("trotter steps must be >= 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must lie in (0, 1), got {}",
                self.tolerance
            )));
        }
        if self.krylov_dim < 2 {
            return Err(Error::InvalidParameter(
                "krylov dimension must be >= 2".into(),
            ));
        }
        Ok(())
    }
}

fn check_shape(p: &HamiltonianParams, psi: &QuantumState) -> Result<()> {
    if psi.n() != p.n() {
        return Err(Error::ShapeMismatch {
            expected: p.dim(),
            actual: psi.dim(),
        });
    }
    Ok(())
}

fn check_time(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "evolution time must be >= 0, got {tau}"
        )));
    }
    Ok(())
}

fn diagonal_phases(p: &HamiltonianParams, dt: f64) -> Vec<C64> {
    (0..p.dim())
        .map(|i| Complex64::from_polar(1.0, -p.diagonal_entry(i) * dt))
        .collect()
}

/// `exp(−i(½ωσ_z + H̃)dt)`, a pure phase per basis state.
pub fn diagonal_step(p: &HamiltonianParams, psi: &QuantumState, dt: f64) -> Result<QuantumState> {
    check_shape(p, psi)?;
    let mut out = psi.clone();
    for (a, ph) in out.amplitudes_mut().iter_mut().zip(diagonal_phases(p, dt)) {
        *a *= ph;
    }
    Ok(out)
}

/// In-place normalized Walsh–Hadamard transform (Hadamard on every qubit).
pub(crate) fn hadamard_all(v: &mut [C64]) {
    let len = v.len();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = (a + b) * s;
                *y = (a - b) * s;
            }
        }
        h *= 2;
    }
}

fn coupling_angle(p: &HamiltonianParams, dt: f64) -> f64 {
    p.c() * (p.n() as f64 / 2.0).exp2() * dt
}

fn coupling_circuit_in_place(p: &HamiltonianParams, v: &mut [C64], dt: f64) {
    let n = p.n();
    let theta = coupling_angle(p, dt);
    hadamard_all(v);
    // Rotated generator: c·2^(n/2) σ_z ⊗ σ_z ⊗ |0⟩⟨0|^⊗n.
    for probe in 0..2 {
        for ancilla in 0..2 {
            let sign = if probe == ancilla { 1.0 } else { -1.0 };
            v[state_index(n, probe, ancilla, 0)] *= Complex64::from_polar(1.0, -theta * sign);
        }
    }
    hadamard_all(v);
}

fn coupling_direct_in_place(p: &HamiltonianParams, v: &mut [C64], dt: f64) {
    let n = p.n();
    let block = 1usize << n;
    let theta = coupling_angle(p, dt);
    let norm = (-(n as f64) / 2.0).exp2();
    // Overlap of each (probe, ancilla) block with |+⟩^⊗n.
    let s: Vec<C64> = v
        .chunks_exact(block)
        .map(|b| b.iter().sum::<C64>() * norm)
        .collect();
    let (cos, sin) = (theta.cos(), theta.sin());
    for (k, b) in v.chunks_exact_mut(block).enumerate() {
        // σ_x ⊗ σ_x maps block (p, a) to (1−p, 1−a), i.e. k → 3 − k.
        let shift = (s[k] * (cos - 1.0) - C64::new(0.0, sin) * s[3 - k]) * norm;
        for x in b {
            *x += shift;
        }
    }
}

/// `exp(−i c σ_x⊗A dt)` through the Hadamard-conjugated conditional phase.
pub fn coupling_step(p: &HamiltonianParams, psi: &QuantumState, dt: f64) -> Result<QuantumState> {
    check_shape(p, psi)?;
    let mut out = psi.clone();
    coupling_circuit_in_place(p, out.amplitudes_mut(), dt);
    Ok(out)
}

/// Same unitary as [`coupling_step`], evaluated from
/// `exp(−iθB) = I + (cos θ − 1)P − i sin θ B` with `B² = P`.
pub fn coupling_step_direct(
    p: &HamiltonianParams,
    psi: &QuantumState,
    dt: f64,
) -> Result<QuantumState> {
    check_shape(p, psi)?;
    let mut out = psi.clone();
    coupling_direct_in_place(p, out.amplitudes_mut(), dt);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrotterConfig {
    pub splitting: Splitting,
    pub coupling: CouplingImpl,
}

/// Rough elementary-gate count of one coupling step once the multi-controlled
/// phases are decomposed: `2(n+2)` Hadamards plus quadratic-size controlled gates.
pub fn coupling_step_gate_estimate(n: usize) -> usize {
    2 * (n + 2) + 2 * (n + 1) * (n + 1)
}

/// `L` repetitions of the diagonal step followed by the coupling step.
pub fn propagate_trotter(
    p: &HamiltonianParams,
    psi: &QuantumState,
    tau: f64,
    steps: usize,
) -> Result<QuantumState> {
    propagate_trotter_with(p, psi, tau, steps, TrotterConfig::default())
}

pub fn propagate_trotter_with(
    p: &HamiltonianParams,
    psi: &QuantumState,
    tau: f64,
    steps: usize,
    cfg: TrotterConfig,
) -> Result<QuantumState> {
    check_shape(p, psi)?;
    check_time(tau)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("trotter steps must be >= 1".into()));
    }
    log::debug!(
        "trotter: L = {steps}, ~{} elementary gates per coupling step",
        coupling_step_gate_estimate(p.n())
    );
    let dt = tau / steps as f64;
    let coupling = |v: &mut [C64]| match cfg.coupling {
        CouplingImpl::Circuit => coupling_circuit_in_place(p, v, dt),
        CouplingImpl::Direct => coupling_direct_in_place(p, v, dt),
    };
    let mut out = psi.clone();
    let v = out.amplitudes_mut();
    match cfg.splitting {
        Splitting::FirstOrder => {
            let phases = diagonal_phases(p, dt);
            for _ in 0..steps {
                v.iter_mut().zip(&phases).for_each(|(a, ph)| *a *= ph);
                coupling(v);
            }
        }
        Splitting::Strang => {
            let half = diagonal_phases(p, dt / 2.0);
            for _ in 0..steps {
                v.iter_mut().zip(&half).for_each(|(a, ph)| *a *= ph);
                coupling(v);
                v.iter_mut().zip(&half).for_each(|(a, ph)| *a *= ph);
            }
        }
    }
    Ok(out)
}

/// Smallest power of two `≥ AUTO_L_START` keeping every diagonal phase
/// difference per step below `π`. Coarser steps alias off-resonant levels
/// onto the resonance and can look converged while being far off.
pub fn auto_start_steps(p: &HamiltonianParams, tau: f64) -> usize {
    let (lo, hi) = (0..p.dim())
        .map(|i| p.diagonal_entry(i))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e), hi.max(e))
        });
    let floor = (tau * (hi - lo) / std::f64::consts::PI).ceil();
    if floor >= AUTO_L_MAX as f64 {
        return AUTO_L_MAX;
    }
    (floor as usize).max(AUTO_L_START).next_power_of_two()
}

/// Doubles `L` from [`auto_start_steps`] until the probe-decay probability changes
/// by less than [`AUTO_L_TOLERANCE`] between `L` and `2L`. Returns the state
/// at the finer step count together with that count.
pub fn propagate_trotter_auto(
    p: &HamiltonianParams,
    psi: &QuantumState,
    tau: f64,
    cfg: TrotterConfig,
) -> Result<(QuantumState, usize)> {
    let mut steps = auto_start_steps(p, tau);
    let mut prev = propagate_trotter_with(p, psi, tau, steps, cfg)?;
    loop {
        let next_steps = steps * 2;
        let next = propagate_trotter_with(p, psi, tau, next_steps, cfg)?;
        let change = (next.probe_zero_probability() - prev.probe_zero_probability()).abs();
        if change < AUTO_L_TOLERANCE {
            log::info!("trotter auto-selection: L = {next_steps} (change {change:.2e})");
            return Ok((next, next_steps));
        }
        if next_steps >= AUTO_L_MAX {
            return Err(Error::Numerical {
                message: format!("trotter step search did not settle by L = {next_steps}"),
                residual: change,
            });
        }
        steps = next_steps;
        prev = next;
    }
}

/// A propagator prepared for one Hamiltonian, reusable across evolution times.
pub struct Propagator {
    params: HamiltonianParams,
    spec: PropagatorSpec,
    eig: Option<EigenPropagator>,
}

/// Result of [`Propagator::evolve`].
#[derive(Debug, Clone)]
pub struct Evolved {
    pub state: QuantumState,
    /// Trotter step count used, when the method is Trotter.
    pub trotter_steps: Option<usize>,
}

impl Propagator {
    pub fn new(params: HamiltonianParams, spec: PropagatorSpec) -> Result<Self> {
        spec.validate()?;
        let use_eig = match spec.method {
            Method::Exact => params.dim() <= EIG_MAX_DIM,
            Method::ExactEig => true,
            Method::ExactKrylov | Method::Trotter => false,
        };
        let eig = if use_eig {
            Some(EigenPropagator::new(&params)?)
        } else {
            None
        };
        Ok(Self { params, spec, eig })
    }

    pub fn params(&self) -> &HamiltonianParams {
        &self.params
    }

    pub fn spec(&self) -> &PropagatorSpec {
        &self.spec
    }

    pub fn evolve(&self, psi: &QuantumState, tau: f64) -> Result<Evolved> {
        check_shape(&self.params, psi)?;
        check_time(tau)?;
        if tau == 0.0 && self.spec.method != Method::Trotter {
            return Ok(Evolved {
                state: psi.clone(),
                trotter_steps: None,
            });
        }
        if let Some(eig) = &self.eig {
            return Ok(Evolved {
                state: eig.evolve(psi, tau)?,
                trotter_steps: None,
            });
        }
        let cfg = TrotterConfig {
            splitting: self.spec.splitting,
            coupling: self.spec.coupling,
        };
        match self.spec.method {
            Method::Trotter => match self.spec.trotter_steps {
                TrotterSteps::Fixed(steps) => Ok(Evolved {
                    state: propagate_trotter_with(&self.params, psi, tau, steps, cfg)?,
                    trotter_steps: Some(steps),
                }),
                TrotterSteps::Auto => {
                    let (state, steps) = propagate_trotter_auto(&self.params, psi, tau, cfg)?;
                    Ok(Evolved {
                        state,
                        trotter_steps: Some(steps),
                    })
                }
            },
            _ => {
                let p = &self.params;
                let amps = expm_krylov(
                    |x, y| apply_full_h_into(p, x, y),
                    psi.amplitudes(),
                    tau,
                    self.spec.krylov_dim,
                    self.spec.tolerance,
                )?;
                Ok(Evolved {
                    state: QuantumState::from_amplitudes(psi.n(), amps)?,
                    trotter_steps: None,
                })
            }
        }
    }
}

/// `exp(−iHτ)ψ`: dense eigendecomposition up to [`EIG_MAX_DIM`], Krylov above.
pub fn propagate_exact(
    p: &HamiltonianParams,
    psi: &QuantumState,
    tau: f64,
) -> Result<QuantumState> {
    Ok(Propagator::new(p.clone(), PropagatorSpec::exact())?
        .evolve(psi, tau)?
        .state)
}
