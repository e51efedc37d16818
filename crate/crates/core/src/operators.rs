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

//! Matrix-free actions of the block register Hamiltonian, the excitation
//! operator and the full probe-coupled Hamiltonian.
//!
//! State layout: qubits ordered probe, ancilla, `z₁ … zₙ` from most to least
//! significant, so amplitude index = `probe << (n+1) | ancilla << n | code`.
//! The probe term assigns `+ω/2` to probe `|1⟩` and `−ω/2` to probe `|0⟩`.

use num_complex::Complex64;

use crate::ec3::{build_hp_diagonal, Ec3Instance};
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

#[inline]
pub fn state_index(n: usize, probe: usize, ancilla: usize, code: u64) -> usize {
    (probe << (n + 1)) | (ancilla << n) | code as usize
}

/// Normalized amplitudes over probe ⊗ ancilla ⊗ register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amps: Vec<C64>,
}

impl QuantumState {
    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        let expected = 1usize << (n + 2);
        if amps.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << (n + 2)];
        amps[index] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// Total probability of measuring the probe in `|0⟩`.
    pub fn probe_zero_probability(&self) -> f64 {
        self.amps[..self.amps.len() / 2]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.amps, &other.amps)
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u|v⟩`, conjugating the left argument.
pub(crate) fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn max_abs_diff(u: &[C64], v: &[C64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Diagonal of the register Hamiltonian: `−1` on the ancilla-0 block, the
/// problem energies on the ancilla-1 block.
#[derive(Debug, Clone, PartialEq)]
pub struct HtildeDiagonal {
    n: usize,
    values: Vec<f64>,
    num_clauses: usize,
}

impl HtildeDiagonal {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_clauses(&self) -> usize {
        self.num_clauses
    }

    /// The ancilla-1 block, i.e. the problem-Hamiltonian diagonal.
    pub fn problem_block(&self) -> &[f64] {
        &self.values[1 << self.n..]
    }
}

pub fn build_htilde(inst: &Ec3Instance) -> Result<HtildeDiagonal> {
    let hp = build_hp_diagonal(inst)?;
    let mut values = vec![-1.0; hp.len()];
    values.extend(hp.iter().map(|&e| f64::from(e)));
    Ok(HtildeDiagonal {
        n: inst.n(),
        values,
        num_clauses: inst.num_clauses(),
    })
}

#[derive(Debug, Clone)]
pub struct HamiltonianParams {
    omega: f64,
    c: f64,
    htilde: HtildeDiagonal,
    skew_coupling: bool,
}

impl HamiltonianParams {
    pub fn new(omega: f64, c: f64, htilde: HtildeDiagonal) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be > 0, got {c}")));
        }
        Ok(Self {
            omega,
            c,
            htilde,
            skew_coupling: false,
        })
    }

    /// Negative control for the verification suite: flips the sign of the
    /// probe `0 → 1` half of the coupling, which breaks Hermiticity.
    #[doc(hidden)]
    pub fn with_skewed_coupling(mut self) -> Self {
        self.skew_coupling = true;
        self
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n(&self) -> usize {
        self.htilde.n
    }

    pub fn dim(&self) -> usize {
        1 << (self.htilde.n + 2)
    }

    pub fn htilde(&self) -> &HtildeDiagonal {
        &self.htilde
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        let mut p = Self::new(omega, self.c, self.htilde.clone())?;
        p.skew_coupling = self.skew_coupling;
        Ok(p)
    }

    /// `+ω/2` for probe `|1⟩`, `−ω/2` for probe `|0⟩`.
    #[inline]
    pub fn probe_energy(&self, probe: usize) -> f64 {
        if probe == 1 {
            0.5 * self.omega
        } else {
            -0.5 * self.omega
        }
    }

    /// Diagonal entry of `½ωσ_z ⊗ I + I ⊗ H̃` at a full-state index.
    #[inline]
    pub fn diagonal_entry(&self, index: usize) -> f64 {
        let half = self.htilde.values.len();
        self.probe_energy(index / half) + self.htilde.values[index % half]
    }
}

/// Applies `A = σ_x ⊗ [(I + σ_x)/√2]^⊗n` to a vector over ancilla ⊗ register.
///
/// `(I + σ_x)/√2 = √2 |+⟩⟨+|`, so `A = 2^(n/2) σ_x ⊗ |+⟩⟨+|^⊗n` has rank 2:
/// each ancilla block is summed, scaled by `2^(-n/2)` and broadcast into the
/// opposite block.
pub fn apply_excitation(n: usize, v: &[C64]) -> Result<Vec<C64>> {
    let expected = 1usize << (n + 1);
    if v.len() != expected {
        return Err(Error::ShapeMismatch {
            expected,
            actual: v.len(),
        });
    }
    let mut out = vec![ZERO; expected];
    excitation_into(n, v, &mut out, C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    Ok(out)
}

/// `out[1-a] += scale_a · 2^(-n/2) Σ_z v[a, z]` for each ancilla value `a`.
#[inline]
fn excitation_into(n: usize, v: &[C64], out: &mut [C64], scale0: C64, scale1: C64) {
    let block = 1usize << n;
    let norm = (-(n as f64) / 2.0).exp2();
    let s0: C64 = v[..block].iter().sum::<C64>() * norm * scale0;
    let s1: C64 = v[block..].iter().sum::<C64>() * norm * scale1;
    for x in &mut out[block..] {
        *x += s0;
    }
    for x in &mut out[..block] {
        *x += s1;
    }
}

/// `H·ψ` for `H = ½ωσ_z ⊗ I + I ⊗ H̃ + c σ_x ⊗ A`.
pub fn apply_full_h(p: &HamiltonianParams, psi: &QuantumState) -> Result<Vec<C64>> {
    if psi.n != p.n() {
        return Err(Error::ShapeMismatch {
            expected: p.dim(),
            actual: psi.dim(),
        });
    }
    let mut out = vec![ZERO; p.dim()];
    apply_full_h_into(p, &psi.amps, &mut out);
    Ok(out)
}

/// Slice form of [`apply_full_h`]; `out` is overwritten.
pub(crate) fn apply_full_h_into(p: &HamiltonianParams, v: &[C64], out: &mut [C64]) {
    let n = p.n();
    let half = 1usize << (n + 1);
    debug_assert_eq!(v.len(), 2 * half);
    for (i, (o, x)) in out.iter_mut().zip(v).enumerate() {
        *o = x * p.diagonal_entry(i);
    }
    let c = C64::new(p.c, 0.0);
    let (lo_in, hi_in) = v.split_at(half);
    let (lo_out, hi_out) = out.split_at_mut(half);
    // σ_x on the probe: the probe-0 block feeds the probe-1 output and back.
    let up = if p.skew_coupling { -c } else { c };
    excitation_into(n, lo_in, hi_out, up, up);
    excitation_into(n, hi_in, lo_out, c, c);
}

/// Probe `|1⟩`, ancilla `|0⟩`, register in the uniform superposition.
pub fn prepare_reference(n: usize) -> Result<QuantumState> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
    }
    let mut amps = vec![ZERO; 1 << (n + 2)];
    let amp = C64::new((-(n as f64) / 2.0).exp2(), 0.0);
    let start = state_index(n, 1, 0, 0);
    amps[start..start + (1 << n)].fill(amp);
    Ok(QuantumState { n, amps })
}
