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

//! Dense matrix assembly for small registers. These routines build the
//! operators from Kronecker products and explicit term sums, independently of
//! the matrix-free actions, and serve as oracles and as the basis of the
//! eigendecomposition propagator.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::operators::{HamiltonianParams, C64, ZERO};

/// Largest register size for which full-state dense matrices are assembled
/// (state dimension `2^(n+2)` = 4096).
pub const DENSE_MAX_BITS: usize = 10;

fn sigma_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

fn kron_all(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    factors
        .iter()
        .fold(DMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// `σ_x ⊗ [(I₂ + σ_x)/√2]^⊗n`, assembled by Kronecker products.
pub fn excitation_tensor_form(n: usize) -> DMatrix<f64> {
    let factor = (DMatrix::identity(2, 2) + sigma_x()) * std::f64::consts::FRAC_1_SQRT_2;
    let mut factors = vec![sigma_x()];
    factors.extend(std::iter::repeat_n(factor, n));
    kron_all(&factors)
}

/// `(1/√N) Σ_k A_k` where the `N = 2^n` terms are `σ_x` on the ancilla times
/// `σ_x` on every subset of the register qubits.
pub fn excitation_sum_form(n: usize) -> DMatrix<f64> {
    let block = 1usize << n;
    let dim = 2 * block;
    let scale = (block as f64).sqrt().recip();
    let mut m = DMatrix::zeros(dim, dim);
    for subset in 0..block {
        // A_k |a, z⟩ = |1−a, z ⊕ subset⟩
        for a in 0..2 {
            for z in 0..block {
                let col = a * block + z;
                let row = (1 - a) * block + (z ^ subset);
                m[(row, col)] += scale;
            }
        }
    }
    m
}

fn check_dense(n: usize) -> Result<()> {
    if n > DENSE_MAX_BITS {
        return Err(Error::Resource {
            what: "dense assembly",
            n,
            cap: DENSE_MAX_BITS,
        });
    }
    Ok(())
}

/// `½ωσ_z ⊗ I + I ⊗ H̃`, as a dense diagonal matrix.
pub fn diagonal_part(p: &HamiltonianParams) -> Result<DMatrix<f64>> {
    check_dense(p.n())?;
    let probe = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        p.probe_energy(0),
        p.probe_energy(1),
    ]));
    let htilde = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(p.htilde().values()));
    let reg_dim = htilde.nrows();
    Ok(probe.kronecker(&DMatrix::identity(reg_dim, reg_dim))
        + DMatrix::identity(2, 2).kronecker(&htilde))
}

/// `c σ_x ⊗ A`.
pub fn coupling_part(p: &HamiltonianParams) -> Result<DMatrix<f64>> {
    check_dense(p.n())?;
    Ok(sigma_x().kronecker(&excitation_tensor_form(p.n())) * p.c())
}

pub fn hamiltonian(p: &HamiltonianParams) -> Result<DMatrix<f64>> {
    Ok(diagonal_part(p)? + coupling_part(p)?)
}

/// `exp(−i H t)` for a real symmetric `H`.
pub fn expm_minus_i(h: &DMatrix<f64>, t: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
    let phases = eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * t));
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * phases[j]);
    scaled * v.transpose()
}

pub fn matvec_real(m: &DMatrix<f64>, v: &[C64]) -> Vec<C64> {
    assert_eq!(m.ncols(), v.len());
    (0..m.nrows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .fold(ZERO, |acc, (&a, &x)| acc + x * a)
        })
        .collect()
}

pub fn matvec_complex(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    assert_eq!(m.ncols(), v.len());
    (0..m.nrows())
        .map(|i| m.row(i).iter().zip(v).fold(ZERO, |acc, (a, x)| acc + a * x))
        .collect()
}
