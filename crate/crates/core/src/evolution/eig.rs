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

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::dense;
use crate::error::{Error, Result};
use crate::operators::{HamiltonianParams, QuantumState, C64};

/// Cached eigendecomposition `H = V Λ Vᵀ` of the (real symmetric) dense
/// Hamiltonian. Building it is the expensive part; each evolution afterwards
/// is two dense matrix-vector products.
pub struct EigenPropagator {
    n: usize,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl EigenPropagator {
    pub fn new(p: &HamiltonianParams) -> Result<Self> {
        let h = dense::hamiltonian(p)?;
        let eig = SymmetricEigen::new(h);
        if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical {
                message: "eigendecomposition produced non-finite values".into(),
                residual: f64::NAN,
            });
        }
        Ok(Self {
            n: p.n(),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn evolve(&self, psi: &QuantumState, tau: f64) -> Result<QuantumState> {
        let dim = self.eigenvalues.len();
        if psi.dim() != dim {
            return Err(Error::ShapeMismatch {
                expected: dim,
                actual: psi.dim(),
            });
        }
        let re = DVector::from_iterator(dim, psi.amplitudes().iter().map(|a| a.re));
        let im = DVector::from_iterator(dim, psi.amplitudes().iter().map(|a| a.im));
        let v = &self.eigenvectors;
        let mut cr = v.tr_mul(&re);
        let mut ci = v.tr_mul(&im);
        for k in 0..dim {
            let rot = Complex64::from_polar(1.0, -self.eigenvalues[k] * tau);
            let z = C64::new(cr[k], ci[k]) * rot;
            cr[k] = z.re;
            ci[k] = z.im;
        }
        let out_re = v * cr;
        let out_im = v * ci;
        let amps = out_re
            .iter()
            .zip(out_im.iter())
            .map(|(&r, &i)| C64::new(r, i))
            .collect();
        QuantumState::from_amplitudes(self.n, amps)
    }
}
