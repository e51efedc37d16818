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

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{inner, norm, C64, ZERO};

/// Cap on accepted plus rejected sub-steps in one call.
const MAX_SUBSTEPS: usize = 200_000;

/// `exp(−iHτ)v` for Hermitian `H` given as a matrix-free action `apply(x, y)`
/// writing `H·x` into `y`.
///
/// Restarted Lanczos with full reorthogonalization. Each restart builds an
/// `m`-dimensional Krylov basis and advances by the longest sub-step whose
/// a-posteriori error estimate `β₀ β_m |[e^{−iTh} e₁]_m|` stays below `tol`.
pub fn expm_krylov<F>(apply: F, v: &[C64], tau: f64, m: usize, tol: f64) -> Result<Vec<C64>>
where
    F: Fn(&[C64], &mut [C64]),
{
    let dim = v.len();
    let mut w = v.to_vec();
    let mut done = 0.0;
    let mut h_trial = tau;
    let mut substeps = 0;
    while done < tau {
        let beta0 = norm(&w);
        if beta0 == 0.0 {
            break;
        }
        let basis = lanczos(&apply, &w, beta0, m.min(dim));
        let k = basis.alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for j in 0..k {
            t[(j, j)] = basis.alpha[j];
            if j + 1 < k {
                t[(j, j + 1)] = basis.beta[j];
                t[(j + 1, j)] = basis.beta[j];
            }
        }
        let eig = SymmetricEigen::new(t);
        let remaining = tau - done;
        let mut h = h_trial.min(remaining);
        let (y, err) = loop {
            substeps += 1;
            let y = small_expm_e1(&eig, h);
            let err = if basis.invariant {
                0.0
            } else {
                beta0 * basis.beta_next * y[k - 1].norm()
            };
            if err <= tol {
                break (y, err);
            }
            if substeps > MAX_SUBSTEPS || h < tau * 1e-14 {
                return Err(Error::Numerical {
                    message: format!("krylov expm stalled at t = {done:.6} of {tau:.6}"),
                    residual: err,
                });
            }
            h *= 0.5;
        };
        log::trace!("krylov sub-step h = {h:.4e}, err = {err:.2e}");
        let mut next = vec![ZERO; dim];
        for (coef, q) in y.iter().zip(&basis.vectors) {
            let s = coef * beta0;
            next.iter_mut().zip(q).for_each(|(a, b)| *a += s * b);
        }
        w = next;
        done = if basis.invariant || h >= remaining {
            tau
        } else {
            done + h
        };
        h_trial = 2.0 * h;
    }
    Ok(w)
}

struct LanczosBasis {
    vectors: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    beta_next: f64,
    invariant: bool,
}

fn lanczos<F>(apply: &F, w: &[C64], beta0: f64, m: usize) -> LanczosBasis
where
    F: Fn(&[C64], &mut [C64]),
{
    let dim = w.len();
    let mut vectors: Vec<Vec<C64>> = vec![w.iter().map(|x| x / beta0).collect()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut r = vec![ZERO; dim];
    for j in 0..m {
        apply(&vectors[j], &mut r);
        alpha.push(inner(&vectors[j], &r).re);
        // Two Gram–Schmidt passes against the whole basis.
        for _ in 0..2 {
            for q in &vectors {
                let proj = inner(q, &r);
                r.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
            }
        }
        let b = norm(&r);
        let scale = alpha.iter().fold(1.0f64, |acc, a| acc.max(a.abs()));
        if b <= 1e-12 * scale {
            return LanczosBasis {
                vectors,
                alpha,
                beta,
                beta_next: 0.0,
                invariant: true,
            };
        }
        if j + 1 == m {
            return LanczosBasis {
                vectors,
                alpha,
                beta,
                beta_next: b,
                invariant: false,
            };
        }
        beta.push(b);
        vectors.push(r.iter().map(|x| x / b).collect());
    }
    unreachable!("loop returns on its last iteration")
}

/// `exp(−iTh) e₁` from a cached eigendecomposition of the tridiagonal `T`.
fn small_expm_e1(eig: &SymmetricEigen<f64, nalgebra::Dyn>, h: f64) -> Vec<C64> {
    let q = &eig.eigenvectors;
    let k = q.nrows();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    q[(i, j)] * q[(0, j)] * Complex64::from_polar(1.0, -eig.eigenvalues[j] * h)
                })
                .sum()
        })
        .collect()
}
