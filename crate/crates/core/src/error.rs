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

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance document: {0}")]
    Malformed(String),

    #[error("clause {clause}: {reason}")]
    InvalidClause { clause: usize, reason: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested size would exceed the configured memory cap.
    #[error("resource limit: {what} needs n = {n} but the cap is {cap}")]
    Resource {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("shape mismatch: expected length {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    /// The analytic model has no resonant channel (zero satisfying assignments).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {message} (residual {residual:.3e})")]
    Numerical { message: String, residual: f64 },

    #[error("no probe decay to condition on (p_decay = {0:.3e})")]
    NoDecay(f64),

    #[error("grid point {index}: {source}")]
    GridPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}
