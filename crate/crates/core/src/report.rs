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

//! Output formats: CSV sweep tables and the per-run JSON result document.
//!
//! Floats are written with 12 significant digits, `.` as the decimal
//! separator and LF line endings, so identical inputs give identical bytes.

use std::fmt::Write;

use serde::Serialize;

use crate::ec3::Ec3Instance;
use crate::evolution::{Method, PropagatorSpec, TrotterSteps};
use crate::experiment::{AnalyticPrediction, OmegaSweep, SimulationParams, TauSweep};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`-style formatting: fixed notation for exponents in `[-4, 12)`,
/// scientific otherwise, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to the printed precision so JSON and CSV agree.
pub fn round_sig(x: f64) -> f64 {
    fmt_float(x).parse().unwrap_or(x)
}

pub fn tau_sweep_csv(sweep: &TauSweep) -> String {
    let mut out = String::from("tau,p_decay,p_analytic,abs_err\n");
    for r in &sweep.rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_float(r.tau),
            fmt_float(r.p_decay),
            fmt_float(r.p_analytic),
            fmt_float(r.abs_err())
        )
        .expect("write to string");
    }
    out
}

pub fn omega_sweep_csv(sweep: &OmegaSweep) -> String {
    let mut out = String::from("omega,tau,p_decay\n");
    for r in &sweep.rows {
        writeln!(
            out,
            "{},{},{}",
            fmt_float(r.omega),
            fmt_float(r.tau),
            fmt_float(r.p_decay)
        )
        .expect("write to string");
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsDoc {
    pub n: usize,
    pub num_clauses: usize,
    pub omega: f64,
    pub c: f64,
    pub tau: f64,
    pub method: &'static str,
    pub trotter_steps: Option<usize>,
}

impl ParamsDoc {
    pub fn new(inst: &Ec3Instance, sp: &SimulationParams, tau: f64) -> Self {
        Self {
            n: inst.n(),
            num_clauses: inst.num_clauses(),
            omega: round_sig(sp.omega),
            c: round_sig(sp.c),
            tau: round_sig(tau),
            method: method_name(&sp.propagator),
            trotter_steps: match (sp.propagator.method, sp.propagator.trotter_steps) {
                (Method::Trotter, TrotterSteps::Fixed(l)) => Some(l),
                _ => None,
            },
        }
    }
}

pub fn method_name(spec: &PropagatorSpec) -> &'static str {
    match spec.method {
        Method::Exact => "exact",
        Method::ExactEig => "exact_eig",
        Method::ExactKrylov => "exact_krylov",
        Method::Trotter => "trotter",
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalyticsDoc {
    pub q01: f64,
    pub err_bound: f64,
    pub optimal_tau: f64,
}

impl From<&AnalyticPrediction> for AnalyticsDoc {
    fn from(a: &AnalyticPrediction) -> Self {
        Self {
            q01: round_sig(a.q01),
            err_bound: round_sig(a.err_bound),
            optimal_tau: round_sig(a.optimal_tau),
        }
    }
}

/// `{"params", "satisfiable", "p_decay", "chosen_L", "solutions", "analytics"}`.
/// `analytics` is null when the instance has no satisfying assignment.
#[derive(Debug, Clone, Serialize)]
pub struct ResultDoc {
    pub params: ParamsDoc,
    pub satisfiable: bool,
    pub p_decay: f64,
    #[serde(rename = "chosen_L")]
    pub chosen_l: Option<usize>,
    pub solutions: Vec<String>,
    pub analytics: Option<AnalyticsDoc>,
}

impl ResultDoc {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }
}
