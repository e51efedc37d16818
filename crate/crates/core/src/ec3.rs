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

//! Exact cover (EC3) instances, clause energies and the brute-force oracle.
//!
//! An assignment `z₁z₂⋯zₙ` is encoded as an integer with `z₁` as the most
//! significant bit, so the string `00010111` has code 23. Every other module
//! indexes the register with this same code.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register the exhaustive routines will enumerate by default.
pub const DEFAULT_MAX_BITS: usize = 20;

/// Three distinct 1-based bit indices. Satisfied iff exactly one addressed bit is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause([usize; 3]);

impl Clause {
    pub fn indices(&self) -> [usize; 3] {
        self.0
    }

    /// Bit mask over assignment codes of width `n`.
    fn mask(&self, n: usize) -> u64 {
        self.0.iter().fold(0, |m, &i| m | 1 << (n - i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ec3Instance {
    n: usize,
    clauses: Vec<Clause>,
}

#[derive(Deserialize)]
struct RawInstance {
    n: i64,
    clauses: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct RawInstanceOut<'a> {
    n: usize,
    clauses: Vec<&'a [usize; 3]>,
}

impl Ec3Instance {
    /// Validates and builds an instance. Clause positions in errors are 1-based.
    pub fn new(n: usize, clauses: Vec<[usize; 3]>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInstance(format!("need n >= 3, got {n}")));
        }
        if n > 63 {
            return Err(Error::InvalidInstance(format!(
                "n = {n} does not fit a 64-bit code"
            )));
        }
        if clauses.is_empty() {
            return Err(Error::InvalidInstance("clause list is empty".into()));
        }
        for (pos, c) in clauses.iter().enumerate() {
            let clause = pos + 1;
            if let Some(&bad) = c.iter().find(|&&i| i < 1 || i > n) {
                return Err(Error::InvalidClause {
                    clause,
                    reason: format!("index {bad} out of range [1, {n}]"),
                });
            }
            if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
                return Err(Error::InvalidClause {
                    clause,
                    reason: format!("repeated index in {c:?}"),
                });
            }
        }
        Ok(Self {
            n,
            clauses: clauses.into_iter().map(Clause).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn to_json(&self) -> String {
        let raw = RawInstanceOut {
            n: self.n,
            clauses: self.clauses.iter().map(|c| &c.0).collect(),
        };
        serde_json::to_string(&raw).expect("instance serializes")
    }

    fn masks(&self) -> Vec<u64> {
        self.clauses.iter().map(|c| c.mask(self.n)).collect()
    }
}

/// Parses the JSON instance format `{"n": 8, "clauses": [[1,2,8], ...]}`.
pub fn parse_instance(text: &str) -> Result<Ec3Instance> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    if raw.n < 3 {
        return Err(Error::InvalidInstance(format!(
            "need n >= 3, got {}",
            raw.n
        )));
    }
    let n = raw.n as usize;
    let mut clauses = Vec::with_capacity(raw.clauses.len());
    for (pos, c) in raw.clauses.iter().enumerate() {
        let clause = pos + 1;
        if c.len() != 3 {
            return Err(Error::InvalidClause {
                clause,
                reason: format!("expected 3 indices, got {}", c.len()),
            });
        }
        let mut idx = [0usize; 3];
        for (slot, &v) in idx.iter_mut().zip(c) {
            if v < 1 || v as usize > n {
                return Err(Error::InvalidClause {
                    clause,
                    reason: format!("index {v} out of range [1, {n}]"),
                });
            }
            *slot = v as usize;
        }
        clauses.push(idx);
    }
    Ec3Instance::new(n, clauses)
}

/// A bit string `z₁⋯zₙ`, stored as its integer code (`z₁` most significant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n: usize,
    code: u64,
}

impl Assignment {
    pub fn from_code(n: usize, code: u64) -> Self {
        debug_assert!(n <= 63 && code < 1 << n);
        Self { n, code }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let code = bits
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1));
        Self {
            n: bits.len(),
            code,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// Value of `z_p` for a 1-based position `p`.
    pub fn bit(&self, p: usize) -> u8 {
        ((self.code >> (self.n - p)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.n).map(|p| self.bit(p)).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.n {
            f.write_str(if self.bit(p) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 63 {
            return Err(Error::Malformed(format!("bad bit string length: {s:?}")));
        }
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Malformed(format!("bad bit string: {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// 0 if exactly one of the three addressed bits is 1, otherwise 1.
pub fn clause_energy(clause: &Clause, a: &Assignment) -> u32 {
    let ones: u8 = clause.0.iter().map(|&i| a.bit(i)).sum();
    u32::from(ones != 1)
}

/// Number of violated clauses; the diagonal entry of the problem Hamiltonian.
pub fn problem_energy(inst: &Ec3Instance, a: &Assignment) -> u32 {
    inst.clauses.iter().map(|c| clause_energy(c, a)).sum()
}

#[inline]
fn masked_energy(masks: &[u64], code: u64) -> u32 {
    masks
        .iter()
        .map(|&m| u32::from((code & m).count_ones() != 1))
        .sum()
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Resource { what, n, cap });
    }
    Ok(())
}

/// Diagonal of the problem Hamiltonian, indexed by assignment code.
pub fn build_hp_diagonal(inst: &Ec3Instance) -> Result<Vec<u32>> {
    build_hp_diagonal_capped(inst, DEFAULT_MAX_BITS)
}

pub fn build_hp_diagonal_capped(inst: &Ec3Instance, max_bits: usize) -> Result<Vec<u32>> {
    check_cap("problem diagonal", inst.n, max_bits)?;
    let masks = inst.masks();
    Ok((0..1u64 << inst.n)
        .into_par_iter()
        .map(|code| masked_energy(&masks, code))
        .collect())
}

/// Output of the exhaustive classical oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumSummary {
    /// Energy level → number of assignments at that level.
    pub degeneracies: BTreeMap<u32, u64>,
    pub min_energy: u32,
    /// Assignments at `min_energy`, ascending by code.
    pub minimizers: Vec<Assignment>,
    pub num_clauses: usize,
}

impl SpectrumSummary {
    pub fn is_satisfiable(&self) -> bool {
        self.min_energy == 0
    }

    /// Number of satisfying assignments.
    pub fn solution_count(&self) -> u64 {
        self.degeneracies.get(&0).copied().unwrap_or(0)
    }

    /// Largest degeneracy among the nonzero levels, or 0 if there are none.
    pub fn max_excited_degeneracy(&self) -> u64 {
        self.degeneracies
            .iter()
            .filter(|(&e, _)| e > 0)
            .map(|(_, &m)| m)
            .max()
            .unwrap_or(0)
    }

    pub fn solutions(&self) -> &[Assignment] {
        if self.is_satisfiable() {
            &self.minimizers
        } else {
            &[]
        }
    }
}

struct Tally {
    counts: Vec<u64>,
    min: u32,
    minimizers: Vec<u64>,
}

impl Tally {
    fn new(levels: usize) -> Self {
        Self {
            counts: vec![0; levels],
            min: u32::MAX,
            minimizers: Vec::new(),
        }
    }

    fn push(&mut self, code: u64, e: u32) {
        self.counts[e as usize] += 1;
        if e < self.min {
            self.min = e;
            self.minimizers.clear();
        }
        if e == self.min {
            self.minimizers.push(code);
        }
    }

    // `other` covers a strictly later code range, keeping minimizers sorted.
    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        match self.min.cmp(&other.min) {
            std::cmp::Ordering::Less => {}
            std::cmp::Ordering::Greater => {
                self.min = other.min;
                self.minimizers = other.minimizers;
            }
            std::cmp::Ordering::Equal => self.minimizers.extend(other.minimizers),
        }
        self
    }
}

/// Enumerates all `2^n` assignments.
pub fn brute_force_solve(inst: &Ec3Instance) -> Result<SpectrumSummary> {
    brute_force_solve_capped(inst, DEFAULT_MAX_BITS)
}

pub fn brute_force_solve_capped(inst: &Ec3Instance, max_bits: usize) -> Result<SpectrumSummary> {
    check_cap("brute-force enumeration", inst.n, max_bits)?;
    let masks = inst.masks();
    let levels = inst.num_clauses() + 1;
    let total = 1u64 << inst.n;
    let chunk = 1u64 << 12;
    let chunks = total.div_ceil(chunk);

    // Chunks are folded in index order, so the result does not depend on scheduling.
    let tally = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut t = Tally::new(levels);
            for code in k * chunk..((k + 1) * chunk).min(total) {
                t.push(code, masked_energy(&masks, code));
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(Tally::merge)
        .expect("at least one chunk");

    let degeneracies = tally
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(e, &m)| (e as u32, m))
        .collect();
    Ok(SpectrumSummary {
        degeneracies,
        min_energy: tally.min,
        minimizers: tally
            .minimizers
            .into_iter()
            .map(|code| Assignment::from_code(inst.n, code))
            .collect(),
        num_clauses: inst.num_clauses(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE_I: &str = r#"{"n":8,"clauses":[[1,2,8],[2,3,6],[2,3,7],[2,4,5],[2,5,6],[3,5,8]]}"#;
    const CASE_II: &str = r#"{"n":8,"clauses":[[1,4,5],[1,7,8],[2,4,8],[2,7,8],[4,5,8],[5,6,7]]}"#;
    const CASE_III: &str = r#"{"n":8,"clauses":[[1,3,5],[1,6,8],[2,4,6],[2,6,8],[4,5,7]]}"#;
    const UNSAT4: &str = r#"{"n":4,"clauses":[[1,2,3],[1,2,4],[1,3,4],[2,3,4]]}"#;

    fn a(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    #[test]
    fn parses_case_i_in_order() {
        let inst = parse_instance(CASE_I).unwrap();
        assert_eq!(inst.n(), 8);
        assert_eq!(inst.num_clauses(), 6);
        assert_eq!(inst.clauses()[0].indices(), [1, 2, 8]);
        assert_eq!(inst.clauses()[5].indices(), [3, 5, 8]);
        assert_eq!(parse_instance(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn parses_minimal_instance() {
        let inst = parse_instance(r#"{"n":3,"clauses":[[1,2,3]]}"#).unwrap();
        assert_eq!(inst.n(), 3);
    }

    #[test]
    fn parse_errors_name_the_clause() {
        match parse_instance(r#"{"n":8,"clauses":[[1,1,2]]}"#) {
            Err(Error::InvalidClause { clause: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_instance(r#"{"n":8,"clauses":[[1,2,3],[0,2,3]]}"#) {
            Err(Error::InvalidClause { clause: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_instance(r#"{"n":8,"clauses":[[1,2,3],[4,5,6],[7,8,9]]}"#) {
            Err(Error::InvalidClause { clause: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_instance(r#"{"n":8,"clauses":[[1,2]]}"#) {
            Err(Error::InvalidClause { clause: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_instance(r#"{"n":2,"clauses":[[1,2,3]]}"#),
            Err(Error::InvalidInstance(_))
        ));
        assert!(matches!(
            parse_instance(r#"{"n":5,"clauses":[]}"#),
            Err(Error::InvalidInstance(_))
        ));
        assert!(matches!(
            parse_instance("{\"n\":5"),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(parse_instance("[]"), Err(Error::Malformed(_))));
    }

    #[test]
    fn duplicate_clauses_count_twice() {
        let inst = parse_instance(r#"{"n":3,"clauses":[[1,2,3],[1,2,3]]}"#).unwrap();
        assert_eq!(problem_energy(&inst, &a("000")), 2);
    }

    #[test]
    fn clause_energy_cases() {
        let c = Clause([1, 2, 8]);
        assert_eq!(clause_energy(&c, &a("00010111")), 0);
        let c = Clause([1, 2, 3]);
        assert_eq!(clause_energy(&c, &a("000")), 1);
        assert_eq!(clause_energy(&c, &a("111")), 1);
        assert_eq!(clause_energy(&c, &a("010")), 0);
        assert_eq!(clause_energy(&c, &a("110")), 1);
    }

    #[test]
    fn problem_energy_cases() {
        let i = parse_instance(CASE_I).unwrap();
        assert_eq!(problem_energy(&i, &a("00010111")), 0);
        assert_eq!(problem_energy(&i, &a("00000000")), 6);
        let ii = parse_instance(CASE_II).unwrap();
        assert_eq!(problem_energy(&ii, &a("00110010")), 0);
        assert_eq!(problem_energy(&ii, &a("00010010")), 0);
    }

    #[test]
    fn assignment_encoding_is_msb_first() {
        let s = a("00010111");
        assert_eq!(s.code(), 23);
        assert_eq!(s.bit(1), 0);
        assert_eq!(s.bit(4), 1);
        assert_eq!(s.bit(8), 1);
        assert_eq!(s.to_string(), "00010111");
        assert_eq!(Assignment::from_code(8, 23), s);
        assert_eq!(Assignment::from_bits(&s.bits()), s);
        assert!("0102".parse::<Assignment>().is_err());
    }

    #[test]
    fn hp_diagonal_single_clause() {
        let inst = parse_instance(r#"{"n":3,"clauses":[[1,2,3]]}"#).unwrap();
        assert_eq!(
            build_hp_diagonal(&inst).unwrap(),
            vec![1, 0, 0, 1, 0, 1, 1, 1]
        );
    }

    #[test]
    fn hp_diagonal_case_i_zero_only_at_solution() {
        let inst = parse_instance(CASE_I).unwrap();
        let d = build_hp_diagonal(&inst).unwrap();
        let zeros: Vec<usize> = (0..d.len()).filter(|&k| d[k] == 0).collect();
        assert_eq!(zeros, vec![23]);
    }

    #[test]
    fn resource_cap_is_enforced() {
        let inst = Ec3Instance::new(21, vec![[1, 2, 3]]).unwrap();
        assert!(matches!(
            build_hp_diagonal(&inst),
            Err(Error::Resource { n: 21, .. })
        ));
        assert!(matches!(
            brute_force_solve(&inst),
            Err(Error::Resource { .. })
        ));
        let small = Ec3Instance::new(6, vec![[1, 2, 3]]).unwrap();
        assert!(brute_force_solve_capped(&small, 5).is_err());
    }

    #[test]
    fn brute_force_case_iii() {
        let s = brute_force_solve(&parse_instance(CASE_III).unwrap()).unwrap();
        assert_eq!(s.min_energy, 0);
        let got: Vec<String> = s.minimizers.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, ["00001100", "00100110", "00110001", "11000010"]);
        assert_eq!(s.solution_count(), 4);
    }

    #[test]
    fn brute_force_case_ii_has_two() {
        let s = brute_force_solve(&parse_instance(CASE_II).unwrap()).unwrap();
        assert_eq!(s.degeneracies[&0], 2);
        let got: Vec<String> = s.minimizers.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, ["00010010", "00110010"]);
    }

    #[test]
    fn brute_force_unsat_four_bit() {
        let s = brute_force_solve(&parse_instance(UNSAT4).unwrap()).unwrap();
        assert_eq!(s.min_energy, 1);
        assert!(!s.is_satisfiable());
        assert!(s.solutions().is_empty());
        // One-hot strings violate only the clause that omits their set bit.
        let got: Vec<String> = s.minimizers.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, ["0001", "0010", "0100", "1000"]);
    }

    #[test]
    fn brute_force_matches_serial_enumeration_across_chunks() {
        // 14 bits spans several enumeration chunks.
        let inst = Ec3Instance::new(
            14,
            vec![
                [1, 2, 3],
                [4, 5, 6],
                [7, 8, 9],
                [10, 11, 12],
                [12, 13, 14],
                [1, 7, 14],
            ],
        )
        .unwrap();
        let s = brute_force_solve(&inst).unwrap();
        let mut counts = BTreeMap::new();
        let mut best = u32::MAX;
        let mut minimizers = Vec::new();
        for code in 0..1u64 << 14 {
            let e = problem_energy(&inst, &Assignment::from_code(14, code));
            *counts.entry(e).or_insert(0u64) += 1;
            if e < best {
                best = e;
                minimizers.clear();
            }
            if e == best {
                minimizers.push(Assignment::from_code(14, code));
            }
        }
        assert_eq!(s.degeneracies, counts);
        assert_eq!(s.min_energy, best);
        assert_eq!(s.minimizers, minimizers);
    }
}
