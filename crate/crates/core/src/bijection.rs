//! The map between S (one 123, no 132) and T (one 132, no 123) that swaps
//! the values `b` and `c` of the unique occurrence `abc`.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::census::{for_each_in_shard, map_shards, CensusConfig, CensusError, CountVectorKernel};
use crate::count::{avoids, find_occurrences};
use crate::formulas::theorem1_closed;
use crate::perm::{Occurrence, Pattern, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BijectionError {
    #[error("{perm} has no occurrence of {pattern}")]
    NoOccurrence { perm: String, pattern: String },
    #[error("{perm} has more than one occurrence of {pattern}, e.g. at {first:?} and {second:?}")]
    AmbiguousOccurrence { perm: String, pattern: String, first: Vec<usize>, second: Vec<usize> },
    #[error("{perm} is outside the domain: {check}")]
    NotInDomain { perm: String, check: String },
    #[error("locate_unique needs a pattern of length 3, got {0}")]
    NotATriple(String),
}

fn p123() -> Pattern {
    Pattern::from_vec_unchecked(vec![1, 2, 3])
}

fn p132() -> Pattern {
    Pattern::from_vec_unchecked(vec![1, 3, 2])
}

/// Values `a`, `b`, `c` of a length-3 occurrence, in position order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTriple {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub occurrence: Occurrence,
}

pub fn locate_unique(perm: &Permutation, pattern: &Pattern) -> Result<PatternTriple, BijectionError> {
    if pattern.len() != 3 {
        return Err(BijectionError::NotATriple(pattern.name()));
    }
    let mut found = find_occurrences(perm, pattern, Some(2));
    match found.len() {
        0 => Err(BijectionError::NoOccurrence { perm: perm.to_string(), pattern: pattern.name() }),
        1 => {
            let occurrence = found.pop().expect("one occurrence");
            let [a, b, c] = occurrence.values_in(perm)[..] else { unreachable!() };
            Ok(PatternTriple { a, b, c, occurrence })
        }
        _ => Err(BijectionError::AmbiguousOccurrence {
            perm: perm.to_string(),
            pattern: pattern.name(),
            first: found[0].positions.clone(),
            second: found[1].positions.clone(),
        }),
    }
}

/// Swaps the last two entries of the unique `unique` occurrence in a permutation avoiding `forbidden`.
fn swap_tail(perm: &Permutation, forbidden: &Pattern, unique: &Pattern) -> Result<Permutation, BijectionError> {
    if !avoids(perm, forbidden) {
        return Err(BijectionError::NotInDomain {
            perm: perm.to_string(),
            check: format!("must avoid {}", forbidden.name()),
        });
    }
    let triple = locate_unique(perm, unique)?;
    let [_, j, k] = triple.occurrence.positions[..] else { unreachable!() };
    let mut values = perm.values().to_vec();
    values.swap(j - 1, k - 1);
    Ok(Permutation::from_vec_unchecked(values))
}

/// S to T.
pub fn phi(s: &Permutation) -> Result<Permutation, BijectionError> {
    swap_tail(s, &p132(), &p123())
}

/// T to S.
pub fn phi_inverse(t: &Permutation) -> Result<Permutation, BijectionError> {
    swap_tail(t, &p123(), &p132())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionFailure {
    pub kind: String,
    pub permutation: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub n: usize,
    #[serde(rename = "sizeS")]
    pub size_s: u64,
    #[serde(rename = "sizeT")]
    pub size_t: u64,
    pub failures: Vec<BijectionFailure>,
}

impl BijectionReport {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Default)]
struct ShardResult {
    s: Vec<Permutation>,
    t: Vec<Permutation>,
}

/// Splits S_n into S and T, then checks `phi` and `phi_inverse` on every member.
pub fn verify_bijection(n: usize, config: &CensusConfig) -> Result<BijectionReport, CensusError> {
    config.check(n)?;
    let kernel = CountVectorKernel::new(&[p123(), p132()]);
    let shards = map_shards(n, config.jobs, |first| {
        let mut out = ShardResult::default();
        let mut counts = [0u64; 2];
        for_each_in_shard(n, first, |values| {
            kernel.fill(values, &mut counts);
            match counts {
                [1, 0] => out.s.push(Permutation::from_vec_unchecked(values.to_vec())),
                [0, 1] => out.t.push(Permutation::from_vec_unchecked(values.to_vec())),
                _ => {}
            }
        });
        out
    })?;
    let (mut members_s, mut members_t) = (Vec::new(), Vec::new());
    for shard in shards {
        members_s.extend(shard.s);
        members_t.extend(shard.t);
    }
    let set_t: HashSet<&Permutation> = members_t.iter().collect();

    let mut failures = Vec::new();
    let mut fail = |kind: &str, perm: &Permutation, detail: String| {
        failures.push(BijectionFailure { kind: kind.into(), permutation: perm.to_string(), detail });
    };
    let mut images = HashSet::new();
    for s in &members_s {
        match phi(s) {
            Err(e) => fail("phi-error", s, e.to_string()),
            Ok(t) => {
                if !set_t.contains(&t) {
                    fail("image-outside-T", s, t.to_string());
                }
                match phi_inverse(&t) {
                    Ok(back) if back == *s => {}
                    Ok(back) => fail("inverse-mismatch", s, back.to_string()),
                    Err(e) => fail("inverse-error", s, e.to_string()),
                }
                if !images.insert(t.clone()) {
                    fail("not-injective", s, t.to_string());
                }
            }
        }
    }
    for t in &members_t {
        match phi_inverse(t).and_then(|s| phi(&s)) {
            Ok(round) if round == *t => {}
            Ok(round) => fail("forward-mismatch", t, round.to_string()),
            Err(e) => fail("inverse-error", t, e.to_string()),
        }
    }
    let (size_s, size_t) = (members_s.len() as u64, members_t.len() as u64);
    if size_s != size_t {
        fail("size-mismatch", &Permutation::identity(0), format!("|S| = {size_s}, |T| = {size_t}"));
    }
    if let Ok(expected) = theorem1_closed(n as u64) {
        if expected != size_s.into() {
            fail("count-mismatch", &Permutation::identity(0), format!("|S| = {size_s}, closed form {expected}"));
        }
    }
    Ok(BijectionReport { n, size_s, size_t, failures })
}
