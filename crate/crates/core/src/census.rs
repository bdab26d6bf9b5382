//! Exhaustive enumeration of S_n and joint occurrence-count tables.
//!
//! S_n is walked in lexicographic order. For parallel runs it is split into
//! `n` shards by first entry; each shard is itself a lexicographic run, so
//! concatenating shards in order reproduces the serial stream and merging
//! shard tables by addition reproduces the serial table.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::count::{count_naive_slice, SmallPatternCounts};
use crate::perm::{Pattern, Permutation};

/// Largest `n` censused unless the caller raises it.
pub const DEFAULT_BUDGET: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("n = {n} exceeds the census budget (n <= {limit}); raise it explicitly to continue")]
    BudgetExceeded { n: usize, limit: usize },
    #[error("a census needs at least one pattern")]
    NoPatterns,
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusConfig {
    /// Largest admissible `n`.
    pub budget: usize,
    /// Worker threads; 1 runs serially on the calling thread.
    pub jobs: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, jobs: 1 }
    }
}

impl CensusConfig {
    pub fn check(&self, n: usize) -> Result<(), CensusError> {
        if n > self.budget {
            Err(CensusError::BudgetExceeded { n, limit: self.budget })
        } else {
            Ok(())
        }
    }
}

/// Per-pattern membership rule for [`count_class`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassConstraint {
    /// Same as `Exactly(0)`.
    Avoid,
    Exactly(u64),
    Any,
}

impl ClassConstraint {
    pub fn admits(&self, count: u64) -> bool {
        match *self {
            ClassConstraint::Avoid => count == 0,
            ClassConstraint::Exactly(r) => count == r,
            ClassConstraint::Any => true,
        }
    }
}

/// Rearranges `values` into its lexicographic successor. Returns false (leaving
/// `values` untouched) when it is already the last arrangement.
pub fn next_permutation(values: &mut [u32]) -> bool {
    let n = values.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| values[i] < values[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| values[j] > values[i]).expect("successor exists");
    values.swap(i, j);
    values[i + 1..].reverse();
    true
}

/// Lexicographic stream over S_n.
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<u32>>,
}

pub fn iter_permutations(n: usize) -> Permutations {
    Permutations { next: Some((1..=n as u32).collect()) }
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation::from_vec_unchecked(current))
    }
}

/// First entries that split S_n into shards; the single shard `0` stands for S_0.
pub fn shard_keys(n: usize) -> Vec<u32> {
    if n == 0 {
        vec![0]
    } else {
        (1..=n as u32).collect()
    }
}

/// Visits, in lexicographic order, every permutation of S_n starting with `first`.
pub fn for_each_in_shard<F: FnMut(&[u32])>(n: usize, first: u32, mut visit: F) {
    if n == 0 {
        visit(&[]);
        return;
    }
    let mut buf = Vec::with_capacity(n);
    buf.push(first);
    buf.extend((1..=n as u32).filter(|&v| v != first));
    loop {
        visit(&buf);
        if !next_permutation(&mut buf[1..]) {
            break;
        }
    }
}

/// Runs `work` on every shard of S_n, on `jobs` threads, returning results in shard order.
pub fn map_shards<T, F>(n: usize, jobs: usize, work: F) -> Result<Vec<T>, CensusError>
where
    T: Send,
    F: Fn(u32) -> T + Sync,
{
    let keys = shard_keys(n);
    if jobs <= 1 {
        return Ok(keys.into_iter().map(work).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CensusError::Pool(e.to_string()))?;
    Ok(pool.install(|| keys.into_par_iter().map(&work).collect()))
}

/// Occurrence counts of a fixed pattern list, reusing one O(n^2) tally for all
/// patterns of length at most 3.
#[derive(Debug, Clone)]
pub(crate) struct CountVectorKernel {
    patterns: Vec<Pattern>,
    needs_small: bool,
}

impl CountVectorKernel {
    pub(crate) fn new(patterns: &[Pattern]) -> Self {
        let needs_small = patterns.iter().any(|p| p.len() <= 3);
        Self { patterns: patterns.to_vec(), needs_small }
    }

    pub(crate) fn fill(&self, values: &[u32], out: &mut [u64]) {
        let small = self.needs_small.then(|| SmallPatternCounts::of(values));
        for (slot, p) in out.iter_mut().zip(&self.patterns) {
            *slot = match small.and_then(|s| s.get(p.values())) {
                Some(c) => c,
                None => count_naive_slice(values, p),
            };
        }
    }
}

/// Joint distribution of occurrence counts over S_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub n: usize,
    pub patterns: Vec<Pattern>,
    /// Count vector (one entry per pattern) to number of permutations realizing it.
    /// Only realized vectors are present.
    pub rows: BTreeMap<Vec<u64>, BigUint>,
}

#[derive(Serialize)]
struct CensusJson<'a> {
    n: usize,
    patterns: Vec<String>,
    rows: Vec<RowJson<'a>>,
}

#[derive(Serialize)]
struct RowJson<'a> {
    counts: &'a [u64],
    cardinality: String,
}

impl CensusTable {
    pub fn empty(n: usize, patterns: Vec<Pattern>) -> Self {
        Self { n, patterns, rows: BTreeMap::new() }
    }

    pub fn total(&self) -> BigUint {
        self.rows.values().sum()
    }

    pub fn get(&self, counts: &[u64]) -> BigUint {
        self.rows.get(counts).cloned().unwrap_or_default()
    }

    /// Pointwise sum of two tables over the same `n` and pattern list.
    pub fn merge(&mut self, other: CensusTable) {
        assert_eq!((self.n, &self.patterns), (other.n, &other.patterns), "incompatible tables");
        for (counts, card) in other.rows {
            *self.rows.entry(counts).or_default() += card;
        }
    }

    /// Total cardinality of rows whose count for each pattern satisfies its constraint.
    pub fn count_matching(&self, constraints: &[ClassConstraint]) -> BigUint {
        assert_eq!(constraints.len(), self.patterns.len());
        self.rows
            .iter()
            .filter(|(counts, _)| constraints.iter().zip(counts.iter()).all(|(c, &x)| c.admits(x)))
            .map(|(_, card)| card)
            .sum()
    }

    pub fn to_json(&self) -> String {
        let doc = CensusJson {
            n: self.n,
            patterns: self.patterns.iter().map(Pattern::name).collect(),
            rows: self
                .rows
                .iter()
                .map(|(counts, card)| RowJson { counts, cardinality: card.to_string() })
                .collect(),
        };
        serde_json::to_string(&doc).expect("census serializes")
    }

    /// One header line naming the patterns, then one line per count vector.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.patterns {
            let _ = write!(out, "{},", p.name().replace(',', " "));
        }
        out.push_str("cardinality\n");
        for (counts, card) in &self.rows {
            for c in counts {
                let _ = write!(out, "{c},");
            }
            let _ = writeln!(out, "{card}");
        }
        out
    }
}

fn census_shard(n: usize, first: u32, kernel: &CountVectorKernel) -> HashMap<Vec<u64>, u64> {
    let mut rows: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut buf = vec![0u64; kernel.patterns.len()];
    for_each_in_shard(n, first, |values| {
        kernel.fill(values, &mut buf);
        match rows.get_mut(buf.as_slice()) {
            Some(c) => *c += 1,
            None => {
                rows.insert(buf.clone(), 1);
            }
        }
    });
    rows
}

fn census_with_shards(
    n: usize,
    patterns: &[Pattern],
    config: &CensusConfig,
    shards: &[u32],
) -> Result<CensusTable, CensusError> {
    if patterns.is_empty() {
        return Err(CensusError::NoPatterns);
    }
    config.check(n)?;
    let kernel = CountVectorKernel::new(patterns);
    let mut table = CensusTable::empty(n, patterns.to_vec());
    let parts = map_shards(n, config.jobs, |first| {
        if shards.contains(&first) {
            census_shard(n, first, &kernel)
        } else {
            HashMap::new()
        }
    })?;
    for part in parts {
        for (counts, c) in part {
            *table.rows.entry(counts).or_insert_with(BigUint::zero) += BigUint::from(c);
        }
    }
    Ok(table)
}

/// Tabulates the joint occurrence counts of `patterns` over all of S_n.
pub fn joint_census(
    n: usize,
    patterns: &[Pattern],
    config: &CensusConfig,
) -> Result<CensusTable, CensusError> {
    census_with_shards(n, patterns, config, &shard_keys(n))
}

/// Census of the single shard of S_n whose permutations start with `first`.
pub fn shard_census(
    n: usize,
    first: u32,
    patterns: &[Pattern],
    config: &CensusConfig,
) -> Result<CensusTable, CensusError> {
    census_with_shards(n, patterns, &CensusConfig { jobs: 1, ..*config }, &[first])
}

/// Number of permutations of S_n meeting every constraint at once.
pub fn count_class(
    n: usize,
    constraints: &[(Pattern, ClassConstraint)],
    config: &CensusConfig,
) -> Result<BigUint, CensusError> {
    let patterns: Vec<Pattern> = constraints.iter().map(|(p, _)| p.clone()).collect();
    let rules: Vec<ClassConstraint> = constraints.iter().map(|(_, c)| *c).collect();
    Ok(joint_census(n, &patterns, config)?.count_matching(&rules))
}

/// Builds the permutations of length `n >= 1` avoiding both 123 and 132 directly:
/// `n` sits at some position `i`, the entries before it are `n-1, n-2, ..., n-i+1`
/// in decreasing order, and the entries after it are a shorter such permutation
/// on `1..=n-i`. Output is sorted lexicographically.
pub fn generate_double_avoiders(n: usize) -> Vec<Permutation> {
    fn build(n: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for i in 1..=n {
            let prefix: Vec<u32> = (n - i + 1..n).rev().collect();
            for suffix in build(n - i) {
                let mut v = prefix.clone();
                v.push(n);
                v.extend(suffix);
                out.push(v);
            }
        }
        out
    }
    let mut perms: Vec<Permutation> =
        build(n as u32).into_iter().map(Permutation::from_vec_unchecked).collect();
    perms.sort_unstable();
    perms
}

/// One line of the conjecture report: how many 132-avoiders of length `n`
/// have exactly `r` occurrences of 123.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureRow {
    pub n: usize,
    pub r: u64,
    pub cardinality: BigUint,
    /// Exponents of the binary expansion of `cardinality`, largest first.
    pub powers_of_two: Vec<u64>,
}

/// Greedy decomposition into distinct powers of two, largest exponent first.
pub fn binary_decomposition(x: &BigUint) -> Vec<u64> {
    (0..x.bits()).rev().filter(|&b| x.bit(b)).collect()
}

/// Counts of 132-avoiding permutations with exactly `r` 123-occurrences for
/// `1 <= n <= n_max` and `0 <= r <= r_max`.
pub fn conjecture_report(
    n_max: usize,
    r_max: u64,
    config: &CensusConfig,
) -> Result<Vec<ConjectureRow>, CensusError> {
    config.check(n_max)?;
    let patterns = [Pattern::from_vec_unchecked(vec![1, 3, 2]), Pattern::from_vec_unchecked(vec![1, 2, 3])];
    let mut out = Vec::new();
    for n in 1..=n_max {
        let table = joint_census(n, &patterns, config)?;
        for r in 0..=r_max {
            let cardinality = table.get(&[0, r]);
            let powers_of_two = binary_decomposition(&cardinality);
            out.push(ConjectureRow { n, r, cardinality, powers_of_two });
        }
    }
    Ok(out)
}

/// `n!` exactly.
pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}
