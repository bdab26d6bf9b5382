//! Occurrence counting.
//!
//! [`count_occurrences_naive`] enumerates every position subset and is the
//! reference. [`count_occurrences_fast`] handles patterns of length at most 3
//! in O(n^2) from four per-position tallies:
//!
//! * `lb[j]`: positions before `j` holding a smaller value
//! * `gb[j]`: positions before `j` holding a larger value
//! * `la[j]`: positions after `j` holding a smaller value
//! * `ga[j]`: positions after `j` holding a larger value
//!
//! 123 and 321 are counted on their middle entry. The other four are obtained
//! by subtraction: triples whose first entry is the smallest are 123 or 132,
//! first-largest are 312 or 321, last-largest are 123 or 213, and
//! last-smallest are 231 or 321.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use thiserror::Error;

use crate::perm::{standardize, Occurrence, Pattern, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("no fast kernel for pattern {0} of length {1}; use the naive counter")]
    UnsupportedPattern(String, usize),
}

/// Calls `visit` with each `k`-subset of `0..n` in lexicographic order until it breaks.
pub(crate) fn for_each_combination<F>(n: usize, k: usize, mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx).is_break() {
            return;
        }
        // rightmost index that can still advance
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Counts occurrences by standardizing every `k`-subset of positions.
pub fn count_occurrences_naive(perm: &Permutation, pattern: &Pattern) -> u64 {
    count_naive_slice(perm.values(), pattern)
}

pub(crate) fn count_naive_slice(values: &[u32], pattern: &Pattern) -> u64 {
    let mut window = Vec::with_capacity(pattern.len());
    let mut count = 0u64;
    for_each_combination(values.len(), pattern.len(), |idx| {
        window.clear();
        window.extend(idx.iter().map(|&i| values[i]));
        if standardize(&window).expect("permutation entries are distinct") == *pattern {
            count += 1;
        }
        ControlFlow::Continue(())
    });
    count
}

/// Standardizes every `k`-subset of positions once and tallies the patterns seen.
/// Patterns that never occur are absent.
///
/// Each entry's rank is one plus the number of smaller entries in the window;
/// the rank vector is packed base `k + 1` into a table index.
pub fn tally_patterns_naive(perm: &Permutation, k: usize) -> BTreeMap<Pattern, u64> {
    if k == 0 {
        return BTreeMap::new();
    }
    let values = perm.values();
    let base = k as u64 + 1;
    let slots = base.checked_pow(k as u32).filter(|&s| s <= 1 << 20);
    let mut table = vec![0u64; slots.unwrap_or(0) as usize];
    let mut sparse: HashMap<u64, u64> = HashMap::new();
    for_each_combination(values.len(), k, |idx| {
        let mut code = 0u64;
        for &i in idx {
            let rank = 1 + idx.iter().filter(|&&j| values[j] < values[i]).count() as u64;
            code = code * base + rank;
        }
        match slots {
            Some(_) => table[code as usize] += 1,
            None => *sparse.entry(code).or_insert(0) += 1,
        }
        ControlFlow::Continue(())
    });
    let decode = |mut code: u64| {
        let mut ranks = vec![0u32; k];
        for r in ranks.iter_mut().rev() {
            *r = (code % base) as u32;
            code /= base;
        }
        Pattern::from_vec_unchecked(ranks)
    };
    let dense = table.iter().enumerate().filter(|(_, &c)| c > 0).map(|(code, &c)| (code as u64, c));
    dense.chain(sparse).map(|(code, c)| (decode(code), c)).collect()
}

/// Occurrences in lexicographic order of their position lists, at most `limit` of them.
pub fn find_occurrences(
    perm: &Permutation,
    pattern: &Pattern,
    limit: Option<usize>,
) -> Vec<Occurrence> {
    let values = perm.values();
    let target = pattern.values();
    let k = target.len();
    let mut found = Vec::new();
    if limit == Some(0) {
        return found;
    }
    for_each_combination(values.len(), k, |idx| {
        let matches = (0..k).all(|x| {
            (x + 1..k).all(|y| (values[idx[x]] < values[idx[y]]) == (target[x] < target[y]))
        });
        if matches {
            found.push(Occurrence { positions: idx.iter().map(|&i| i + 1).collect() });
            if limit.is_some_and(|l| found.len() >= l) {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    found
}

/// True iff `perm` has no occurrence of `pattern`. Stops at the first witness.
pub fn avoids(perm: &Permutation, pattern: &Pattern) -> bool {
    find_occurrences(perm, pattern, Some(1)).is_empty()
}

/// Counts of every pattern of length 1, 2 and 3 in one permutation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmallPatternCounts {
    pub len: u64,
    pub p12: u64,
    pub p21: u64,
    pub p123: u64,
    pub p132: u64,
    pub p213: u64,
    pub p231: u64,
    pub p312: u64,
    pub p321: u64,
}

impl SmallPatternCounts {
    pub fn of(values: &[u32]) -> Self {
        let n = values.len();
        let mut out = Self { len: n as u64, ..Self::default() };
        // pairs whose first entry is smallest / largest, and last entry largest / smallest
        let (mut first_min, mut first_max, mut last_max, mut last_min) = (0u64, 0u64, 0u64, 0u64);
        for j in 0..n {
            let v = values[j];
            let lb = values[..j].iter().filter(|&&u| u < v).count() as u64;
            let gb = j as u64 - lb;
            let la = u64::from(v) - 1 - lb;
            let ga = (n - j - 1) as u64 - la;
            out.p12 += lb;
            out.p21 += gb;
            out.p123 += lb * ga;
            out.p321 += gb * la;
            first_min += choose2(ga);
            first_max += choose2(la);
            last_max += choose2(lb);
            last_min += choose2(gb);
        }
        out.p132 = first_min - out.p123;
        out.p312 = first_max - out.p321;
        out.p213 = last_max - out.p123;
        out.p231 = last_min - out.p321;
        out
    }

    /// Count for `pattern`, or `None` when it is longer than 3.
    pub fn get(&self, pattern: &[u32]) -> Option<u64> {
        Some(match pattern {
            [1] => self.len,
            [1, 2] => self.p12,
            [2, 1] => self.p21,
            [1, 2, 3] => self.p123,
            [1, 3, 2] => self.p132,
            [2, 1, 3] => self.p213,
            [2, 3, 1] => self.p231,
            [3, 1, 2] => self.p312,
            [3, 2, 1] => self.p321,
            _ => return None,
        })
    }
}

/// Number of 12 occurrences (non-inversions).
fn count_ascending_pairs(values: &[u32]) -> u64 {
    (0..values.len())
        .map(|j| values[..j].iter().filter(|&&u| u < values[j]).count() as u64)
        .sum()
}

fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// O(n^2) count for patterns of length at most 3.
pub fn count_occurrences_fast(perm: &Permutation, pattern: &Pattern) -> Result<u64, CountError> {
    let values = perm.values();
    match pattern.len() {
        1 => Ok(values.len() as u64),
        2 => {
            let ascents = count_ascending_pairs(values);
            Ok(if pattern.values() == [1, 2] { ascents } else { choose2(values.len() as u64) - ascents })
        }
        3 => Ok(SmallPatternCounts::of(values)
            .get(pattern.values())
            .expect("length-3 pattern")),
        k => Err(CountError::UnsupportedPattern(pattern.name(), k)),
    }
}

/// Counts with the fast kernel when possible, otherwise naively.
pub fn count_occurrences(perm: &Permutation, pattern: &Pattern) -> u64 {
    count_occurrences_fast(perm, pattern).unwrap_or_else(|_| count_occurrences_naive(perm, pattern))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn naive_examples() {
        assert_eq!(count_occurrences_naive(&perm("1,3,2"), &pat("132")), 1);
        assert_eq!(count_occurrences_naive(&perm("1,2,3,4,5,6"), &pat("123")), 20);
        assert_eq!(count_occurrences_naive(&perm("2,3,1,4"), &pat("123")), 1);
        assert_eq!(count_occurrences_naive(&perm("4,1,2,3"), &pat("132")), 0);
        assert_eq!(count_occurrences_naive(&perm("1,2"), &pat("123")), 0);
    }

    #[test]
    fn fast_examples() {
        assert_eq!(count_occurrences_fast(&perm("2,3,1,4"), &pat("123")), Ok(1));
        assert_eq!(count_occurrences_fast(&Permutation::identity(200), &pat("123")), Ok(1_313_400));
        assert_eq!(count_occurrences_fast(&perm("3,2,1"), &pat("12")), Ok(0));
        assert_eq!(count_occurrences_fast(&perm("3,2,1"), &pat("21")), Ok(3));
        assert_eq!(count_occurrences_fast(&perm(""), &pat("1")), Ok(0));
        assert!(matches!(
            count_occurrences_fast(&perm("1,2,3,4"), &pat("1234")),
            Err(CountError::UnsupportedPattern(_, 4))
        ));
        assert_eq!(count_occurrences(&perm("1,2,3,4"), &pat("1234")), 1);
    }

    #[test]
    fn avoids_examples() {
        assert!(avoids(&perm("2,3,1,4"), &pat("132")));
        assert!(!avoids(&perm("1,3,2,4"), &pat("132")));
        assert!(avoids(&perm("3,2,1"), &pat("12")));
    }

    #[test]
    fn find_examples() {
        let pos = |occ: Vec<Occurrence>| occ.into_iter().map(|o| o.positions).collect::<Vec<_>>();
        assert_eq!(pos(find_occurrences(&perm("1,2,3"), &pat("123"), None)), vec![vec![1, 2, 3]]);
        assert_eq!(pos(find_occurrences(&perm("2,3,1,4"), &pat("123"), None)), vec![vec![1, 2, 4]]);
        assert!(find_occurrences(&perm("3,2,1"), &pat("123"), None).is_empty());
        assert_eq!(
            pos(find_occurrences(&perm("1,2,3,4"), &pat("123"), Some(2))),
            vec![vec![1, 2, 3], vec![1, 2, 4]]
        );
        assert!(find_occurrences(&perm("1,2,3,4"), &pat("123"), Some(0)).is_empty());
    }

    #[test]
    fn tally_covers_every_subset() {
        let t = tally_patterns_naive(&perm("2,3,1,4"), 3);
        assert_eq!(t.values().sum::<u64>(), 4);
        assert_eq!(t[&pat("123")], 1);
        assert!(!t.contains_key(&pat("321")));
        let t = tally_patterns_naive(&perm("3,1,2"), 0);
        assert_eq!(t.len(), 0);
        let t = tally_patterns_naive(&Permutation::identity(12), 12);
        assert_eq!(t[&Pattern::new((1..=12).collect()).unwrap()], 1);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| {
            seen.push(c.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut empty = 0;
        for_each_combination(3, 0, |_| {
            empty += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(empty, 1);
    }
}
