//! Permutations and patterns in one-line notation.
//!
//! Values and positions are 1-based throughout: a permutation of length `n`
//! is a rearrangement of `1..=n`, and occurrences report positions in `1..=n`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("not a permutation of 1..{len}: {values:?}")]
    NotAPermutation { len: usize, values: Vec<u32> },
    #[error("a pattern needs at least one entry")]
    EmptyPattern,
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

fn is_rearrangement(values: &[u32]) -> bool {
    let n = values.len();
    let mut seen = vec![false; n];
    for &v in values {
        let v = v as usize;
        if v == 0 || v > n || seen[v - 1] {
            return false;
        }
        seen[v - 1] = true;
    }
    true
}

/// A permutation of `1..=n` in one-line notation. The empty permutation is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        if is_rearrangement(&values) {
            Ok(Self(values))
        } else {
            Err(PermError::NotAPermutation { len: values.len(), values })
        }
    }

    /// Caller guarantees `values` is a rearrangement of `1..=n`.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(is_rearrangement(&values));
        Self(values)
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn into_values(self) -> Vec<u32> {
        self.0
    }

    /// Value at the 1-based position `pos`.
    pub fn at(&self, pos: usize) -> u32 {
        self.0[pos - 1]
    }

    /// Maps each value `v` to `n + 1 - v`.
    pub fn complement(&self) -> Self {
        let n = self.0.len() as u32;
        Self(self.0.iter().map(|&v| n + 1 - v).collect())
    }

    pub fn reverse(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// Comma-separated one-line form, e.g. `2,3,1,4`.
    pub fn to_comma_string(&self) -> String {
        join_values(&self.0)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_comma_string())
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self(Vec::new()));
        }
        Self::new(parse_comma_list(s)?)
    }
}

/// A pattern of length `k >= 1`, itself a permutation of `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Vec<u32>);

impl Pattern {
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        if values.is_empty() {
            return Err(PermError::EmptyPattern);
        }
        if !is_rearrangement(&values) {
            return Err(PermError::NotAPermutation { len: values.len(), values });
        }
        Ok(Self(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(!values.is_empty() && is_rearrangement(&values));
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; patterns are non-empty. Present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        let k = self.0.len() as u32;
        Self(self.0.iter().map(|&v| k + 1 - v).collect())
    }

    /// Compact digit form (`132`) for lengths up to 9, comma form otherwise.
    pub fn name(&self) -> String {
        if self.0.len() <= 9 {
            self.0.iter().map(|v| char::from(b'0' + *v as u8)).collect()
        } else {
            join_values(&self.0)
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Pattern {
    type Err = PermError;

    /// Accepts `1,3,2` or, for lengths up to 9, the compact form `132`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PermError::EmptyPattern);
        }
        let values = if s.contains(',') {
            parse_comma_list(s)?
        } else if s.len() <= 9 && s.bytes().all(|b| b.is_ascii_digit()) {
            s.bytes().map(|b| u32::from(b - b'0')).collect()
        } else {
            return Err(PermError::Parse {
                input: s.to_string(),
                reason: "expected comma-separated values or up to 9 digits".into(),
            });
        };
        Self::new(values)
    }
}

impl From<Pattern> for Permutation {
    fn from(p: Pattern) -> Self {
        Permutation(p.0)
    }
}

/// Positions (1-based, strictly increasing) of one pattern occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub positions: Vec<usize>,
}

impl Occurrence {
    /// Values of `host` at the occurrence positions, in position order.
    pub fn values_in(&self, host: &Permutation) -> Vec<u32> {
        self.positions.iter().map(|&p| host.at(p)).collect()
    }
}

/// Replaces every entry of `window` by its rank within the window (1 = smallest).
pub fn standardize(window: &[u32]) -> Result<Pattern, PermError> {
    if window.is_empty() {
        return Err(PermError::InvalidWindow("empty window".into()));
    }
    let mut order: Vec<usize> = (0..window.len()).collect();
    order.sort_unstable_by_key(|&i| window[i]);
    if order.windows(2).any(|w| window[w[0]] == window[w[1]]) {
        return Err(PermError::InvalidWindow(format!("duplicate entries in {window:?}")));
    }
    let mut ranks = vec![0u32; window.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank as u32 + 1;
    }
    Ok(Pattern::from_vec_unchecked(ranks))
}

fn join_values(values: &[u32]) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn parse_comma_list(s: &str) -> Result<Vec<u32>, PermError> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<u32>().map_err(|e| PermError::Parse {
                input: s.to_string(),
                reason: format!("{tok:?}: {e}"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(standardize(&[5, 2, 9]).unwrap(), pat("213"));
        assert_eq!(standardize(&[1, 2, 3]).unwrap(), pat("123"));
        assert_eq!(standardize(&[7, 3]).unwrap(), pat("21"));
    }

    #[test]
    fn standardize_rejects_bad_windows() {
        assert!(matches!(standardize(&[]), Err(PermError::InvalidWindow(_))));
        assert!(matches!(standardize(&[4, 1, 4]), Err(PermError::InvalidWindow(_))));
    }

    #[test]
    fn standardize_is_idempotent() {
        let once = standardize(&[40, 10, 30, 20]).unwrap();
        assert_eq!(standardize(once.values()).unwrap(), once);
    }

    #[test]
    fn parsing() {
        let p: Permutation = "2,3,1,4".parse().unwrap();
        assert_eq!(p.values(), &[2, 3, 1, 4]);
        assert_eq!(p.to_string(), "2,3,1,4");
        assert!("".parse::<Permutation>().unwrap().is_empty());
        assert!("1,1".parse::<Permutation>().is_err());
        assert!("2,3".parse::<Permutation>().is_err());
        assert!("1,x".parse::<Permutation>().is_err());

        assert_eq!(pat("132").values(), &[1, 3, 2]);
        assert_eq!(pat("1,3,2"), pat("132"));
        assert_eq!(pat("12").name(), "12");
        let long = Pattern::new((1..=10).rev().collect()).unwrap();
        assert_eq!(long.name(), "10,9,8,7,6,5,4,3,2,1");
        assert_eq!(long.name().parse::<Pattern>().unwrap(), long);
        assert!(matches!("".parse::<Pattern>(), Err(PermError::EmptyPattern)));
        assert!("10".parse::<Pattern>().is_err());
        assert!("1234567891".parse::<Pattern>().is_err());
    }

    #[test]
    fn complement_and_reverse() {
        let p: Permutation = "2,3,1,4".parse().unwrap();
        assert_eq!(p.complement().values(), &[3, 2, 4, 1]);
        assert_eq!(p.reverse().values(), &[4, 1, 3, 2]);
        assert_eq!(pat("132").complement(), pat("312"));
    }
}
