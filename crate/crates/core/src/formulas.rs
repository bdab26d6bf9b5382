//! Exact closed forms and recurrences for the 123/132 classes, plus the
//! known single-occurrence counts for 123 and 132 used as cross-checks.
//!
//! Everything is integer arithmetic on `BigUint`/`BigInt`. Closed forms
//! refuse `n` below the range where they are stated; the census is the
//! authority there.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::census::ClassConstraint;
use crate::perm::Pattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{formula} is stated for n >= {min}, got n = {n}")]
    Domain { formula: &'static str, n: u64, min: u64 },
    #[error("internal arithmetic error: {0}")]
    Internal(String),
    #[error("unknown formula identifier {0:?}")]
    UnknownFormula(String),
}

/// Integer sequence whose first term sits at `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub start: i64,
    pub terms: Vec<BigInt>,
}

impl Sequence {
    pub fn new(start: i64, terms: Vec<BigInt>) -> Self {
        Self { start, terms }
    }

    pub fn from_i64s(start: i64, terms: &[i64]) -> Self {
        Self::new(start, terms.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of the last term; meaningless for an empty sequence.
    pub fn end(&self) -> i64 {
        self.start + self.terms.len() as i64 - 1
    }

    pub fn get(&self, index: i64) -> Option<&BigInt> {
        let offset = usize::try_from(index - self.start).ok()?;
        self.terms.get(offset)
    }

    /// Terms for indices `from..=to`, clipped to what is present.
    pub fn slice(&self, from: i64, to: i64) -> Sequence {
        let from = from.max(self.start);
        let to = to.min(self.end());
        let terms = (from..=to).filter_map(|i| self.get(i).cloned()).collect();
        Sequence::new(from, terms)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(BigInt::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

fn require(formula: &'static str, n: u64, min: u64) -> Result<(), FormulaError> {
    if n < min {
        Err(FormulaError::Domain { formula, n, min })
    } else {
        Ok(())
    }
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// C(n, k), built up one factor at a time; every intermediate is itself a binomial.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Permutations of length `n` with exactly one 12: `n - 1`.
pub fn lemma1(n: u64) -> Result<BigUint, FormulaError> {
    require("lemma1", n, 2)?;
    Ok(BigUint::from(n - 1))
}

/// Permutations of length `n` avoiding both 123 and 132: `2^(n-1)`.
pub fn lemma2(n: u64) -> Result<BigUint, FormulaError> {
    require("lemma2", n, 1)?;
    Ok(pow2(n - 1))
}

/// `f_0 = 0`, `f_n = f_0 + ... + f_(n-1) + 1`, as terms `f_0..=f_(n_max)`.
pub fn lemma2_recurrence(n_max: u64) -> Sequence {
    let mut terms = vec![BigInt::zero()];
    let mut running = BigInt::zero();
    for _ in 1..=n_max {
        let next = &running + 1;
        running += &next;
        terms.push(next);
    }
    Sequence::new(0, terms)
}

/// One 123, no 132: `(n-2) 2^(n-3)`.
pub fn theorem1_closed(n: u64) -> Result<BigUint, FormulaError> {
    require("thm1", n, 3)?;
    Ok(BigUint::from(n - 2) * pow2(n - 3))
}

/// `g_0..=g_(n_max)` from
/// `g_n = sum_{i=1}^{n} g_(n-i) + sum_{i=3}^{n-1} (i-2) 2^(n-i-1) + n - 2`
/// for `n >= 3`, with `g_0 = g_1 = g_2 = 0`.
pub fn theorem1_recurrence(n_max: u64) -> Sequence {
    let mut g: Vec<BigInt> = Vec::with_capacity(n_max as usize + 1);
    let mut prefix_sum = BigInt::zero();
    for n in 0..=n_max {
        let value = if n < 3 {
            BigInt::zero()
        } else {
            let insertion: BigInt = (3..n).map(|i| BigInt::from(i - 2) << (n - i - 1)).sum();
            &prefix_sum + insertion + (n - 2)
        };
        prefix_sum += &value;
        g.push(value);
    }
    Sequence::new(0, g)
}

/// One 132, no 123. Same count as [`theorem1_closed`].
pub fn theorem2_closed(n: u64) -> Result<BigUint, FormulaError> {
    require("thm2", n, 3)?;
    Ok(BigUint::from(n - 2) * pow2(n - 3))
}

/// Exactly one 123 and exactly one 132: `(n-3)(n-4) 2^(n-5)`.
pub fn theorem3_closed(n: u64) -> Result<BigUint, FormulaError> {
    require("thm3", n, 5)?;
    Ok(BigUint::from((n - 3) * (n - 4)) * pow2(n - 5))
}

/// `g_0..=g_(n_max)` from the combined recurrence exactly as it is usually printed:
/// `g_n = sum_{i=1}^{n} g_(n-i) + sum_{i=1}^{n-4} (2i(n-i-4) + n - 3) 2^(n-i-4)`
/// for `n >= 5`, with `g_0..g_4 = 0`.
///
/// This disagrees with [`theorem3_closed`] from `n = 6` on (15 against 12) and
/// is kept to document that.
pub fn theorem3_recurrence_printed(n_max: u64) -> Sequence {
    let mut g: Vec<BigInt> = Vec::with_capacity(n_max as usize + 1);
    let mut prefix_sum = BigInt::zero();
    for n in 0..=n_max {
        let value = if n < 5 {
            BigInt::zero()
        } else {
            let extra: BigInt = (1..=n - 4)
                .map(|i| BigInt::from(2 * i * (n - i - 4) + n - 3) << (n - i - 4))
                .sum();
            &prefix_sum + extra
        };
        prefix_sum += &value;
        g.push(value);
    }
    Sequence::new(0, g)
}

/// Contributions of the four insertion cases to one term of the Theorem 3 count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem3Subcases {
    pub n: u64,
    /// 132 and 123 both after `n`: `sum_{i=1}^{n} g_(n-i)`.
    pub case_1a: BigInt,
    /// 132 after `n`, prefix has one 12: `sum_{i=3}^{n-3} (i-2)(n-i-2) 2^(n-i-3)`.
    pub case_1b: BigInt,
    /// `n` is the 3 of the 132, prefix has one 12: `sum_{i=4}^{n-1} (i-3) 2^(n-i-1)`.
    pub case_2a: BigInt,
    /// `n` is the 3 of the 132, 123 after `n`: `sum_{i=2}^{n-3} (n-i-2) 2^(n-i-3)`.
    pub case_2b: BigInt,
}

impl Theorem3Subcases {
    pub fn total(&self) -> BigInt {
        &self.case_1a + &self.case_1b + &self.case_2a + &self.case_2b
    }
}

/// Per-case breakdown for `5 <= n <= n_max`.
///
/// Case 1b uses `(i-2)(n-i-2) 2^(n-i-3)`: one 12 in the prefix (`i - 2` ways)
/// times one 132 and no 123 in a suffix of length `n - i` (`(n-i-2) 2^(n-i-3)`).
pub fn theorem3_subcase_breakdown(n_max: u64) -> Vec<Theorem3Subcases> {
    let mut g: Vec<BigInt> = vec![BigInt::zero(); 5.min(n_max as usize + 1)];
    let mut out = Vec::new();
    for n in 5..=n_max {
        let case_1a: BigInt = g.iter().sum();
        let case_1b: BigInt = (3..=n.saturating_sub(3))
            .map(|i| BigInt::from((i - 2) * (n - i - 2)) << (n - i - 3))
            .sum();
        let case_2a: BigInt = (4..n).map(|i| BigInt::from(i - 3) << (n - i - 1)).sum();
        let case_2b: BigInt = (2..=n - 3).map(|i| BigInt::from(n - i - 2) << (n - i - 3)).sum();
        let row = Theorem3Subcases { n, case_1a, case_1b, case_2a, case_2b };
        g.push(row.total());
        out.push(row);
    }
    out
}

/// `g_0..=g_(n_max)` as the sum of the four case contributions, `g_0..g_4 = 0`.
pub fn theorem3_recurrence_subcases(n_max: u64) -> Sequence {
    let mut terms: Vec<BigInt> = vec![BigInt::zero(); 5.min(n_max as usize + 1)];
    terms.extend(theorem3_subcase_breakdown(n_max).iter().map(Theorem3Subcases::total));
    Sequence::new(0, terms)
}

/// Exactly one 123: `(3/n) C(2n, n+3)`.
pub fn noonan(n: u64) -> Result<BigUint, FormulaError> {
    require("noonan", n, 3)?;
    let (q, r) = (binomial(2 * n, n + 3) * 3u32).div_rem(&BigUint::from(n));
    if !r.is_zero() {
        return Err(FormulaError::Internal(format!("3 C(2n, n+3) not divisible by n = {n}")));
    }
    Ok(q)
}

/// Exactly one 132: `C(2n-3, n-3)`.
pub fn bona(n: u64) -> Result<BigUint, FormulaError> {
    require("bona", n, 3)?;
    Ok(binomial(2 * n - 3, n - 3))
}

/// Stable identifiers for the formulas above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    Lemma1,
    Lemma2,
    Thm1,
    Thm2,
    Thm3,
    Thm3Printed,
    Noonan,
    Bona,
}

impl FormulaId {
    pub const ALL: [FormulaId; 8] = [
        FormulaId::Lemma1,
        FormulaId::Lemma2,
        FormulaId::Thm1,
        FormulaId::Thm2,
        FormulaId::Thm3,
        FormulaId::Thm3Printed,
        FormulaId::Noonan,
        FormulaId::Bona,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FormulaId::Lemma1 => "lemma1",
            FormulaId::Lemma2 => "lemma2",
            FormulaId::Thm1 => "thm1",
            FormulaId::Thm2 => "thm2",
            FormulaId::Thm3 => "thm3",
            FormulaId::Thm3Printed => "thm3-printed",
            FormulaId::Noonan => "noonan",
            FormulaId::Bona => "bona",
        }
    }

    pub fn min_n(&self) -> u64 {
        match self {
            FormulaId::Lemma1 => 2,
            FormulaId::Lemma2 => 1,
            FormulaId::Thm1 | FormulaId::Thm2 | FormulaId::Noonan | FormulaId::Bona => 3,
            FormulaId::Thm3 | FormulaId::Thm3Printed => 5,
        }
    }

    pub fn evaluate(&self, n: u64) -> Result<BigInt, FormulaError> {
        let unsigned = match self {
            FormulaId::Lemma1 => lemma1(n)?,
            FormulaId::Lemma2 => lemma2(n)?,
            FormulaId::Thm1 => theorem1_closed(n)?,
            FormulaId::Thm2 => theorem2_closed(n)?,
            FormulaId::Thm3 => theorem3_closed(n)?,
            FormulaId::Thm3Printed => {
                require("thm3-printed", n, 5)?;
                return Ok(theorem3_recurrence_printed(n).terms.pop().expect("non-empty"));
            }
            FormulaId::Noonan => noonan(n)?,
            FormulaId::Bona => bona(n)?,
        };
        Ok(BigInt::from(unsigned))
    }

    /// Pattern constraints whose class the formula counts.
    pub fn class(&self) -> Vec<(Pattern, ClassConstraint)> {
        let p = |v: &[u32]| Pattern::from_vec_unchecked(v.to_vec());
        use ClassConstraint::{Avoid, Exactly};
        match self {
            FormulaId::Lemma1 => vec![(p(&[1, 2]), Exactly(1))],
            FormulaId::Lemma2 => vec![(p(&[1, 2, 3]), Avoid), (p(&[1, 3, 2]), Avoid)],
            FormulaId::Thm1 => vec![(p(&[1, 2, 3]), Exactly(1)), (p(&[1, 3, 2]), Avoid)],
            FormulaId::Thm2 => vec![(p(&[1, 3, 2]), Exactly(1)), (p(&[1, 2, 3]), Avoid)],
            FormulaId::Thm3 | FormulaId::Thm3Printed => {
                vec![(p(&[1, 2, 3]), Exactly(1)), (p(&[1, 3, 2]), Exactly(1))]
            }
            FormulaId::Noonan => vec![(p(&[1, 2, 3]), Exactly(1))],
            FormulaId::Bona => vec![(p(&[1, 3, 2]), Exactly(1))],
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormulaId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| FormulaError::UnknownFormula(s.to_string()))
    }
}
