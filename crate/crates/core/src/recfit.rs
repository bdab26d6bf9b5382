//! Guessing linear recurrences with polynomial coefficients.
//!
//! A recurrence of order `r` and degree `d` is
//! `c_0(m) a(m) + c_1(m) a(m+1) + ... + c_r(m) a(m+r) = 0`, each `c_t` a
//! polynomial of degree at most `d` in the index `m`. Fitting writes one
//! equation per available `m` in the `(r+1)(d+1)` unknown coefficients and
//! solves the homogeneous system exactly over the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Number, Value};
use thiserror::Error;

use crate::formulas::Sequence;

pub const DEFAULT_GUARD: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecfitError {
    #[error("need at least {need} terms to try any recurrence, got {have}")]
    InsufficientData { have: usize, need: usize },
    #[error("no recurrence of order <= {max_order} and degree <= {max_degree} fits")]
    NotFound { max_order: usize, max_degree: usize },
    #[error("max order must be at least 1")]
    EmptySearch,
    #[error("leading coefficient vanishes at m = {index}")]
    SingularLeadingCoefficient { index: i64 },
    #[error("term at index {index} is not an integer")]
    NonIntegralTerm { index: i64 },
    #[error("cannot parse sequence {0:?}")]
    Parse(String),
}

fn eval_poly(coeffs: &[BigInt], m: i64) -> BigInt {
    let m = BigInt::from(m);
    coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * &m + c)
}

fn poly_is_zero(coeffs: &[BigInt]) -> bool {
    coeffs.iter().all(Zero::is_zero)
}

/// Polynomial in `m` written highest power first, e.g. `2m+4`, `m^2-3`.
fn format_poly(coeffs: &[BigInt]) -> String {
    let mut out = String::new();
    for (j, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else if out.is_empty() { "" } else { "+" };
        let mag = c.abs();
        let body = match j {
            0 => mag.to_string(),
            _ => {
                let var = if j == 1 { "m".to_string() } else { format!("m^{j}") };
                if mag.is_one() { var } else { format!("{mag}{var}") }
            }
        };
        out.push_str(sign);
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `sum_t c_t(m) a(m+t) = 0` with integer polynomial coefficients.
///
/// Normalized: `c_r` is nonzero with positive leading coefficient, and the
/// integer coefficients have gcd 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRecurrence {
    pub order: usize,
    pub degree: usize,
    /// `coefficients[t][j]` is the coefficient of `m^j` in `c_t`.
    pub coefficients: Vec<Vec<BigInt>>,
}

impl PolyRecurrence {
    /// Builds and normalizes a recurrence. Returns `None` if `c_r` is zero.
    pub fn new(coefficients: Vec<Vec<BigInt>>) -> Option<Self> {
        let order = coefficients.len().checked_sub(1)?;
        let degree = coefficients.iter().map(Vec::len).max()?.checked_sub(1)?;
        let mut coefficients: Vec<Vec<BigInt>> = coefficients
            .into_iter()
            .map(|mut c| {
                c.resize(degree + 1, BigInt::zero());
                c
            })
            .collect();
        let lead = coefficients[order].iter().rev().find(|c| !c.is_zero())?.clone();
        let g = coefficients.iter().flatten().fold(BigInt::zero(), |g, c| g.gcd(c));
        let scale = if lead.is_negative() { -g } else { g };
        for c in coefficients.iter_mut().flatten() {
            *c = &*c / &scale;
        }
        Some(Self { order, degree, coefficients })
    }

    pub fn coefficient_at(&self, t: usize, m: i64) -> BigInt {
        eval_poly(&self.coefficients[t], m)
    }

    /// Left-hand side of the relation at index `m`, or `None` if a term is missing.
    fn residual(&self, seq: &Sequence, m: i64) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for t in 0..=self.order {
            acc += self.coefficient_at(t, m) * seq.get(m + t as i64)?;
        }
        Some(acc)
    }

    fn all_constant(&self) -> bool {
        self.coefficients.iter().all(|c| c[1..].iter().all(Zero::is_zero))
    }

    pub fn to_json(&self) -> Value {
        let coefficients: Vec<Value> = self
            .coefficients
            .iter()
            .map(|poly| {
                Value::Array(
                    poly.iter()
                        .map(|c| Value::Number(Number::from_str(&c.to_string()).expect("integer literal")))
                        .collect(),
                )
            })
            .collect();
        json!({
            "order": self.order,
            "degree": self.degree,
            "coefficients": coefficients,
            "human": self.to_string(),
        })
    }
}

/// Terms in ascending shift order when all coefficients are constants (signs
/// flipped if needed so the first term is positive, as in `4 a(m) - 4 a(m+1) + a(m+2) = 0`),
/// otherwise highest shift first (`(m) a(m+1) - (2m+4) a(m) = 0`).
impl fmt::Display for PolyRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, &Vec<BigInt>)> =
            self.coefficients.iter().enumerate().filter(|(_, c)| !poly_is_zero(c)).collect();
        let constant = self.all_constant();
        let (ordered, flip): (Vec<_>, bool) = if constant {
            let flip = terms.first().is_some_and(|(_, c)| c[0].is_negative());
            (terms, flip)
        } else {
            (terms.into_iter().rev().collect(), false)
        };
        for (i, (t, poly)) in ordered.into_iter().enumerate() {
            let poly: Vec<BigInt> = poly.iter().map(|c| if flip { -c } else { c.clone() }).collect();
            let lead_negative = poly.iter().rev().find(|c| !c.is_zero()).is_some_and(Signed::is_negative);
            let magnitude: Vec<BigInt> = if lead_negative { poly.iter().map(|c| -c).collect() } else { poly };
            match (i, lead_negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_constant = magnitude[1..].iter().all(Zero::is_zero);
            if !is_constant {
                write!(f, "({}) ", format_poly(&magnitude))?;
            } else if !magnitude[0].is_one() {
                write!(f, "{} ", magnitude[0])?;
            }
            if t == 0 {
                f.write_str("a(m)")?;
            } else {
                write!(f, "a(m+{t})")?;
            }
        }
        f.write_str(" = 0")
    }
}

/// Terms a shape needs before it is attempted.
pub fn terms_needed(order: usize, degree: usize, guard: usize) -> usize {
    (order + 1) * (degree + 1) + order + guard
}

/// Reduced row echelon form in place; returns the pivot column of each nonzero row.
fn rref(rows: &mut Vec<Vec<BigRational>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                for c in col..cols {
                    let delta = &factor * &rows[r][c];
                    rows[i][c] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Solves the `(order, degree)` shape; `None` if every solution has `c_r = 0`.
fn solve_shape(seq: &Sequence, order: usize, degree: usize) -> Option<PolyRecurrence> {
    let width = degree + 1;
    let cols = (order + 1) * width;
    let mut rows: Vec<Vec<BigRational>> = (seq.start..=seq.end() - order as i64)
        .map(|m| {
            let mut row = Vec::with_capacity(cols);
            for t in 0..=order {
                let term = seq.get(m + t as i64).expect("in range");
                let mut power = BigInt::one();
                for _ in 0..width {
                    row.push(BigRational::from_integer(&power * term));
                    power *= m;
                }
            }
            row
        })
        .collect();
    let pivots = rref(&mut rows, cols);
    // The basis vector of the last free column is the only one that can reach c_r.
    let free = (0..cols).rev().find(|c| !pivots.contains(c))?;
    if free < order * width {
        return None;
    }
    let mut solution = vec![BigRational::zero(); cols];
    solution[free] = BigRational::one();
    for (row, &p) in rows.iter().zip(&pivots) {
        solution[p] = -row[free].clone();
    }
    let denom_lcm = solution.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let integers: Vec<BigInt> = solution.iter().map(|x| (x * &denom_lcm).to_integer()).collect();
    PolyRecurrence::new(integers.chunks(width).map(<[BigInt]>::to_vec).collect())
}

/// Finds the first shape, by ascending order and then degree, admitting a
/// recurrence that holds at every index of `seq`. A shape is only tried when
/// `seq` has [`terms_needed`] terms for it.
pub fn fit(
    seq: &Sequence,
    max_order: usize,
    max_degree: usize,
    guard: usize,
) -> Result<PolyRecurrence, RecfitError> {
    if max_order == 0 {
        return Err(RecfitError::EmptySearch);
    }
    let need = terms_needed(1, 0, guard);
    if seq.len() < need {
        return Err(RecfitError::InsufficientData { have: seq.len(), need });
    }
    for order in 1..=max_order {
        for degree in 0..=max_degree {
            if seq.len() < terms_needed(order, degree, guard) {
                break;
            }
            if let Some(rec) = solve_shape(seq, order, degree) {
                debug_assert!(verify(&rec, seq));
                return Ok(rec);
            }
        }
    }
    Err(RecfitError::NotFound { max_order, max_degree })
}

/// Extends `seed` with `rec` up to index `target`. The extension starts after the
/// last seed term; seeds longer than `target` are truncated.
pub fn apply(rec: &PolyRecurrence, seed: &Sequence, target: i64) -> Result<Sequence, RecfitError> {
    let r = rec.order;
    if seed.len() < r {
        return Err(RecfitError::InsufficientData { have: seed.len(), need: r });
    }
    let mut out = seed.slice(seed.start, target);
    while out.end() < target {
        let m = out.end() + 1 - r as i64;
        let lead = rec.coefficient_at(r, m);
        if lead.is_zero() {
            return Err(RecfitError::SingularLeadingCoefficient { index: m });
        }
        let mut rest = BigInt::zero();
        for t in 0..r {
            rest += rec.coefficient_at(t, m) * out.get(m + t as i64).expect("present");
        }
        let (q, rem) = (-rest).div_rem(&lead);
        if !rem.is_zero() {
            return Err(RecfitError::NonIntegralTerm { index: m + r as i64 });
        }
        out.terms.push(q);
    }
    Ok(out)
}

/// True iff the relation holds at every index whose terms are all present.
/// With fewer than `order + 1` terms there is nothing to check.
pub fn verify(rec: &PolyRecurrence, seq: &Sequence) -> bool {
    if seq.len() <= rec.order {
        return true;
    }
    (seq.start..=seq.end() - rec.order as i64).all(|m| rec.residual(seq, m).is_some_and(|x| x.is_zero()))
}

/// Comma-separated integers, e.g. `4,12,32`.
pub fn parse_terms(s: &str) -> Result<Vec<BigInt>, RecfitError> {
    s.split(',')
        .map(|tok| tok.trim().parse::<BigInt>().map_err(|_| RecfitError::Parse(s.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rec(cs: &[&[i64]]) -> PolyRecurrence {
        PolyRecurrence::new(cs.iter().map(|c| ints(c)).collect()).unwrap()
    }

    #[test]
    fn fits_order_two_constant() {
        let seq = Sequence::from_i64s(4, &[4, 12, 32, 80, 192, 448, 1024]);
        let r = fit(&seq, 2, 0, 2).unwrap();
        assert_eq!(r, rec(&[&[4], &[-4], &[1]]));
        assert_eq!(r.to_string(), "4 a(m) - 4 a(m+1) + a(m+2) = 0");
        // no constant-coefficient order-1 relation precedes it
        assert!(solve_shape(&seq, 1, 0).is_none());
        // but (m-2) a(m+1) = 2(m-1) a(m) holds, so a degree-1 search stops at order 1
        assert_eq!(fit(&seq, 2, 1, 2).unwrap(), rec(&[&[2, -2], &[-2, 1]]));
    }

    #[test]
    fn fits_first_order_polynomial() {
        let seq = Sequence::from_i64s(1, &[2, 12, 48, 160, 480, 1344, 3584]);
        let r = fit(&seq, 1, 1, 2).unwrap();
        assert_eq!(r, rec(&[&[-4, -2], &[0, 1]]));
        assert_eq!(r.to_string(), "(m) a(m+1) - (2m+4) a(m) = 0");
    }

    #[test]
    fn fits_constant_and_geometric() {
        let r = fit(&Sequence::from_i64s(1, &[5, 5, 5, 5, 5]), 1, 0, 2).unwrap();
        assert_eq!(r, rec(&[&[-1], &[1]]));
        let r = fit(&Sequence::from_i64s(1, &[1, 2, 4, 8, 16]), 1, 0, 2).unwrap();
        assert_eq!(r, rec(&[&[-2], &[1]]));
        assert_eq!(r.to_string(), "2 a(m) - a(m+1) = 0");
    }

    #[test]
    fn fit_errors() {
        let short = Sequence::from_i64s(1, &[1, 2, 3, 4]);
        assert_eq!(fit(&short, 1, 0, 2), Err(RecfitError::InsufficientData { have: 4, need: 5 }));
        assert_eq!(fit(&short, 0, 0, 0), Err(RecfitError::EmptySearch));
        let noise = Sequence::from_i64s(0, &[3, 1, 4, 1, 5, 9, 2, 6]);
        assert_eq!(fit(&noise, 1, 1, 2), Err(RecfitError::NotFound { max_order: 1, max_degree: 1 }));
    }

    #[test]
    fn guard_rejects_coincidence() {
        // 1,2,4,8 then breaks; order 1 would need 5 terms with guard 2
        let seq = Sequence::from_i64s(0, &[1, 2, 4, 8, 17]);
        assert!(fit(&seq, 1, 0, 2).is_err());
    }

    #[test]
    fn apply_examples() {
        let r = rec(&[&[4], &[-4], &[1]]);
        let out = apply(&r, &Sequence::from_i64s(4, &[4, 12]), 10).unwrap();
        assert_eq!(out, Sequence::from_i64s(4, &[4, 12, 32, 80, 192, 448, 1024]));

        let r = rec(&[&[-4, -2], &[0, 1]]);
        let out = apply(&r, &Sequence::from_i64s(1, &[2]), 7).unwrap();
        assert_eq!(out, Sequence::from_i64s(1, &[2, 12, 48, 160, 480, 1344, 3584]));

        let r = rec(&[&[-1], &[1]]);
        let out = apply(&r, &Sequence::from_i64s(1, &[7]), 5).unwrap();
        assert_eq!(out, Sequence::from_i64s(1, &[7, 7, 7, 7, 7]));
    }

    #[test]
    fn apply_errors() {
        let r = rec(&[&[-4, -2], &[0, 1]]);
        assert_eq!(
            apply(&r, &Sequence::from_i64s(0, &[2]), 3),
            Err(RecfitError::SingularLeadingCoefficient { index: 0 })
        );
        // 3 a(m+1) = a(m)
        let r = rec(&[&[-1], &[3]]);
        assert_eq!(apply(&r, &Sequence::from_i64s(0, &[2]), 1), Err(RecfitError::NonIntegralTerm { index: 1 }));
    }

    #[test]
    fn verify_examples() {
        assert!(!verify(&rec(&[&[-1], &[1]]), &Sequence::from_i64s(1, &[1, 2])));
        assert!(verify(&rec(&[&[-1], &[1]]), &Sequence::from_i64s(1, &[3, 3, 3])));
    }

    #[test]
    fn normalization() {
        let r = PolyRecurrence::new(vec![ints(&[8]), ints(&[-8]), ints(&[-2])]).unwrap();
        assert_eq!(r, rec(&[&[-4], &[4], &[1]]));
        assert!(PolyRecurrence::new(vec![ints(&[1]), ints(&[0])]).is_none());
    }

    #[test]
    fn polynomial_formatting() {
        assert_eq!(format_poly(&ints(&[4, 2])), "2m+4");
        assert_eq!(format_poly(&ints(&[1, -3, 1])), "m^2-3m+1");
        assert_eq!(format_poly(&ints(&[0, -1])), "-m");
        assert_eq!(format_poly(&ints(&[0, 0])), "0");
        let r = rec(&[&[2], &[0, 1]]);
        assert_eq!(r.to_string(), "(m) a(m+1) + 2 a(m) = 0");
        let r = rec(&[&[0, 0, 1], &[-1, 0, 0], &[3, 1]]);
        assert_eq!(r.to_string(), "(m+3) a(m+2) - a(m+1) + (m^2) a(m) = 0");
    }

    #[test]
    fn json_shape() {
        let r = rec(&[&[-4, -2], &[0, 1]]);
        assert_eq!(
            r.to_json().to_string(),
            r#"{"coefficients":[[-4,-2],[0,1]],"degree":1,"human":"(m) a(m+1) - (2m+4) a(m) = 0","order":1}"#
        );
    }
}
