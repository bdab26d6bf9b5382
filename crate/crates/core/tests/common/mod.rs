#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use permpat::recfit::{terms_needed, PolyRecurrence};
use permpat::{Pattern, Permutation, Sequence};
use rand::seq::SliceRandom;
use rand::Rng;

pub const LENGTH_TWO_AND_THREE: [&str; 8] = ["12", "21", "123", "132", "213", "231", "312", "321"];

pub fn pat(s: &str) -> Pattern {
    s.parse().unwrap()
}

pub fn perm(s: &str) -> Permutation {
    s.parse().unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Permutation {
    let mut v: Vec<u32> = (1..=n as u32).collect();
    v.shuffle(rng);
    Permutation::new(v).unwrap()
}

fn eval(poly: &[BigInt], m: i64) -> BigInt {
    poly.iter().rev().fold(BigInt::zero(), |acc, c| acc * m + c)
}

/// A random recurrence of the given shape together with enough of its terms to fit
/// it plus `extra` more. Terms are generated over the rationals and scaled by a
/// common denominator, which leaves the recurrence intact.
pub struct RandomRecurrence {
    pub order: usize,
    pub degree: usize,
    pub truth: Vec<Vec<BigInt>>,
    pub fit_terms: Sequence,
    pub all_terms: Sequence,
}

pub fn random_recurrence<R: Rng>(rng: &mut R, extra: usize) -> RandomRecurrence {
    loop {
        let order = rng.gen_range(1..=3);
        let degree = rng.gen_range(0..=2);
        let start: i64 = rng.gen_range(0..=3);
        let fit_len = terms_needed(order, degree, 2);
        let total = fit_len + extra;
        let poly = |rng: &mut R| (0..=degree).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect::<Vec<_>>();
        let truth: Vec<Vec<BigInt>> = (0..=order).map(|_| poly(rng)).collect();
        let last_m = start + (total - order) as i64;
        if truth[0].iter().all(Zero::is_zero) || (start..=last_m).any(|m| eval(&truth[order], m).is_zero()) {
            continue;
        }
        let mut terms: Vec<BigRational> =
            (0..order).map(|_| BigRational::from_integer(rng.gen_range(-5..=5).into())).collect();
        if terms.iter().all(Zero::is_zero) {
            continue;
        }
        for m in start..=last_m - 1 {
            let mut rest = BigRational::zero();
            for t in 0..order {
                let at = (m - start) as usize + t;
                rest += BigRational::from_integer(eval(&truth[t], m)) * &terms[at];
            }
            terms.push(-rest / BigRational::from_integer(eval(&truth[order], m)));
        }
        assert_eq!(terms.len(), total);
        let denom = terms.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = terms.iter().map(|x| (x * &denom).to_integer()).collect();
        return RandomRecurrence {
            order,
            degree,
            truth,
            fit_terms: Sequence::new(start, ints[..fit_len].to_vec()),
            all_terms: Sequence::new(start, ints),
        };
    }
}

pub fn truth_recurrence(r: &RandomRecurrence) -> PolyRecurrence {
    PolyRecurrence::new(r.truth.clone()).unwrap()
}
