mod common;

use std::collections::BTreeSet;

use common::*;
use num_bigint::BigUint;
use permpat::census::{
    factorial, generate_double_avoiders, iter_permutations, joint_census, shard_census, shard_keys, CensusConfig,
};
use permpat::count::{
    avoids, count_occurrences_fast, count_occurrences_naive, find_occurrences, tally_patterns_naive,
};
use permpat::formulas::binomial;
use permpat::recfit::{fit, verify};
use permpat::{standardize, Permutation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_permutation(max_len: usize) -> impl Strategy<Value = Permutation> {
    (0..=max_len)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

#[test]
fn fast_matches_naive_exhaustively() {
    for n in 0..=7 {
        for p in iter_permutations(n) {
            for name in LENGTH_TWO_AND_THREE {
                let pattern = pat(name);
                assert_eq!(
                    count_occurrences_fast(&p, &pattern).unwrap(),
                    count_occurrences_naive(&p, &pattern),
                    "{p} {name}"
                );
            }
        }
    }
}

#[test]
fn complement_symmetry_exhaustive() {
    let patterns = ["1", "12", "21", "123", "132", "213", "231", "312", "321", "2413"];
    for n in 0..=7 {
        for p in iter_permutations(n) {
            for name in patterns {
                let pattern = pat(name);
                assert_eq!(
                    count_occurrences_naive(&p, &pattern),
                    count_occurrences_naive(&p.complement(), &pattern.complement())
                );
            }
        }
    }
}

#[test]
fn fast_matches_naive_tally_on_random_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [8, 13, 21, 34, 55, 89, 144, 200] {
        for _ in 0..25 {
            let p = random_permutation(&mut rng, n);
            let triples = tally_patterns_naive(&p, 3);
            let pairs = tally_patterns_naive(&p, 2);
            for name in LENGTH_TWO_AND_THREE {
                let pattern = pat(name);
                let tally = if pattern.len() == 2 { &pairs } else { &triples };
                let expected = tally.get(&pattern).copied().unwrap_or(0);
                assert_eq!(count_occurrences_fast(&p, &pattern).unwrap(), expected, "n={n} {name}");
            }
        }
    }
}

proptest! {
    #[test]
    fn six_triple_counts_partition_all_triples(p in arb_permutation(60)) {
        let total: u64 = ["123", "132", "213", "231", "312", "321"]
            .iter()
            .map(|name| count_occurrences_fast(&p, &pat(name)).unwrap())
            .sum();
        prop_assert_eq!(BigUint::from(total), binomial(p.len() as u64, 3));
    }

    #[test]
    fn avoidance_agrees_with_counting(p in arb_permutation(9), which in 0usize..8) {
        let pattern = pat(LENGTH_TWO_AND_THREE[which]);
        let none = find_occurrences(&p, &pattern, Some(1)).is_empty();
        prop_assert_eq!(avoids(&p, &pattern), none);
        prop_assert_eq!(none, count_occurrences_naive(&p, &pattern) == 0);
    }

    #[test]
    fn occurrence_lists_are_complete_and_sorted(p in arb_permutation(8), which in 0usize..8) {
        let pattern = pat(LENGTH_TWO_AND_THREE[which]);
        let all = find_occurrences(&p, &pattern, None);
        prop_assert_eq!(all.len() as u64, count_occurrences_naive(&p, &pattern));
        prop_assert!(all.windows(2).all(|w| w[0].positions < w[1].positions));
        for occ in &all {
            prop_assert_eq!(standardize(&occ.values_in(&p)).unwrap(), pattern.clone());
        }
    }

    #[test]
    fn standardize_is_idempotent(window in proptest::collection::btree_set(0u32..1000, 1..12)) {
        let mut v: Vec<u32> = window.into_iter().collect();
        v.reverse();
        let shift = v.len() / 3;
        v.rotate_left(shift);
        let once = standardize(&v).unwrap();
        prop_assert_eq!(standardize(once.values()).unwrap(), once);
    }
}

#[test]
fn census_mass_and_complement_symmetry() {
    let cfg = CensusConfig::default();
    for n in 0..=7 {
        let t = joint_census(n, &[pat("123"), pat("132")], &cfg).unwrap();
        assert_eq!(t.total(), factorial(n));
        for counts in t.rows.keys() {
            assert!(counts.iter().all(|&c| BigUint::from(c) <= binomial(n as u64, 3)));
        }
        let mirrored = joint_census(n, &[pat("321"), pat("312")], &cfg).unwrap();
        let mut a: Vec<_> = t.rows.values().cloned().collect();
        let mut b: Vec<_> = mirrored.rows.values().cloned().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b, "n={n}");
        // complementation maps 123 to 321 and 132 to 312, so rows coincide exactly
        assert_eq!(t.rows, mirrored.rows);
    }
}

#[test]
fn sharded_census_merges_to_single_pass() {
    let cfg = CensusConfig::default();
    let patterns = [pat("123"), pat("132"), pat("12"), pat("2413")];
    for n in [1, 4, 7] {
        let whole = joint_census(n, &patterns, &cfg).unwrap();
        let mut merged = permpat::CensusTable::empty(n, patterns.to_vec());
        for first in shard_keys(n) {
            merged.merge(shard_census(n, first, &patterns, &cfg).unwrap());
        }
        assert_eq!(whole, merged);
    }
}

#[test]
fn generator_matches_filtering() {
    for n in 1..=9 {
        let generated = generate_double_avoiders(n);
        let set: BTreeSet<Permutation> = generated.iter().cloned().collect();
        assert_eq!(set.len(), generated.len(), "duplicates at n={n}");
        let filtered: BTreeSet<Permutation> =
            iter_permutations(n).filter(|p| avoids(p, &pat("123")) && avoids(p, &pat("132"))).collect();
        assert_eq!(set, filtered, "n={n}");
    }
}

#[test]
fn phi_moves_exactly_b_and_c() {
    use permpat::bijection::{locate_unique, phi};
    for n in 3..=8 {
        for s in iter_permutations(n) {
            if count_occurrences_naive(&s, &pat("123")) != 1 || !avoids(&s, &pat("132")) {
                continue;
            }
            let triple = locate_unique(&s, &pat("123")).unwrap();
            let t = phi(&s).unwrap();
            let changed: Vec<usize> = (1..=n).filter(|&i| s.at(i) != t.at(i)).collect();
            let [pa, pb, pc] = triple.occurrence.positions[..] else { panic!() };
            assert_eq!(changed, vec![pb, pc]);
            assert_eq!((t.at(pa), t.at(pb), t.at(pc)), (triple.a, triple.c, triple.b));
        }
    }
}

#[test]
fn fit_is_sound_and_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let r = random_recurrence(&mut rng, 0);
        let first = fit(&r.fit_terms, r.order, r.degree, 2).unwrap();
        assert!(verify(&first, &r.fit_terms));
        assert_eq!(first, fit(&r.fit_terms, r.order, r.degree, 2).unwrap());
        assert!(verify(&truth_recurrence(&r), &r.all_terms));
    }
}
