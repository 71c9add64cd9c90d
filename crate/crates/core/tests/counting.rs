use num_bigint::BigUint;
use partshare::base_set::{BaseSet, Density};
use partshare::partition::{
    count_bounded, count_unrestricted, enumerate_partitions, CountTable, MultiplicityBound,
};
use proptest::prelude::*;

fn bases() -> Vec<BaseSet> {
    let mut v = BaseSet::builtin().to_vec();
    v.push(BaseSet::explicit([2, 3, 7, 11]).unwrap());
    v.push(BaseSet::seeded_random(99, Density::new(1, 3).unwrap(), 40).unwrap());
    v
}

fn bound(a: u32) -> MultiplicityBound {
    MultiplicityBound::new(a).unwrap()
}

/// Counts by choosing a multiplicity for each part from the largest down.
fn recursive_count(parts: &[u64], alpha: Option<u64>, n: u64) -> u128 {
    match parts.split_last() {
        None => u128::from(n == 0),
        Some((&p, rest)) => {
            let cap = alpha.unwrap_or(u64::MAX).min(n / p);
            (0..=cap)
                .map(|m| recursive_count(rest, alpha, n - m * p))
                .sum()
        }
    }
}

#[test]
fn dp_matches_enumeration() {
    for base in bases() {
        for alpha in [Some(1), Some(2), Some(3), None] {
            let b = alpha.map(bound);
            let table = CountTable::new(&base, b, 25);
            for n in 0..=25 {
                let listed = enumerate_partitions(&base, b, n).unwrap();
                assert_eq!(
                    table.get(n),
                    &BigUint::from(listed.len()),
                    "{base} alpha={alpha:?} n={n}"
                );
                for p in &listed {
                    assert_eq!(p.sum(), n);
                    assert!(p.parts().iter().all(|&k| base.contains(k)));
                    if let Some(a) = alpha {
                        assert!(p.max_multiplicity() <= a as usize);
                    }
                }
            }
        }
    }
}

#[test]
fn dp_matches_recursive_count() {
    for base in bases() {
        let parts = base.parts_up_to(60);
        for alpha in [Some(1u32), Some(2), Some(4), None] {
            let table = CountTable::new(&base, alpha.map(bound), 60);
            for n in 0..=60 {
                let expected = recursive_count(&parts, alpha.map(u64::from), n);
                assert_eq!(
                    table.get(n),
                    &BigUint::from(expected),
                    "{base} {alpha:?} {n}"
                );
            }
        }
    }
}

#[test]
fn conventions() {
    for base in bases() {
        for a in 1..4 {
            assert_eq!(count_bounded(&base, bound(a), 0), BigUint::from(1u8));
        }
    }
    let empty = BaseSet::explicit([]).unwrap();
    for n in 1..20 {
        assert_eq!(count_unrestricted(&empty, n), BigUint::from(0u8));
    }
}

proptest! {
    #[test]
    fn monotone_in_alpha(seed in any::<u64>(), n in 0u64..80, a in 1u32..6) {
        let base = BaseSet::seeded_random(seed, Density::half(), 80).unwrap();
        let lo = count_bounded(&base, bound(a), n);
        let hi = count_bounded(&base, bound(a + 1), n);
        let all = count_unrestricted(&base, n);
        prop_assert!(lo <= hi && hi <= all);
    }

    #[test]
    fn saturates(seed in any::<u64>(), n in 0u64..40, extra in 0u32..5) {
        let base = BaseSet::seeded_random(seed, Density::new(2, 3).unwrap(), 50).unwrap();
        let alpha = bound(n as u32 + extra + 1);
        prop_assert_eq!(count_bounded(&base, alpha, n), count_unrestricted(&base, n));
    }

    #[test]
    fn seeded_sets_are_deterministic(seed in any::<u64>(), num in 1u64..8, max in 1u64..300) {
        let density = Density::new(num, 8).unwrap();
        let a = BaseSet::seeded_random(seed, density, max).unwrap();
        let b = BaseSet::seeded_random(seed, density, max).unwrap();
        let parts = a.parts_up_to(max);
        prop_assert_eq!(&parts, &b.parts_up_to(max));
        prop_assert!(parts.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(parts.iter().all(|&k| (1..=max).contains(&k)));
        let text = a.to_string();
        prop_assert_eq!(text.parse::<BaseSet>().unwrap(), a);
    }
}
