use std::collections::BTreeSet;

use partshare::adversary::{attack_recover_pair, enumerate_product_preimages, Observation, Pair};
use partshare::base_set::{BaseSet, Density};
use partshare::partition::{count_bounded, MultiplicityBound};
use proptest::prelude::*;

/// Every pair u <= v <= bound, checked one at a time.
fn nested_loop(obs: &Observation, bound: u64) -> BTreeSet<Pair> {
    let counts: Vec<_> = (0..=bound)
        .map(|a| count_bounded(&obs.base, obs.alpha, a))
        .collect();
    let mut out = BTreeSet::new();
    for u in 1..=bound {
        for v in u..=bound {
            if &counts[u as usize] * &counts[v as usize] == obs.value {
                out.insert((u, v));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exhaustive_within_bound(seed in any::<u64>(), u in 1u64..40, v in 1u64..40, a in 1u32..3) {
        let base = BaseSet::seeded_random(seed, Density::half(), 40).unwrap();
        let obs = Observation::of_pair(base, MultiplicityBound::new(a).unwrap(), (u, v));
        let fast = enumerate_product_preimages(&obs, 40).unwrap();
        prop_assert_eq!(&fast, &nested_loop(&obs, 40));
        prop_assert!(fast.contains(&(u.min(v), u.max(v))));
    }

    #[test]
    fn narrowing_and_sound(seeds in prop::collection::vec(any::<u64>(), 1..5), u in 1u64..30, v in 1u64..30) {
        let alpha = MultiplicityBound::new(1).unwrap();
        let obs: Vec<_> = seeds
            .iter()
            .map(|&s| Observation::of_pair(BaseSet::seeded_random(s, Density::half(), 30).unwrap(), alpha, (u, v)))
            .collect();
        let rec = attack_recover_pair(&obs, 30).unwrap();
        prop_assert!(rec.candidates.contains(&(u.min(v), u.max(v))));
        prop_assert!(rec.sizes.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(rec.sizes.len(), obs.len());
        prop_assert_eq!(*rec.sizes.last().unwrap(), rec.candidates.len());
    }
}

#[test]
fn zero_products_agree_with_nested_loop() {
    for base in BaseSet::builtin() {
        let obs = Observation {
            base,
            alpha: MultiplicityBound::new(1).unwrap(),
            value: 0u32.into(),
        };
        assert_eq!(
            enumerate_product_preimages(&obs, 25).unwrap(),
            nested_loop(&obs, 25)
        );
    }
}
