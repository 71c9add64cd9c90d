use partshare::base_set::{BaseSet, Density};
use partshare::identity::{
    build_identity, enumerate_solutions, expand_pair_product, verify_identity, Evaluator,
    SolutionMatrix,
};
use partshare::partition::MultiplicityBound;
use proptest::prelude::*;

fn bound(a: u32) -> MultiplicityBound {
    MultiplicityBound::new(a).unwrap()
}

/// Representations of n as sum c_i * radix^i, c_i >= 0, counted from the
/// largest power down.
fn representations(n: u64, radix: u64) -> u64 {
    fn go(n: u64, power: u64, radix: u64) -> u64 {
        if power == 1 {
            return 1;
        }
        (0..=n / power)
            .map(|c| go(n - c * power, power / radix, radix))
            .sum()
    }
    let mut top = 1;
    while top * radix <= n {
        top *= radix;
    }
    go(n, top, radix)
}

#[test]
fn row_counts_match_independent_count() {
    for a in 1..=4 {
        for n in 0..=60 {
            let m = enumerate_solutions(n, bound(a));
            assert_eq!(
                m.len() as u64,
                representations(n, a as u64 + 1),
                "n={n} alpha={a}"
            );
            for row in m.rows() {
                assert_eq!(row.value(a as u64 + 1), Some(n));
            }
        }
    }
}

#[test]
fn ten_distinct_has_fourteen_rows() {
    let m = enumerate_solutions(10, bound(1));
    assert_eq!(m.len(), 14);
    assert_eq!(m.rows().last().unwrap().coefficients(), [10]);
}

#[test]
fn trivial_row_accounts_for_the_capped_count() {
    let bases = [
        BaseSet::Primes,
        BaseSet::Odds,
        BaseSet::seeded_random(5, Density::half(), 30).unwrap(),
    ];
    for base in bases {
        for a in 1..=3 {
            for n in 1..=30 {
                let expr = build_identity(n, bound(a));
                let eval = Evaluator::new(&base, bound(a), n);
                let rest: num_bigint::BigUint = expr.nontrivial_terms().map(|t| eval.term(t)).sum();
                assert_eq!(rest, eval.masked_factor(n), "{base} n={n} a={a}");
            }
        }
    }
}

#[test]
fn expansion_of_ten_on_primes() {
    let e = expand_pair_product(10, 10, bound(1)).unwrap();
    assert_eq!(e.len(), 169);
    let eval = Evaluator::new(&BaseSet::Primes, bound(1), 10);
    assert_eq!(e.evaluate(eval.bounded()), 9u32.into());
    assert!(expand_pair_product(1, 10, bound(1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_holds(seed in any::<u64>(), n in 1u64..50, a in 1u32..6) {
        let base = BaseSet::seeded_random(seed, Density::half(), 60).unwrap();
        let report = verify_identity(n, bound(a), &base);
        prop_assert!(report.equal, "lhs={} rhs={}", report.lhs, report.rhs);
    }

    #[test]
    fn matrix_text_round_trips(n in 0u64..40, a in 1u32..5) {
        let m = enumerate_solutions(n, bound(a));
        let back: SolutionMatrix = m.to_text().parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn expansion_sound(seed in any::<u64>(), n1 in 2u64..25, n2 in 2u64..25, a in 1u32..4) {
        prop_assume!(n1 > a as u64 && n2 > a as u64);
        let base = BaseSet::seeded_random(seed, Density::half(), 30).unwrap();
        let e = expand_pair_product(n1, n2, bound(a)).unwrap();
        let eval = Evaluator::new(&base, bound(a), n1.max(n2));
        prop_assert_eq!(e.evaluate(eval.bounded()), eval.masked_product(n1, n2));
    }
}
