//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use partshare::adversary::AttackExperiment;
use partshare::ballot::{BallotOptions, BallotSession};
use partshare::base_set::{BaseSet, Density};
use partshare::identity::{expand_pair_product, verify_identity};
use partshare::membership::{run_membership_session, Behavior, Verdict};
use partshare::partition::{
    count_bounded, count_unrestricted, enumerate_partitions, CountTable, MultiplicityBound,
};
use partshare::scheme::SchemeParams;
use partshare::unanimity::{run_unanimity_session, Perturbation, UnanimityVerdict, DEFAULT_WINDOW};
use partshare::vote_hash::Inspection;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Check);

struct Check {
    pass: bool,
    detail: String,
}

fn bound(a: u32) -> MultiplicityBound {
    MultiplicityBound::new(a).unwrap()
}

fn params(r: usize, seed: u64) -> SchemeParams {
    SchemeParams {
        r,
        rng_seed: seed,
        ..SchemeParams::default()
    }
}

fn within(elapsed: Duration, limit: Duration) -> String {
    format!("{:.3}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs())
}

fn golden() -> Check {
    // Worked values for n = 10, alpha = 1, as tabulated for each set.
    let args = [1u64, 2, 3, 4, 5, 6, 8, 10];
    let table: [(BaseSet, u64, [u64; 8]); 3] = [
        (BaseSet::Primes, 5, [0, 1, 1, 0, 2, 0, 1, 2]),
        (BaseSet::Squares, 4, [1, 0, 0, 1, 1, 0, 0, 1]),
        (BaseSet::Odds, 10, [1, 0, 1, 1, 1, 1, 2, 2]),
    ];
    let start = Instant::now();
    let mut matched = 0;
    let mut totals = 0;
    for (base, total, values) in &table {
        if count_unrestricted(base, 10) == BigUint::from(*total) {
            totals += 1;
        }
        let capped = CountTable::new(base, Some(bound(1)), 10);
        for (&k, &want) in args.iter().zip(values) {
            if capped.get(k) == &BigUint::from(want) {
                matched += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(1);
    Check {
        pass: matched == 24 && totals == 3 && elapsed < limit,
        detail: format!(
            "{matched}/24 capped values, {totals}/3 totals, {}",
            within(elapsed, limit)
        ),
    }
}

fn identity_suite() -> Check {
    let mut bases = BaseSet::builtin().to_vec();
    bases.extend((0..10).map(|s| BaseSet::seeded_random(1000 + s, Density::half(), 40).unwrap()));
    let start = Instant::now();
    let mut checks = 0;
    let mut failures = Vec::new();
    for base in &bases {
        for a in 1..=4 {
            for n in 1..=40 {
                checks += 1;
                if !verify_identity(n, bound(a), base).equal {
                    failures.push(format!("{base} n={n} alpha={a}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(60);
    Check {
        pass: failures.is_empty() && checks >= 2240 && elapsed < limit,
        detail: format!(
            "{checks} checks, {} failures {failures:?}, {}",
            failures.len(),
            within(elapsed, limit)
        ),
    }
}

fn oracle_equivalence() -> Check {
    let mut compared = 0;
    let mut failures = Vec::new();
    for base in BaseSet::builtin() {
        for alpha in [Some(1), Some(2), Some(3), None] {
            let b = alpha.map(bound);
            let table = CountTable::new(&base, b, 25);
            for n in 0..=25 {
                compared += 1;
                let listed = enumerate_partitions(&base, b, n).unwrap().len();
                if table.get(n) != &BigUint::from(listed) {
                    failures.push(format!("{base} alpha={alpha:?} n={n}"));
                }
            }
        }
    }
    Check {
        pass: failures.is_empty(),
        detail: format!("{compared} counts compared, mismatches {failures:?}"),
    }
}

fn expansion_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut evaluated = 0;
    let mut failures = Vec::new();
    for _ in 0..20 {
        let a = rng.random_range(1..=3u32);
        let n1 = rng.random_range(a as u64 + 1..=30);
        let n2 = rng.random_range(a as u64 + 1..=30);
        let expansion = expand_pair_product(n1, n2, bound(a)).unwrap();
        for _ in 0..5 {
            let base = BaseSet::seeded_random(rng.random(), Density::half(), 30).unwrap();
            let masked = |n| {
                BigInt::from(count_unrestricted(&base, n))
                    - BigInt::from(count_bounded(&base, bound(a), n))
            };
            let expected = masked(n1) * masked(n2);
            let table = CountTable::new(&base, Some(bound(a)), n1.max(n2));
            evaluated += 1;
            if BigInt::from(expansion.evaluate(&table)) != expected {
                failures.push(format!("({n1},{n2},{a}) on {base}"));
            }
        }
    }
    Check {
        pass: failures.is_empty() && evaluated == 100,
        detail: format!("{evaluated} evaluations, mismatches {failures:?}"),
    }
}

fn ballot() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tallied = 0;
    let mut problems = Vec::new();
    for seed in 0..100u64 {
        let votes: Vec<i64> = (0..5).map(|_| rng.random_range(0..=1)).collect();
        let mut session = BallotSession::new(&params(5, seed), BallotOptions::default()).unwrap();
        let item = session.vote(&votes, seed).unwrap();
        let expected = votes.iter().sum::<i64>() as usize;
        match item.tally {
            Ok(t) if t.ayes == expected && item.inspection == Some(Inspection::Fair) => {
                tallied += 1
            }
            other => problems.push(format!("seed {seed}: {other:?}")),
        }
    }
    let mut flagged = 0;
    let mut trials = 0;
    for delta in [-1i64, 2, 7] {
        for seed in 0..20u64 {
            let mut votes: Vec<i64> = (0..5).map(|_| rng.random_range(0..=1)).collect();
            votes[rng.random_range(0..5)] = delta;
            let mut session =
                BallotSession::new(&params(5, seed), BallotOptions::default()).unwrap();
            let item = session.vote(&votes, seed).unwrap();
            trials += 1;
            if item.inspection == Some(Inspection::Fraudulent) {
                flagged += 1;
            } else {
                problems.push(format!("delta {delta} seed {seed} not flagged"));
            }
        }
    }
    Check {
        pass: tallied == 100 && flagged == trials,
        detail: format!(
            "{tallied}/100 honest tallies exact, {flagged}/{trials} frauds flagged {problems:?}"
        ),
    }
}

fn membership() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut honest = 0;
    for seed in 0..50u64 {
        if run_membership_session(&params(3, seed), &[])
            .unwrap()
            .verdict
            == Verdict::Accept
        {
            honest += 1;
        }
    }
    let strategies = [
        ("constant_offset", Behavior::ConstantOffset(1)),
        ("random_value", Behavior::RandomValue),
        ("replay_previous_round", Behavior::ReplayPreviousRound),
    ];
    let mut detail = format!("honest {honest}/50");
    let mut all = honest == 50;
    for (name, behavior) in strategies {
        let mut caught = 0;
        for seed in 0..50u64 {
            let culprit = rng.random_range(0..3);
            let mut behaviors = vec![Behavior::Honest; 3];
            behaviors[culprit] = behavior.clone();
            let out = run_membership_session(&params(3, seed), &behaviors).unwrap();
            if out.verdict == Verdict::Reject && out.cheaters == BTreeSet::from([culprit]) {
                caught += 1;
            }
        }
        all &= caught == 50;
        detail.push_str(&format!(", {name} {caught}/50"));
    }
    Check { pass: all, detail }
}

fn unanimity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut quiet = 0;
    let mut objected = 0;
    for seed in 0..50u64 {
        let out = run_unanimity_session(&params(3, seed), BTreeMap::new(), DEFAULT_WINDOW).unwrap();
        if out.verdict == UnanimityVerdict::Unanimous && out.session.rounds.len() == 5 {
            quiet += 1;
        }
        let objectors = BTreeMap::from([(rng.random_range(0..3), Perturbation::Random)]);
        let out = run_unanimity_session(&params(3, seed), objectors, DEFAULT_WINDOW).unwrap();
        if out.verdict == UnanimityVerdict::ObjectionDetected {
            objected += 1;
        }
    }
    let pair = BTreeMap::from([
        (0, Perturbation::Fixed(1234)),
        (2, Perturbation::Fixed(-1234)),
    ]);
    let out = run_unanimity_session(&params(3, 0), pair, DEFAULT_WINDOW).unwrap();
    let first = &out.session.rounds[0];
    let cancelled = first.pass
        && first.debug_deltas.len() == 2
        && first.debug_deltas.values().sum::<BigInt>() == BigInt::from(0);
    Check {
        pass: quiet == 50 && objected == 50 && cancelled,
        detail: format!(
            "unanimous {quiet}/50, objection detected {objected}/50, opposite deltas {:?} pass round: {cancelled}",
            first.debug_deltas
        ),
    }
}

fn adversary() -> Check {
    let start = Instant::now();
    let report = AttackExperiment {
        seed: 8,
        trials: 100,
        ..AttackExperiment::default()
    }
    .run()
    .unwrap();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(120);
    let means: Vec<String> = (1..=3)
        .map(|k| format!("k={k}:{:.2}", report.mean_size(k)))
        .collect();
    Check {
        pass: report.always_sound() && report.always_narrowing() && elapsed < limit,
        detail: format!(
            "sound={} narrowing={} mean candidates {}, {}",
            report.always_sound(),
            report.always_narrowing(),
            means.join(" "),
            within(elapsed, limit)
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden worked example", golden),
        ("identity exactness", identity_suite),
        ("oracle equivalence", oracle_equivalence),
        ("expansion soundness", expansion_soundness),
        ("ballot end-to-end", ballot),
        ("membership end-to-end", membership),
        ("unanimity", unanimity),
        ("adversary experiment", adversary),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let check = run();
        println!(
            "{} {}. {name}: {}",
            if check.pass { "PASS" } else { "FAIL" },
            i + 1,
            check.detail
        );
        failed += usize::from(!check.pass);
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
