use std::collections::BTreeMap;

use num_bigint::BigInt;
use partshare::ballot::{run_ballot_session, BallotOptions, BallotSession, KIND_CAST};
use partshare::membership::{
    identify_cheaters, replay_verdict, run_membership_session, Behavior, Verdict,
};
use partshare::scheme::SchemeParams;
use partshare::transcript::{Role, Transcript};
use partshare::unanimity::{
    prove_disagreement, run_unanimity_session, verify_disagreement_proof, Perturbation,
    UnanimityVerdict, DEFAULT_WINDOW,
};
use partshare::vote_hash::Inspection;
use proptest::prelude::*;

fn params(r: usize, seed: u64) -> SchemeParams {
    SchemeParams {
        r,
        rng_seed: seed,
        ..SchemeParams::default()
    }
}

fn payload_keys(t: &Transcript) -> Vec<String> {
    fn walk(v: &serde_json::Value, out: &mut Vec<String>) {
        match v {
            serde_json::Value::Object(m) => {
                for (k, v) in m {
                    out.push(k.clone());
                    walk(v, out);
                }
            }
            serde_json::Value::Array(a) => a.iter().for_each(|v| walk(v, out)),
            _ => {}
        }
    }
    let mut keys = Vec::new();
    for r in t.records() {
        walk(&r.payload, &mut keys);
    }
    keys
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn membership_honest_accepts(seed in any::<u64>(), r in 2usize..6) {
        let out = run_membership_session(&params(r, seed), &[]).unwrap();
        prop_assert_eq!(out.verdict, Verdict::Accept);
        prop_assert_eq!(replay_verdict(&out.transcript).unwrap(), Verdict::Accept);
        let keys = payload_keys(&out.transcript);
        prop_assert!(!keys.iter().any(|k| k == "n1" || k == "n2" || k == "args"));
    }

    #[test]
    fn membership_offset_fails_every_round(seed in any::<u64>(), k in prop_oneof![-50i64..-1, 1i64..50], who in 0usize..3) {
        let mut behaviors = vec![Behavior::Honest; 3];
        behaviors[who] = Behavior::ConstantOffset(k);
        let out = run_membership_session(&params(3, seed), &behaviors).unwrap();
        prop_assert!(out.rounds.iter().all(|r| !r.pass));
        prop_assert_eq!(out.cheaters.iter().copied().collect::<Vec<_>>(), vec![who]);
        prop_assert_eq!(identify_cheaters(&out.transcript, &out.setup.secret).unwrap(), out.cheaters);
    }

    #[test]
    fn membership_is_deterministic(seed in any::<u64>()) {
        let behaviors = [Behavior::Honest, Behavior::RandomValue, Behavior::Honest];
        let a = run_membership_session(&params(3, seed), &behaviors).unwrap();
        let b = run_membership_session(&params(3, seed), &behaviors).unwrap();
        prop_assert_eq!(a.transcript.to_jsonl(), b.transcript.to_jsonl());
    }

    #[test]
    fn ballot_tallies_honest_votes(seed in any::<u64>(), votes in prop::collection::vec(0i64..=1, 2..7)) {
        let (session, item) = run_ballot_session(&params(votes.len(), seed), &votes, BallotOptions::default()).unwrap();
        let ayes = votes.iter().sum::<i64>() as usize;
        prop_assert_eq!(item.tally.unwrap().ayes, ayes);
        prop_assert_eq!(item.inspection, Some(Inspection::Fair));
        let split: BigInt = item.voter_values.iter().sum::<BigInt>();
        prop_assert!(split <= item.target);
        prop_assert_eq!(session.transcript.of_kind(KIND_CAST).count(), 0);
        prop_assert!(session.transcript.records().iter().all(|r| !matches!(r.role, Role::Member(_))));
    }

    #[test]
    fn ballot_flags_out_of_range_votes(seed in any::<u64>(), who in 0usize..4, bad in prop_oneof![-5i64..0, 2i64..9]) {
        let mut votes = vec![1, 0, 0, 1];
        votes[who] = bad;
        let mut session = BallotSession::new(&params(4, seed), BallotOptions::default()).unwrap();
        let item = session.vote(&votes, seed).unwrap();
        prop_assert_eq!(item.inspection, Some(Inspection::Fraudulent));
    }

    #[test]
    fn unanimity_single_objector(seed in any::<u64>(), who in 0usize..3) {
        let objectors = BTreeMap::from([(who, Perturbation::Random)]);
        let out = run_unanimity_session(&params(3, seed), objectors, DEFAULT_WINDOW).unwrap();
        prop_assert_eq!(out.verdict, UnanimityVerdict::ObjectionDetected);
        prop_assert!(out.session.rounds.iter().all(|r| !r.pass));
    }
}

#[test]
fn unanimity_board_does_not_reveal_r() {
    // Same dealt rows, different numbers of decision-makers and objectors:
    // the public board has the same shape.
    let shape = |r: usize, objectors: BTreeMap<usize, Perturbation>| {
        let out = run_unanimity_session(&params(r, 7), objectors, DEFAULT_WINDOW).unwrap();
        let board = &out.session.public;
        assert!(board
            .records()
            .iter()
            .all(|rec| !matches!(rec.role, Role::Member(_))));
        let keys = payload_keys(board);
        assert!(!keys
            .iter()
            .any(|k| k == "r" || k == "member" || k == "objectors"));
        board
            .records()
            .iter()
            .map(|rec| rec.kind.clone())
            .collect::<Vec<_>>()
    };
    let quiet = shape(3, BTreeMap::new());
    assert_eq!(
        quiet,
        shape(
            5,
            BTreeMap::from([(1, Perturbation::Random), (4, Perturbation::Random)])
        )
    );
}

#[test]
fn every_single_field_mutation_breaks_a_proof() {
    let objectors = BTreeMap::from([(0, Perturbation::Random), (2, Perturbation::Fixed(9))]);
    let out = run_unanimity_session(&params(4, 12), objectors, DEFAULT_WINDOW).unwrap();
    let s = &out.session;
    let views = [s.views[0].clone(), s.views[2].clone()];
    for round in 1..=5 {
        let proof = prove_disagreement(&views, round).unwrap();
        assert!(verify_disagreement_proof(&proof, &s.public));

        for other in (1..=6).filter(|&r| r != round) {
            let mut p = proof.clone();
            p.round = other;
            assert!(!verify_disagreement_proof(&p, &s.public));
        }
        for m in proof.originals.keys() {
            let mut p = proof.clone();
            *p.originals.get_mut(m).unwrap() -= 1;
            assert!(!verify_disagreement_proof(&p, &s.public));
        }
        for m in proof.shared.keys() {
            let mut p = proof.clone();
            *p.shared.get_mut(m).unwrap() += 1;
            assert!(!verify_disagreement_proof(&p, &s.public));
        }
    }
}

#[test]
fn two_random_objectors_are_almost_always_caught() {
    let caught = (0..40)
        .filter(|&seed| {
            let objectors = BTreeMap::from([(0, Perturbation::Random), (1, Perturbation::Random)]);
            run_unanimity_session(&params(3, seed), objectors, DEFAULT_WINDOW)
                .unwrap()
                .verdict
                == UnanimityVerdict::ObjectionDetected
        })
        .count();
    println!("two random objectors caught in {caught}/40 sessions");
    assert!(caught >= 39);
}
