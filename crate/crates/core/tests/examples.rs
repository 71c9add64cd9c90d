macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(
    count_partitions,
    "count_partitions.rs",
    count_partitions_runs
);
example!(golden_identity, "golden_identity.rs", golden_identity_runs);
example!(
    masked_expansion,
    "masked_expansion.rs",
    masked_expansion_runs
);
example!(
    membership_session,
    "membership_session.rs",
    membership_session_runs
);
example!(secret_ballot, "secret_ballot.rs", secret_ballot_runs);
example!(unanimity_vote, "unanimity_vote.rs", unanimity_vote_runs);
example!(product_attack, "product_attack.rs", product_attack_runs);
