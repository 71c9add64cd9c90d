// Unanimity votes: nobody objects, one member objects and proves it, and
// two objectors whose changes cancel slip through.

use std::collections::BTreeMap;
use std::error::Error;

use partshare::scheme::SchemeParams;
use partshare::unanimity::{
    prove_disagreement, run_unanimity_session, verify_disagreement_proof, Perturbation,
    DEFAULT_WINDOW,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let params = SchemeParams {
        rng_seed: 21,
        ..SchemeParams::default()
    };

    let quiet = run_unanimity_session(&params, BTreeMap::new(), DEFAULT_WINDOW)?;
    println!("no objectors: {:?}", quiet.verdict);

    let one = run_unanimity_session(
        &params,
        BTreeMap::from([(1, Perturbation::Random)]),
        DEFAULT_WINDOW,
    )?;
    let proof = prove_disagreement(&[one.session.views[1].clone()], 1)?;
    println!(
        "one objector: {:?}, proof verifies: {}",
        one.verdict,
        verify_disagreement_proof(&proof, &one.session.public)
    );

    let pair = BTreeMap::from([(0, Perturbation::Fixed(40)), (2, Perturbation::Fixed(-40))]);
    let cancel = run_unanimity_session(&params, pair, DEFAULT_WINDOW)?;
    println!(
        "cancelling objectors: {:?}, deltas {:?}",
        cancel.verdict, cancel.session.rounds[0].debug_deltas
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
