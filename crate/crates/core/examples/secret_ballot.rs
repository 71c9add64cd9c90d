// A five-voter secret ballot: an honest item, then an item where one voter
// adds 2 instead of 0 or 1 and the hash inspection flags it.

use std::error::Error;

use partshare::ballot::{BallotOptions, BallotSession};
use partshare::scheme::SchemeParams;
use partshare::vote_hash::Inspection;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let params = SchemeParams {
        r: 5,
        rng_seed: 3,
        ..SchemeParams::default()
    };
    let mut session = BallotSession::new(&params, BallotOptions::default())?;

    let fair = session.vote(&[1, 0, 1, 1, 0], 100)?;
    let tally = fair.tally.clone()?;
    println!(
        "item {}: ayes={} nays={} inspection={:?}",
        fair.item, tally.ayes, tally.nays, fair.inspection
    );

    let rigged = session.vote(&[1, 2, 0, 0, 0], 101)?;
    println!(
        "item {}: tally={:?} inspection={:?}",
        rigged.item, rigged.tally, rigged.inspection
    );
    if rigged.inspection != Some(Inspection::Fraudulent) {
        return Err("fraud went unnoticed".into());
    }
    println!("{} public records", session.transcript.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
