// Three members prove they hold shares: once honestly, once with a member
// who reports shifted values and gets caught.

use std::error::Error;

use partshare::membership::{run_membership_session, Behavior, Verdict};
use partshare::scheme::SchemeParams;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let params = SchemeParams {
        rng_seed: 11,
        ..SchemeParams::default()
    };

    let honest = run_membership_session(&params, &[])?;
    println!(
        "honest: {:?}, {} rows dealt, {} board records",
        honest.verdict,
        honest
            .setup
            .shares
            .iter()
            .map(|s| s.rows.len())
            .sum::<usize>(),
        honest.transcript.len()
    );

    let behaviors = [
        Behavior::Honest,
        Behavior::ConstantOffset(3),
        Behavior::Honest,
    ];
    let caught = run_membership_session(&params, &behaviors)?;
    println!(
        "with cheater: {:?}, cheaters {:?}",
        caught.verdict, caught.cheaters
    );
    if honest.verdict != Verdict::Accept || caught.cheaters.iter().ne([1].iter()) {
        return Err("unexpected verdict".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
