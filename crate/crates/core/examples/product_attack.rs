// How many argument pairs fit an observed product of capped counts, and
// how fast that shrinks with more base sets.

use std::error::Error;

use partshare::adversary::{attack_recover_pair, AttackExperiment, Observation};
use partshare::base_set::{BaseSet, Density};
use partshare::partition::MultiplicityBound;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alpha = MultiplicityBound::new(1)?;
    let hidden = (9, 23);
    let observations: Vec<Observation> = (0..3)
        .map(|seed| {
            BaseSet::seeded_random(seed, Density::half(), 30)
                .map(|b| Observation::of_pair(b, alpha, hidden))
        })
        .collect::<Result<_, _>>()?;
    let recovery = attack_recover_pair(&observations, 30)?;
    println!(
        "hidden {hidden:?}: candidates after each set {:?}",
        recovery.sizes
    );

    let report = AttackExperiment {
        trials: 20,
        ..AttackExperiment::default()
    }
    .run()?;
    println!("{report}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
