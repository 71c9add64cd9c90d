// Partition counts into primes, squares and odd numbers, with and without
// a cap on repeated parts.

use std::error::Error;

use partshare::base_set::BaseSet;
use partshare::partition::{enumerate_partitions, CountTable, MultiplicityBound};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let n = 10;
    let distinct = MultiplicityBound::new(1)?;
    for base in [BaseSet::Primes, BaseSet::Squares, BaseSet::Odds] {
        let all = CountTable::new(&base, None, n);
        let capped = CountTable::new(&base, Some(distinct), n);
        println!(
            "{base}: p({n}) = {}, distinct parts: {}",
            all.get(n),
            capped.get(n)
        );
        for p in enumerate_partitions(&base, None, n)? {
            println!("  {p}");
        }
    }

    // The table is exact well past 64 bits.
    let big = CountTable::new(&BaseSet::AllNaturals, None, 500);
    println!("p(500) = {}", big.get(500));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
