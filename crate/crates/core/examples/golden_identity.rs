// The identity for n = 10, alpha = 1 on three base sets: the solution rows,
// the terms they produce, and both sides evaluated.

use std::error::Error;

use partshare::base_set::BaseSet;
use partshare::identity::{build_identity, enumerate_solutions, verify_identity};
use partshare::partition::MultiplicityBound;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alpha = MultiplicityBound::new(1)?;
    let matrix = enumerate_solutions(10, alpha);
    print!("{}", matrix.to_text());

    let expr = build_identity(10, alpha);
    let terms: Vec<String> = expr.terms().iter().map(|t| t.render(alpha)).collect();
    println!("p(10) = {}", terms.join(" + "));

    for base in [BaseSet::Primes, BaseSet::Squares, BaseSet::Odds] {
        let report = verify_identity(10, alpha, &base);
        println!(
            "{base}: lhs={} rhs={} equal={}",
            report.lhs, report.rhs, report.equal
        );
        if !report.equal {
            return Err(format!("identity failed on {base}").into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
