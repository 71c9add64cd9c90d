// Expanding (p(n1) - p_a(n1))(p(n2) - p_a(n2)) into products of capped
// counts, then checking the expansion on a random base set.

use std::error::Error;

use partshare::base_set::{BaseSet, Density};
use partshare::identity::{expand_pair_product, Evaluator};
use partshare::partition::MultiplicityBound;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alpha = MultiplicityBound::new(1)?;
    let expansion = expand_pair_product(10, 10, alpha)?;
    println!(
        "{} terms, largest argument {}",
        expansion.len(),
        expansion.max_arg()
    );
    for t in expansion.terms().iter().take(5) {
        println!("  [{}] {}", t.origin(), t.render(alpha));
    }

    for base in [
        BaseSet::Primes,
        BaseSet::seeded_random(7, Density::half(), 40)?,
    ] {
        let eval = Evaluator::new(&base, alpha, 10);
        let value = expansion.evaluate(eval.bounded());
        let masked = eval.masked_product(10, 10);
        println!("{base}: expansion={value} masked product={masked}");
        if value != masked {
            return Err("expansion does not match".into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
