//! Pieces shared by the three protocol simulators: parameters, the split of
//! an expansion row into a secret factor group and a public complement, and
//! the per-round base-set search.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base_set::{BaseSet, Density};
use crate::error::{Error, Result};
use crate::identity::{expand_pair_product, Evaluator, ExpandedProduct, Term};
use crate::partition::{BigCount, CountTable, MultiplicityBound};

/// Parameters of a scheme instance. Secret on the dealer's side: `n1`,
/// `n2`. Public: `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n1: u64,
    pub n2: u64,
    pub alpha: MultiplicityBound,
    /// Number of members / decision-makers.
    pub r: usize,
    /// Minimum distance of a secret argument from 1, `n1` and `n2`.
    pub delta: u64,
    pub rounds: u32,
    pub rng_seed: u64,
    /// Fraction of eligible expansion rows handed out to members.
    pub distribute_ratio: Density,
    /// Base-set candidates tried per round before giving up.
    pub max_retries: u32,
    pub round_density: Density,
    pub round_max_element: u64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            n1: 17,
            n2: 19,
            alpha: MultiplicityBound::new(2).expect("2 > 0"),
            r: 3,
            delta: 2,
            rounds: 5,
            rng_seed: 0,
            distribute_ratio: Density::half(),
            max_retries: 32,
            round_density: Density::half(),
            round_max_element: 1024,
        }
    }
}

impl SchemeParams {
    pub fn validate(&self) -> Result<()> {
        let alpha = self.alpha.get() as u64;
        for (name, n) in [("n1", self.n1), ("n2", self.n2)] {
            if n < self.alpha.radix() {
                return Err(Error::BadParams(format!(
                    "{name} = {n} is below alpha + 1 = {}",
                    self.alpha.radix()
                )));
            }
            if n.gcd(&alpha) != 1 {
                return Err(Error::BadParams(format!(
                    "gcd({name}, alpha) = {} (must be 1)",
                    n.gcd(&alpha)
                )));
            }
        }
        if self.r < 2 {
            return Err(Error::BadParams(format!(
                "need at least 2 parties, got {}",
                self.r
            )));
        }
        if self.delta == 0 {
            return Err(Error::BadParams("delta must be positive".into()));
        }
        if self.rounds == 0 {
            return Err(Error::BadParams("need at least one round".into()));
        }
        if self.round_max_element == 0 {
            return Err(Error::BadParams(
                "round_max_element must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Whether `arg` is far enough from 1, `n1` and `n2` to be handed out.
    pub fn clears_margin(&self, arg: u64) -> bool {
        arg > self.delta
            && arg.abs_diff(self.n1) >= self.delta
            && arg.abs_diff(self.n2) >= self.delta
    }

    pub fn expansion(&self) -> Result<ExpandedProduct> {
        expand_pair_product(self.n1, self.n2, self.alpha)
    }

    /// Splits expansion row `row` into the arguments that clear the margin
    /// and the rest.
    pub fn split(&self, row: usize, term: &Term) -> SplitRow {
        let (secret_args, public_args) = term.args().iter().partition(|&&a| self.clears_margin(a));
        SplitRow {
            row,
            secret_args,
            public_args,
        }
    }

    /// Table sizes for evaluating anything this instance produces.
    pub(crate) fn evaluator(&self, base: &BaseSet) -> Evaluator {
        Evaluator::new(base, self.alpha, self.n1.max(self.n2))
    }
}

/// An expansion row cut into a secret factor group (held by one party) and
/// a public complement (whose value is announced each round).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRow {
    pub row: usize,
    pub secret_args: Vec<u64>,
    pub public_args: Vec<u64>,
}

impl SplitRow {
    /// At least two secret factors, so no single count is ever revealed.
    pub fn is_distributable(&self) -> bool {
        self.secret_args.len() >= 2
    }

    pub fn secret_share(&self) -> ShareRow {
        ShareRow {
            row: self.row,
            args: self.secret_args.clone(),
        }
    }

    pub fn complement(&self, table: &CountTable) -> BigCount {
        product(&self.public_args, table)
    }
}

/// The secret half of a split row, as a party holds it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareRow {
    pub row: usize,
    pub args: Vec<u64>,
}

impl ShareRow {
    pub fn evaluate(&self, table: &CountTable) -> BigCount {
        product(&self.args, table)
    }
}

/// An expansion row id with a value attached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowValue {
    pub row: usize,
    #[serde(with = "crate::transcript::decimal")]
    pub value: BigInt,
}

fn product(args: &[u64], table: &CountTable) -> BigCount {
    args.iter().map(|&a| table.get(a)).product()
}

/// Independent ChaCha streams off one seed, so that e.g. the base sets of a
/// session do not depend on how much randomness cheaters consume.
pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub(crate) const SETUP_STREAM: u64 = 0;
pub(crate) const ROUND_STREAM: u64 = 1;
pub(crate) const BEHAVIOR_STREAM: u64 = 2;

/// Draws random base sets until `viable` accepts one.
pub(crate) fn search_base_set<R: Rng, F: FnMut(&BaseSet) -> bool>(
    rng: &mut R,
    params: &SchemeParams,
    mut viable: F,
) -> Result<(BaseSet, u32)> {
    for attempt in 1..=params.max_retries {
        let candidate =
            BaseSet::seeded_random(rng.random(), params.round_density, params.round_max_element)?;
        if viable(&candidate) {
            return Ok((candidate, attempt));
        }
    }
    Err(Error::NoViableBaseSet {
        attempts: params.max_retries,
    })
}
