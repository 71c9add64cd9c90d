//! Brute-force recovery of the hidden arguments behind a product
//! `p_α(u)·p_α(v)` on known base sets.
//!
//! The attacker sees the product on one or more base sets and lists every
//! pair `u <= v <= bound` consistent with all of them. Arguments in the
//! protocols are small, so an exhaustive search over a bounded range is the
//! natural model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base_set::{BaseSet, Density};
use crate::error::{Error, Result};
use crate::partition::{BigCount, CountTable, MultiplicityBound};
use crate::scheme::stream;

pub const DEFAULT_BOUND_CEILING: u64 = 200;

pub type Pair = (u64, u64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub base: BaseSet,
    pub alpha: MultiplicityBound,
    #[serde(with = "crate::transcript::decimal")]
    pub value: BigCount,
}

impl Observation {
    /// What the attacker sees for hidden `(u, v)`.
    pub fn of_pair(base: BaseSet, alpha: MultiplicityBound, (u, v): Pair) -> Self {
        let table = CountTable::new(&base, Some(alpha), u.max(v));
        let value = table.get(u) * table.get(v);
        Self { base, alpha, value }
    }
}

pub fn enumerate_product_preimages(obs: &Observation, bound: u64) -> Result<BTreeSet<Pair>> {
    enumerate_product_preimages_with_ceiling(obs, bound, DEFAULT_BOUND_CEILING)
}

pub fn enumerate_product_preimages_with_ceiling(
    obs: &Observation,
    bound: u64,
    ceiling: u64,
) -> Result<BTreeSet<Pair>> {
    if bound > ceiling {
        return Err(Error::BoundTooLarge { bound, ceiling });
    }
    let table = CountTable::new(&obs.base, Some(obs.alpha), bound);
    let mut by_value: BTreeMap<&BigCount, Vec<u64>> = BTreeMap::new();
    for a in 1..=bound {
        by_value.entry(table.get(a)).or_default().push(a);
    }

    let mut pairs = BTreeSet::new();
    for u in 1..=bound {
        let cu = table.get(u);
        if cu.is_zero() {
            if obs.value.is_zero() {
                pairs.extend((1..=bound).map(|v| (u.min(v), u.max(v))));
            }
            continue;
        }
        let (q, rem) = obs.value.div_rem(cu);
        if !rem.is_zero() {
            continue;
        }
        if let Some(vs) = by_value.get(&q) {
            pairs.extend(vs.iter().filter(|&&v| v >= u).map(|&v| (u, v)));
        }
    }
    Ok(pairs)
}

/// Candidates left after each observation, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    pub candidates: BTreeSet<Pair>,
    /// `sizes[k - 1]` is the number of candidates after `k` observations.
    pub sizes: Vec<usize>,
}

pub fn attack_recover_pair(observations: &[Observation], bound: u64) -> Result<Recovery> {
    let (first, rest) = observations.split_first().ok_or(Error::NoObservations)?;
    let mut candidates = enumerate_product_preimages(first, bound)?;
    let mut sizes = vec![candidates.len()];
    for obs in rest {
        let next = enumerate_product_preimages(obs, bound)?;
        candidates.retain(|p| next.contains(p));
        sizes.push(candidates.len());
    }
    Ok(Recovery { candidates, sizes })
}

/// Hidden pairs drawn at random, each attacked with `max_k` fresh random
/// base sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackExperiment {
    pub seed: u64,
    pub trials: u32,
    pub bound: u64,
    pub alpha: MultiplicityBound,
    pub max_k: usize,
    pub density: Density,
}

impl Default for AttackExperiment {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 50,
            bound: 30,
            alpha: MultiplicityBound::new(1).expect("1 > 0"),
            max_k: 3,
            density: Density::half(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub hidden: Pair,
    pub base_sets: Vec<BaseSet>,
    pub sizes: Vec<usize>,
    pub contains_hidden: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackReport {
    pub experiment: AttackExperiment,
    pub trials: Vec<Trial>,
    pub elapsed: Duration,
}

impl AttackExperiment {
    pub fn run(&self) -> Result<AttackReport> {
        if self.max_k == 0 {
            return Err(Error::NoObservations);
        }
        if self.bound == 0 {
            return Err(Error::BadParams("bound must be positive".into()));
        }
        let start = Instant::now();
        let mut rng = stream(self.seed, 0);
        let mut trials = Vec::with_capacity(self.trials as usize);
        for _ in 0..self.trials {
            let a = rng.random_range(1..=self.bound);
            let b = rng.random_range(1..=self.bound);
            let hidden = (a.min(b), a.max(b));
            let base_sets = (0..self.max_k)
                .map(|_| BaseSet::seeded_random(rng.random(), self.density, self.bound))
                .collect::<Result<Vec<_>>>()?;
            let observations: Vec<_> = base_sets
                .iter()
                .map(|b| Observation::of_pair(b.clone(), self.alpha, hidden))
                .collect();
            let recovery = attack_recover_pair(&observations, self.bound)?;
            trials.push(Trial {
                hidden,
                base_sets,
                sizes: recovery.sizes,
                contains_hidden: recovery.candidates.contains(&hidden),
            });
        }
        Ok(AttackReport {
            experiment: self.clone(),
            trials,
            elapsed: start.elapsed(),
        })
    }
}

impl AttackReport {
    /// Mean candidate count after `k` observations.
    pub fn mean_size(&self, k: usize) -> f64 {
        let total: usize = self.trials.iter().map(|t| t.sizes[k - 1]).sum();
        total as f64 / self.trials.len().max(1) as f64
    }

    pub fn always_sound(&self) -> bool {
        self.trials.iter().all(|t| t.contains_hidden)
    }

    pub fn always_narrowing(&self) -> bool {
        self.trials
            .iter()
            .all(|t| t.sizes.windows(2).all(|w| w[1] <= w[0]))
    }
}

impl fmt::Display for AttackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.experiment;
        writeln!(
            f,
            "attack seed={} trials={} bound={} alpha={} density={}",
            e.seed,
            e.trials,
            e.bound,
            e.alpha.get(),
            e.density
        )?;
        for k in 1..=e.max_k {
            let sizes = self.trials.iter().map(|t| t.sizes[k - 1]);
            let unique = self.trials.iter().filter(|t| t.sizes[k - 1] == 1).count();
            writeln!(
                f,
                "k={k} mean={:.2} max={} unique={unique}/{}",
                self.mean_size(k),
                sizes.max().unwrap_or(0),
                self.trials.len()
            )?;
        }
        writeln!(
            f,
            "sound={} narrowing={}",
            self.always_sound(),
            self.always_narrowing()
        )?;
        write!(f, "elapsed_ms={}", self.elapsed.as_millis())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> MultiplicityBound {
        MultiplicityBound::new(1).unwrap()
    }

    #[test]
    fn squares_value_one() {
        let obs = Observation {
            base: BaseSet::Squares,
            alpha: one(),
            value: 1u32.into(),
        };
        let pairs = enumerate_product_preimages(&obs, 10).unwrap();
        // Distinct-square partition counts up to 10: 1 at 1, 4, 5, 9, 10.
        let ones = [1, 4, 5, 9, 10];
        let expected: BTreeSet<Pair> = ones
            .iter()
            .flat_map(|&u| ones.iter().filter(move |&&v| v >= u).map(move |&v| (u, v)))
            .collect();
        assert_eq!(pairs, expected);
        assert!(pairs.contains(&(1, 1)));
    }

    #[test]
    fn zero_value_means_a_zero_factor() {
        let obs = Observation {
            base: BaseSet::Primes,
            alpha: one(),
            value: 0u32.into(),
        };
        let pairs = enumerate_product_preimages(&obs, 6).unwrap();
        // Distinct primes: counts zero at 1, 4 and 6.
        for u in 1..=6u64 {
            for v in u..=6 {
                let zero = [1, 4, 6].contains(&u) || [1, 4, 6].contains(&v);
                assert_eq!(pairs.contains(&(u, v)), zero, "{u},{v}");
            }
        }
    }

    #[test]
    fn bound_ceiling() {
        let obs = Observation::of_pair(BaseSet::Odds, one(), (3, 4));
        assert_eq!(
            enumerate_product_preimages(&obs, 201),
            Err(Error::BoundTooLarge {
                bound: 201,
                ceiling: 200
            })
        );
    }

    #[test]
    fn intersection_narrows() {
        let hidden = (7, 12);
        let obs: Vec<_> = BaseSet::builtin()
            .into_iter()
            .map(|b| Observation::of_pair(b, one(), hidden))
            .collect();
        let rec = attack_recover_pair(&obs, 20).unwrap();
        assert!(rec.candidates.contains(&hidden));
        assert!(rec.sizes.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(attack_recover_pair(&[], 20), Err(Error::NoObservations));
    }

    #[test]
    fn experiment_is_reproducible() {
        let e = AttackExperiment {
            trials: 5,
            ..AttackExperiment::default()
        };
        let a = e.run().unwrap();
        let b = e.run().unwrap();
        assert_eq!(a.trials, b.trials);
        assert!(a.always_sound() && a.always_narrowing());
        assert!(a.to_string().contains("k=3 mean="));
    }
}
