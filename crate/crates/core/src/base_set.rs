//! Sets of allowed parts.
//!
//! A [`BaseSet`] may be infinite (primes, squares, odd numbers, all
//! naturals). Nothing ever needs more than the parts up to the integer being
//! partitioned, so every consumer goes through [`BaseSet::parts_up_to`].
//!
//! Seeded random sets are materialized with SplitMix64: integer `k` in
//! `1..=max_element` is a member iff the `k`-th output of a SplitMix64
//! stream started at `seed` is below `density * 2^64`. The stream is fixed
//! here, not delegated to a PRNG crate, so that the same parameters produce
//! the same parts on every platform and every dependency upgrade.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational in `(0, 1]`, stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Density {
    num: u64,
    den: u64,
}

impl Density {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidBaseSet(format!(
                "density {num}/{den} is not in (0, 1]"
            )));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn half() -> Self {
        Self { num: 1, den: 2 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// `draw / 2^64 < num / den`, evaluated exactly.
    fn admits(&self, draw: u64) -> bool {
        (draw as u128) * (self.den as u128) < (self.num as u128) << 64
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidBaseSet(format!("bad density `{s}`"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num = num.parse().map_err(|_| bad())?;
        let den = den.parse().map_err(|_| bad())?;
        Density::new(num, den)
    }
}

/// SplitMix64 (Steele, Lea and Flood), the reference constants.
#[derive(Debug, Clone)]
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// The set of parts partitions may draw from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum BaseSet {
    Primes,
    Squares,
    Odds,
    AllNaturals,
    /// Sorted, deduplicated, all positive. Build with [`BaseSet::explicit`].
    Explicit(Vec<u64>),
    SeededRandom {
        seed: u64,
        density: Density,
        max_element: u64,
    },
}

impl BaseSet {
    pub fn explicit<I: IntoIterator<Item = u64>>(parts: I) -> Result<Self> {
        let mut parts: Vec<u64> = parts.into_iter().collect();
        if parts.contains(&0) {
            return Err(Error::InvalidBaseSet("parts must be positive".into()));
        }
        parts.sort_unstable();
        parts.dedup();
        Ok(BaseSet::Explicit(parts))
    }

    pub fn seeded_random(seed: u64, density: Density, max_element: u64) -> Result<Self> {
        if max_element == 0 {
            return Err(Error::InvalidBaseSet("max_element must be positive".into()));
        }
        Ok(BaseSet::SeededRandom {
            seed,
            density,
            max_element,
        })
    }

    /// The four infinite built-in sets.
    pub fn builtin() -> [BaseSet; 4] {
        [
            BaseSet::Primes,
            BaseSet::Squares,
            BaseSet::Odds,
            BaseSet::AllNaturals,
        ]
    }

    /// Elements of the set that are `<= limit`, ascending.
    pub fn parts_up_to(&self, limit: u64) -> Vec<u64> {
        match self {
            BaseSet::Primes => primes_up_to(limit),
            BaseSet::Squares => (1..)
                .map(|k: u64| k * k)
                .take_while(|&sq| sq <= limit)
                .collect(),
            BaseSet::Odds => (1..=limit).step_by(2).collect(),
            BaseSet::AllNaturals => (1..=limit).collect(),
            BaseSet::Explicit(parts) => parts.iter().copied().take_while(|&p| p <= limit).collect(),
            BaseSet::SeededRandom {
                seed,
                density,
                max_element,
            } => {
                let mut rng = SplitMix64::new(*seed);
                (1..=limit.min(*max_element))
                    .filter(|_| density.admits(rng.next_u64()))
                    .collect()
            }
        }
    }

    pub fn contains(&self, k: u64) -> bool {
        match self {
            BaseSet::Explicit(parts) => parts.binary_search(&k).is_ok(),
            _ => k > 0 && self.parts_up_to(k).last() == Some(&k),
        }
    }
}

fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

impl fmt::Display for BaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSet::Primes => f.write_str("primes"),
            BaseSet::Squares => f.write_str("squares"),
            BaseSet::Odds => f.write_str("odds"),
            BaseSet::AllNaturals => f.write_str("naturals"),
            BaseSet::Explicit(parts) => {
                f.write_str("explicit:")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            BaseSet::SeededRandom {
                seed,
                density,
                max_element,
            } => write!(f, "random:seed={seed},density={density},max={max_element}"),
        }
    }
}

impl FromStr for BaseSet {
    type Err = Error;

    /// Accepts `primes`, `squares`, `odds`, `naturals`, `explicit:1,4,9`
    /// and `random:seed=42,density=1/2,max=200`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r.trim())),
            None => (s, None),
        };
        match (kind, rest) {
            ("primes", None) => Ok(BaseSet::Primes),
            ("squares", None) => Ok(BaseSet::Squares),
            ("odds", None) => Ok(BaseSet::Odds),
            ("naturals", None) => Ok(BaseSet::AllNaturals),
            ("explicit", Some(list)) => {
                let parts = list
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<u64>()
                            .map_err(|_| Error::InvalidBaseSet(format!("bad part `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                BaseSet::explicit(parts)
            }
            ("random", Some(fields)) => {
                let (mut seed, mut density, mut max) = (None, None, None);
                for field in fields.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                    let (key, value) = field
                        .split_once('=')
                        .ok_or_else(|| Error::InvalidBaseSet(format!("bad field `{field}`")))?;
                    let value = value.trim();
                    let bad = || Error::InvalidBaseSet(format!("bad value in `{field}`"));
                    match key.trim() {
                        "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad())?),
                        "density" => density = Some(value.parse::<Density>()?),
                        "max" => max = Some(value.parse::<u64>().map_err(|_| bad())?),
                        other => {
                            return Err(Error::InvalidBaseSet(format!("unknown field `{other}`")))
                        }
                    }
                }
                let seed = seed.ok_or_else(|| Error::InvalidBaseSet("missing seed".into()))?;
                let max = max.ok_or_else(|| Error::InvalidBaseSet("missing max".into()))?;
                BaseSet::seeded_random(seed, density.unwrap_or_else(Density::half), max)
            }
            _ => Err(Error::InvalidBaseSet(format!(
                "unrecognized base set `{s}`"
            ))),
        }
    }
}

impl From<BaseSet> for String {
    fn from(b: BaseSet) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BaseSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_truncation() {
        assert_eq!(BaseSet::Primes.parts_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(BaseSet::Squares.parts_up_to(10), vec![1, 4, 9]);
        assert_eq!(BaseSet::Odds.parts_up_to(10), vec![1, 3, 5, 7, 9]);
        assert_eq!(BaseSet::AllNaturals.parts_up_to(4), vec![1, 2, 3, 4]);
        for b in BaseSet::builtin() {
            assert!(b.parts_up_to(0).is_empty());
        }
    }

    #[test]
    fn explicit_is_sorted_and_deduplicated() {
        let b = BaseSet::explicit([9, 1, 4, 4, 1]).unwrap();
        assert_eq!(b, BaseSet::Explicit(vec![1, 4, 9]));
        assert_eq!(b.parts_up_to(5), vec![1, 4]);
        assert!(BaseSet::explicit([0, 3]).is_err());
    }

    #[test]
    fn splitmix_reference_outputs() {
        // First outputs for seed 1234567 from the reference C implementation.
        let mut rng = SplitMix64::new(1234567);
        assert_eq!(rng.next_u64(), 6457827717110365317);
        assert_eq!(rng.next_u64(), 3203168211198807973);
        assert_eq!(rng.next_u64(), 9817491932198370423);
    }

    #[test]
    fn seeded_random_is_reproducible_and_prefix_stable() {
        let b = BaseSet::seeded_random(42, Density::half(), 200).unwrap();
        let all = b.parts_up_to(1000);
        assert_eq!(all, b.clone().parts_up_to(1000));
        assert!(all.iter().all(|&p| (1..=200).contains(&p)));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let prefix = b.parts_up_to(57);
        assert_eq!(
            prefix,
            all.iter().copied().filter(|&p| p <= 57).collect::<Vec<_>>()
        );
        // Roughly half of 1..=200.
        assert!((60..=140).contains(&all.len()), "{}", all.len());
    }

    #[test]
    fn full_density_is_all_naturals() {
        let b = BaseSet::seeded_random(3, Density::new(1, 1).unwrap(), 50).unwrap();
        assert_eq!(b.parts_up_to(80), (1..=50).collect::<Vec<_>>());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "primes",
            "squares",
            "odds",
            "naturals",
            "explicit:1,4,9",
            "explicit:",
            "random:seed=42,density=1/2,max=200",
        ] {
            let b: BaseSet = s.parse().unwrap();
            assert_eq!(b.to_string(), s);
        }
        let b: BaseSet = "random: max=10, density=2/4, seed=1".parse().unwrap();
        assert_eq!(b.to_string(), "random:seed=1,density=1/2,max=10");
        assert!("random:seed=1,density=3/2,max=10"
            .parse::<BaseSet>()
            .is_err());
        assert!("random:seed=1".parse::<BaseSet>().is_err());
        assert!("evens".parse::<BaseSet>().is_err());
        assert!("explicit:1,x".parse::<BaseSet>().is_err());
    }

    #[test]
    fn membership() {
        assert!(BaseSet::Primes.contains(7));
        assert!(!BaseSet::Primes.contains(9));
        assert!(BaseSet::Squares.contains(49));
        assert!(!BaseSet::Odds.contains(0));
    }
}
