//! Exact partition counts over a base set, with and without a bound on how
//! often a part may repeat.
//!
//! Counting is a bottom-up dynamic program over the parts `<= n`; for the
//! bounded count each part contributes a factor `1 + x^a + ... + x^(alpha*a)`
//! to the generating function. All arithmetic is arbitrary precision.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::base_set::BaseSet;
use crate::error::{Error, Result};

/// A partition count. Never negative, never overflows.
pub type BigCount = BigUint;

/// Largest `n` the enumeration oracle accepts unless told otherwise.
pub const DEFAULT_ORACLE_CEILING: u64 = 30;

/// Maximum number of times a single part may appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct MultiplicityBound(u32);

impl MultiplicityBound {
    pub fn new(alpha: u32) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::ZeroMultiplicityBound);
        }
        Ok(Self(alpha))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `alpha + 1`, the radix of the solution-matrix representation.
    pub fn radix(self) -> u64 {
        self.0 as u64 + 1
    }
}

impl TryFrom<u32> for MultiplicityBound {
    type Error = Error;

    fn try_from(alpha: u32) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<MultiplicityBound> for u32 {
    fn from(b: MultiplicityBound) -> u32 {
        b.0
    }
}

impl fmt::Display for MultiplicityBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// All counts `p(0), ..., p(limit)` for one base set and one bound, computed
/// in a single pass. Protocol rounds evaluate hundreds of factors against
/// the same base set, so they build one table and look values up.
#[derive(Debug, Clone)]
pub struct CountTable {
    alpha: Option<MultiplicityBound>,
    values: Vec<BigCount>,
}

impl CountTable {
    /// `alpha = None` counts unrestricted partitions.
    pub fn new(base: &BaseSet, alpha: Option<MultiplicityBound>, limit: u64) -> Self {
        let parts = base.parts_up_to(limit);
        Self::from_parts(&parts, alpha, limit)
    }

    pub fn from_parts(parts: &[u64], alpha: Option<MultiplicityBound>, limit: u64) -> Self {
        let len = limit as usize + 1;
        let mut values = vec![BigCount::zero(); len];
        values[0] = BigCount::one();
        for &part in parts.iter().filter(|&&p| p <= limit) {
            let part = part as usize;
            match alpha {
                None => {
                    for m in part..len {
                        let (lo, hi) = values.split_at_mut(m);
                        hi[0] += &lo[m - part];
                    }
                }
                Some(bound) => {
                    let prev = values.clone();
                    for (m, slot) in values.iter_mut().enumerate().skip(part) {
                        for j in 1..=bound.get() as usize {
                            let Some(rest) = m.checked_sub(j * part) else {
                                break;
                            };
                            *slot += &prev[rest];
                        }
                    }
                }
            }
        }
        Self { alpha, values }
    }

    pub fn alpha(&self) -> Option<MultiplicityBound> {
        self.alpha
    }

    pub fn limit(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    /// Panics if `n` is above the table's limit.
    pub fn get(&self, n: u64) -> &BigCount {
        assert!(
            n <= self.limit(),
            "count table built up to {} queried at {n}",
            self.limit()
        );
        &self.values[n as usize]
    }
}

/// `p^A(n)`: partitions of `n` into parts from `base`, any multiplicity.
pub fn count_unrestricted(base: &BaseSet, n: u64) -> BigCount {
    CountTable::new(base, None, n).get(n).clone()
}

/// `p^A_alpha(n)`: partitions of `n` into parts from `base`, no part used
/// more than `alpha` times.
pub fn count_bounded(base: &BaseSet, alpha: MultiplicityBound, n: u64) -> BigCount {
    CountTable::new(base, Some(alpha), n).get(n).clone()
}

/// A partition with its parts in descending order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn sum(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Largest number of times any single part repeats.
    pub fn max_multiplicity(&self) -> usize {
        self.parts
            .chunk_by(|a, b| a == b)
            .map(<[u64]>::len)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("()");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Lists every partition of `n` into parts from `base`, optionally bounded,
/// sorted lexicographically. This is the slow oracle the counters are checked
/// against; it refuses `n` above [`DEFAULT_ORACLE_CEILING`].
pub fn enumerate_partitions(
    base: &BaseSet,
    alpha: Option<MultiplicityBound>,
    n: u64,
) -> Result<Vec<Partition>> {
    enumerate_partitions_with_ceiling(base, alpha, n, DEFAULT_ORACLE_CEILING)
}

pub fn enumerate_partitions_with_ceiling(
    base: &BaseSet,
    alpha: Option<MultiplicityBound>,
    n: u64,
    ceiling: u64,
) -> Result<Vec<Partition>> {
    if n > ceiling {
        return Err(Error::OracleCeilingExceeded { n, ceiling });
    }
    let parts = base.parts_up_to(n);
    let max_repeat = alpha.map_or(u64::MAX, |a| a.get() as u64);
    let mut out = Vec::new();
    let mut current = Vec::new();
    descend(&parts, parts.len(), n, max_repeat, &mut current, &mut out);
    out.sort();
    Ok(out)
}

// Parts are chosen from parts[..upto], largest first, so each partition is
// produced once with its parts already descending.
fn descend(
    parts: &[u64],
    upto: usize,
    remaining: u64,
    max_repeat: u64,
    current: &mut Vec<u64>,
    out: &mut Vec<Partition>,
) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for idx in (0..upto).rev() {
        let part = parts[idx];
        let mut used = 0;
        let mut left = remaining;
        while used < max_repeat && left >= part {
            used += 1;
            left -= part;
            current.push(part);
            descend(parts, idx, left, max_repeat, current, out);
        }
        current.truncate(current.len() - used as usize);
    }
}
