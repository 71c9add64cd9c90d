//! Hashing integer vote vectors for the fair-vote inspection table.
//!
//! Encoding of a vector `(x_1, ..., x_r)`, per entry: one sign byte
//! (`0x00` nonnegative, `0x01` negative), the magnitude's byte length as a
//! 4-byte big-endian integer, then the magnitude big-endian with no leading
//! zero bytes (zero has an empty magnitude). Entries are separated by
//! [`ENTRY_DELIMITER`]. Length prefixes make the encoding injective.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256, Sha512};

use crate::error::{Error, Result};

pub const ENTRY_DELIMITER: u8 = 0x1f;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashAlgorithm {
    #[default]
    Sha256,
    Sha512,
}

impl fmt::Display for HashAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HashAlgorithm::Sha256 => "sha256",
            HashAlgorithm::Sha512 => "sha512",
        })
    }
}

impl FromStr for HashAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "sha256" => Ok(HashAlgorithm::Sha256),
            "sha512" => Ok(HashAlgorithm::Sha512),
            _ => Err(Error::Config(format!("unknown hash `{s}`"))),
        }
    }
}

/// A digest, hex encoded.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoteDigest(String);

impl VoteDigest {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VoteDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The function `h: Z^r -> digest` both the commission and the
/// decision-makers apply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashSpec {
    pub algorithm: HashAlgorithm,
}

impl HashSpec {
    pub fn new(algorithm: HashAlgorithm) -> Self {
        Self { algorithm }
    }

    pub fn encode(&self, vector: &[BigInt]) -> Vec<u8> {
        let mut out = Vec::new();
        for (i, x) in vector.iter().enumerate() {
            if i > 0 {
                out.push(ENTRY_DELIMITER);
            }
            let (sign, magnitude) = x.to_bytes_be();
            out.push(u8::from(sign == Sign::Minus));
            let magnitude: &[u8] = if sign == Sign::NoSign {
                &[]
            } else {
                &magnitude
            };
            let len = u32::try_from(magnitude.len()).expect("entry shorter than 4 GiB");
            out.extend_from_slice(&len.to_be_bytes());
            out.extend_from_slice(magnitude);
        }
        out
    }

    pub fn hash(&self, vector: &[BigInt]) -> VoteDigest {
        let bytes = self.encode(vector);
        let digest: Vec<u8> = match self.algorithm {
            HashAlgorithm::Sha256 => Sha256::digest(&bytes).to_vec(),
            HashAlgorithm::Sha512 => Sha512::digest(&bytes).to_vec(),
        };
        VoteDigest(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Largest `r` for which the `2^r`-entry table is built by default.
pub const DEFAULT_TABLE_CEILING: usize = 24;

/// Hashes of every fair vote `V + w`, `w` in `{0, 1}^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairTable {
    pub digests: BTreeSet<VoteDigest>,
}

impl FairTable {
    pub fn contains(&self, digest: &VoteDigest) -> bool {
        self.digests.contains(digest)
    }

    pub fn len(&self) -> usize {
        self.digests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digests.is_empty()
    }
}

pub fn publish_fair_vote_table(
    values: &[BigInt],
    hash: &HashSpec,
    ceiling: usize,
) -> Result<FairTable> {
    let r = values.len();
    if r > ceiling || r >= usize::BITS as usize {
        return Err(Error::TableTooLarge { r, ceiling });
    }
    let mut digests = BTreeSet::new();
    let mut vote = values.to_vec();
    for mask in 0usize..1 << r {
        for (s, slot) in vote.iter_mut().enumerate() {
            *slot = &values[s] + ((mask >> s) & 1);
        }
        digests.insert(hash.hash(&vote));
    }
    Ok(FairTable { digests })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inspection {
    Fair,
    Fraudulent,
}

pub fn check_vote_hash(cast: &[BigInt], table: &FairTable, hash: &HashSpec) -> Inspection {
    if table.contains(&hash.hash(cast)) {
        Inspection::Fair
    } else {
        Inspection::Fraudulent
    }
}
