//! Append-only bulletin board shared by every protocol session.
//!
//! Each record is `{seq, role, kind, payload}` and the whole log serializes
//! as line-delimited JSON. Big integers travel as decimal strings.

use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

/// Who published a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Bank employee in the membership scheme.
    Dealer,
    /// Election commission in the ballot and unanimity schemes.
    Commission,
    Member(usize),
    /// Decision-makers speaking jointly.
    DecisionMakers,
    /// Computations anyone can redo from earlier records.
    Public,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Dealer => f.write_str("dealer"),
            Role::Commission => f.write_str("commission"),
            Role::Member(id) => write!(f, "member:{id}"),
            Role::DecisionMakers => f.write_str("decision_makers"),
            Role::Public => f.write_str("public"),
        }
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dealer" => Ok(Role::Dealer),
            "commission" => Ok(Role::Commission),
            "decision_makers" => Ok(Role::DecisionMakers),
            "public" => Ok(Role::Public),
            _ => s
                .strip_prefix("member:")
                .and_then(|id| id.parse().ok())
                .map(Role::Member)
                .ok_or_else(|| Error::Transcript(format!("unknown role `{s}`"))),
        }
    }
}

impl Serialize for Role {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Role {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub seq: u64,
    pub role: Role,
    pub kind: String,
    pub payload: Value,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    records: Vec<Record>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push<T: Serialize>(&mut self, role: Role, kind: &str, payload: &T) {
        let payload = serde_json::to_value(payload).expect("transcript payloads serialize");
        self.records.push(Record {
            seq: self.records.len() as u64,
            role,
            kind: kind.to_owned(),
            payload,
        });
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.kind == kind)
    }

    /// Decodes every payload of `kind`, in log order.
    pub fn payloads<T: DeserializeOwned>(&self, kind: &str) -> Result<Vec<T>> {
        self.of_kind(kind)
            .map(|r| {
                serde_json::from_value(r.payload.clone())
                    .map_err(|e| Error::Transcript(format!("record {} ({kind}): {e}", r.seq)))
            })
            .collect()
    }

    pub fn last_payload<T: DeserializeOwned>(&self, kind: &str) -> Result<Option<T>> {
        Ok(self.payloads(kind)?.pop())
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let record: Record = serde_json::from_str(line)
                .map_err(|e| Error::Transcript(format!("line {}: {e}", i + 1)))?;
            if record.seq != records.len() as u64 {
                return Err(Error::Transcript(format!(
                    "line {}: expected seq {}, found {}",
                    i + 1,
                    records.len(),
                    record.seq
                )));
            }
            records.push(record);
        }
        Ok(Self { records })
    }
}

/// Serde adapter: any `Display + FromStr` value as a JSON string. Used for
/// big integers so that transcripts stay exact and readable.
pub mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    /// The same, for a vector of values.
    pub mod vec {
        use std::fmt::Display;
        use std::str::FromStr;

        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Vec::<String>::deserialize(d)?
                .into_iter()
                .map(|s| s.parse().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
