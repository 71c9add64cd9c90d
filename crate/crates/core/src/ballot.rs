//! Secret ballot with anonymous fraud inspection.
//!
//! The commission picks `2r` eligible expansion rows `E`. Decision-maker `s`
//! privately receives the secret factor groups `v'` of rows `E[s]` and
//! `E[r+s]`; the factor groups `u'` of every other row are published as
//! argument lists. On the vote's base set the commission announces the
//! complement values `v` and `u`, every decision-maker forms
//! `V_s = v'_{i_s} v_{i_s} + v'_{i_{r+s}} v_{i_{r+s}}` and casts
//! `W_s = V_s + 1` (aye) or `W_s = V_s` (nay). Since the rows together make
//! up the whole expansion,
//!
//! ```text
//! ayes = sum_s W_s + sum_{k not in E} u'_k u_k - (p(n1) - p_a(n1)) (p(n2) - p_a(n2)).
//! ```
//!
//! Only the sum and a hash of `(W_s)` reach the public board; the individual
//! `W_s` stay on the decision-makers' channel.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::base_set::BaseSet;
use crate::error::{Error, Result};
use crate::identity::{Evaluator, ExpandedProduct};
use crate::partition::{CountTable, MultiplicityBound};
use crate::scheme::{
    search_base_set, stream, RowValue, SchemeParams, ShareRow, SplitRow, ROUND_STREAM, SETUP_STREAM,
};
use crate::transcript::{decimal, Role, Transcript};
use crate::vote_hash::{
    check_vote_hash, publish_fair_vote_table, FairTable, HashSpec, Inspection, VoteDigest,
    DEFAULT_TABLE_CEILING,
};

/// The commission's view after setup.
#[derive(Debug, Clone)]
pub struct BallotSetup {
    params: SchemeParams,
    expansion: ExpandedProduct,
    /// `E` in order `i_1, ..., i_2r`.
    chosen: Vec<usize>,
    /// Every expansion row, split.
    splits: Vec<SplitRow>,
}

impl BallotSetup {
    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn expansion(&self) -> &ExpandedProduct {
        &self.expansion
    }

    pub fn chosen_rows(&self) -> &[usize] {
        &self.chosen
    }

    pub fn r(&self) -> usize {
        self.params.r
    }

    /// Rows `(i_s, i_{r+s})` of decision-maker `s` (zero based).
    pub fn rows_of(&self, voter: usize) -> (usize, usize) {
        (self.chosen[voter], self.chosen[self.r() + voter])
    }

    /// Rows outside `E`, ascending.
    pub fn public_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = (0..self.splits.len())
            .filter(|row| !self.chosen.contains(row))
            .collect();
        rows.sort_unstable();
        rows
    }

    pub fn split(&self, row: usize) -> &SplitRow {
        &self.splits[row]
    }

    /// `V_s` for every decision-maker, as the commission computes it.
    pub fn voter_values(&self, table: &CountTable) -> Vec<BigInt> {
        (0..self.r())
            .map(|s| {
                let (a, b) = self.rows_of(s);
                let row_value = |row: usize| {
                    let split = &self.splits[row];
                    split.secret_share().evaluate(table) * split.complement(table)
                };
                BigInt::from(row_value(a) + row_value(b))
            })
            .collect()
    }

    /// The complement values `v` (per decision-maker) and `u` (per public
    /// row) announced for one base set.
    pub fn published_pairs(&self, table: &CountTable) -> PublishedPairs {
        let pairs = (0..self.r())
            .map(|voter| {
                let (a, b) = self.rows_of(voter);
                VoterPair {
                    voter,
                    first: self.splits[a].complement(table).into(),
                    second: self.splits[b].complement(table).into(),
                }
            })
            .collect();
        let u_values = self
            .public_rows()
            .into_iter()
            .map(|row| RowValue {
                row,
                value: self.splits[row].complement(table).into(),
            })
            .collect();
        PublishedPairs { pairs, u_values }
    }

    /// Every `V_s` and every announced complement is nonzero on `base`.
    pub fn is_viable(&self, base: &BaseSet) -> bool {
        let eval = self.params.evaluator(base);
        let table = eval.bounded();
        self.voter_values(table).iter().all(|v| !v.is_zero())
            && self.splits.iter().all(|s| !s.complement(table).is_zero())
    }
}

/// Decision-maker `voter`'s private share: the factor groups `v'` of its two
/// rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterShare {
    pub voter: usize,
    pub first: ShareRow,
    pub second: ShareRow,
}

/// A public row's published factor group `u'_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicFactor {
    pub row: usize,
    pub args: Vec<u64>,
}

/// What the public learns at setup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallotPublic {
    pub alpha: MultiplicityBound,
    pub r: usize,
    pub u_prime: Vec<PublicFactor>,
}

impl BallotPublic {
    fn max_arg(&self) -> u64 {
        self.u_prime
            .iter()
            .flat_map(|f| f.args.iter().copied())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterPair {
    pub voter: usize,
    #[serde(with = "decimal")]
    pub first: BigInt,
    #[serde(with = "decimal")]
    pub second: BigInt,
}

/// The per-vote announcement `(v_{i_s}, v_{i_{r+s}})_s, (u_k)_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishedPairs {
    pub pairs: Vec<VoterPair>,
    pub u_values: Vec<RowValue>,
}

pub fn ballot_setup(params: &SchemeParams) -> Result<(BallotSetup, Vec<VoterShare>, BallotPublic)> {
    params.validate()?;
    let expansion = params.expansion()?;
    let splits: Vec<SplitRow> = expansion
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| params.split(i, t))
        .collect();
    let mut eligible: Vec<usize> = splits
        .iter()
        .filter(|s| s.is_distributable())
        .map(|s| s.row)
        .collect();
    if eligible.len() < 2 * params.r + 1 {
        return Err(Error::InfeasibleDistribution(format!(
            "{} eligible rows, need {} for {} decision-makers",
            eligible.len(),
            2 * params.r + 1,
            params.r
        )));
    }
    let mut rng = stream(params.rng_seed, SETUP_STREAM);
    eligible.shuffle(&mut rng);
    eligible.truncate(2 * params.r);

    let setup = BallotSetup {
        params: params.clone(),
        expansion,
        chosen: eligible,
        splits,
    };
    let shares = (0..params.r)
        .map(|voter| {
            let (a, b) = setup.rows_of(voter);
            VoterShare {
                voter,
                first: setup.splits[a].secret_share(),
                second: setup.splits[b].secret_share(),
            }
        })
        .collect();
    let public = BallotPublic {
        alpha: params.alpha,
        r: params.r,
        u_prime: setup
            .public_rows()
            .into_iter()
            .map(|row| PublicFactor {
                row,
                args: setup.splits[row].secret_args.clone(),
            })
            .collect(),
    };
    Ok((setup, shares, public))
}

/// Draws base sets from `seed` until every `V_s` and every announced
/// complement is nonzero.
pub fn select_ballot_base_set(setup: &BallotSetup, seed: u64) -> Result<(BaseSet, u32)> {
    let mut rng = stream(seed, ROUND_STREAM);
    search_base_set(&mut rng, setup.params(), |b| setup.is_viable(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterValue {
    pub voter: usize,
    #[serde(with = "decimal")]
    pub value: BigInt,
}

/// `V_s`, computed by the decision-maker from its share and the announced
/// complements.
pub fn compute_voter_value(
    share: &VoterShare,
    pairs: &PublishedPairs,
    base: &BaseSet,
    alpha: MultiplicityBound,
) -> Result<VoterValue> {
    let pair = pairs
        .pairs
        .iter()
        .find(|p| p.voter == share.voter)
        .ok_or_else(|| Error::Transcript(format!("no pair announced for voter {}", share.voter)))?;
    let limit = share
        .first
        .args
        .iter()
        .chain(&share.second.args)
        .copied()
        .max()
        .unwrap_or(0);
    let table = CountTable::new(base, Some(alpha), limit);
    let value = BigInt::from(share.first.evaluate(&table)) * &pair.first
        + BigInt::from(share.second.evaluate(&table)) * &pair.second;
    Ok(VoterValue {
        voter: share.voter,
        value,
    })
}

/// `W_s = V_s + vote`. Any integer is accepted so that fraud can be
/// simulated; fair votes are 0 (nay) and 1 (aye).
pub fn cast_vote(value: &BigInt, vote: i64) -> BigInt {
    value + vote
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyResult {
    pub ayes: usize,
    pub nays: usize,
}

/// The public sum `sum_s W_s + sum_k u'_k(A*) u_k(A*)`.
pub fn decision_makers_total(
    cast: &[BigInt],
    public: &BallotPublic,
    pairs: &PublishedPairs,
    base: &BaseSet,
) -> BigInt {
    let table = CountTable::new(base, Some(public.alpha), public.max_arg());
    let u_values: BTreeMap<usize, &BigInt> =
        pairs.u_values.iter().map(|u| (u.row, &u.value)).collect();
    let public_part: BigInt = public
        .u_prime
        .iter()
        .map(|f| {
            let u_prime: BigInt = f
                .args
                .iter()
                .map(|&a| table.get(a))
                .product::<num_bigint::BigUint>()
                .into();
            u_values
                .get(&f.row)
                .map_or_else(BigInt::zero, |u| u_prime * *u)
        })
        .sum();
    cast.iter().sum::<BigInt>() + public_part
}

/// Number of ayes from the published totals.
pub fn tally_ballot(
    cast: &[BigInt],
    public: &BallotPublic,
    pairs: &PublishedPairs,
    base: &BaseSet,
    target: &BigInt,
) -> Result<TallyResult> {
    let y = decision_makers_total(cast, public, pairs, base) - target;
    tally_from_difference(&y, public.r)
}

fn tally_from_difference(y: &BigInt, r: usize) -> Result<TallyResult> {
    match y.to_usize() {
        Some(ayes) if ayes <= r => Ok(TallyResult {
            ayes,
            nays: r - ayes,
        }),
        _ => Err(Error::TallyOutOfRange {
            y: y.to_string(),
            r,
        }),
    }
}

pub const KIND_SETUP_PUBLIC: &str = "setup_public";
pub const KIND_BASE_SET: &str = "base_set";
pub const KIND_PUBLISHED_PAIRS: &str = "published_pairs";
pub const KIND_VOTE_SUM: &str = "vote_sum";
pub const KIND_TARGET: &str = "target";
pub const KIND_FAIR_TABLE: &str = "fair_table";
pub const KIND_VOTE_HASH: &str = "vote_hash";
pub const KIND_INSPECTION: &str = "inspection";
pub const KIND_TALLY: &str = "tally";
/// Decision-makers' channel only.
pub const KIND_CAST: &str = "cast_value";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemBaseSet {
    pub item: u32,
    pub base_set: BaseSet,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemPairs {
    pub item: u32,
    #[serde(flatten)]
    pub pairs: PublishedPairs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemValue {
    pub item: u32,
    #[serde(with = "decimal")]
    pub value: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemTable {
    pub item: u32,
    pub hash: HashSpec,
    #[serde(flatten)]
    pub table: FairTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemDigest {
    pub item: u32,
    pub digest: VoteDigest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemInspection {
    pub item: u32,
    pub result: Inspection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemTally {
    pub item: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ayes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nays: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallotOptions {
    pub hash: HashSpec,
    pub table_ceiling: usize,
    /// Skip the `2^r` table and the hash check.
    pub inspect: bool,
}

impl Default for BallotOptions {
    fn default() -> Self {
        Self {
            hash: HashSpec::default(),
            table_ceiling: DEFAULT_TABLE_CEILING,
            inspect: true,
        }
    }
}

/// A whole ballot: setup plus any number of items voted on it.
#[derive(Debug, Clone)]
pub struct BallotSession {
    pub setup: BallotSetup,
    pub shares: Vec<VoterShare>,
    pub public: BallotPublic,
    pub options: BallotOptions,
    /// Public board.
    pub transcript: Transcript,
    /// Seen only by the decision-makers.
    pub voters_channel: Transcript,
    items: u32,
}

#[derive(Debug, Clone)]
pub struct ItemOutcome {
    pub item: u32,
    pub base_set: BaseSet,
    pub voter_values: Vec<BigInt>,
    pub cast: Vec<BigInt>,
    pub total: BigInt,
    pub target: BigInt,
    pub tally: Result<TallyResult>,
    pub inspection: Option<Inspection>,
}

impl BallotSession {
    pub fn new(params: &SchemeParams, options: BallotOptions) -> Result<Self> {
        let (setup, shares, public) = ballot_setup(params)?;
        let mut transcript = Transcript::new();
        transcript.push(Role::Commission, KIND_SETUP_PUBLIC, &public);
        Ok(Self {
            setup,
            shares,
            public,
            options,
            transcript,
            voters_channel: Transcript::new(),
            items: 0,
        })
    }

    /// Votes one item. `votes[s]` is added to `V_s`; anything other than 0
    /// or 1 is fraud.
    pub fn vote(&mut self, votes: &[i64], seed: u64) -> Result<ItemOutcome> {
        let r = self.setup.r();
        if votes.len() != r {
            return Err(Error::BadParams(format!(
                "{} votes for {r} decision-makers",
                votes.len()
            )));
        }
        self.items += 1;
        let item = self.items;
        let (base_set, attempts) = select_ballot_base_set(&self.setup, seed)?;
        self.transcript.push(
            Role::Public,
            KIND_BASE_SET,
            &ItemBaseSet {
                item,
                base_set: base_set.clone(),
                attempts,
            },
        );

        let eval: Evaluator = self.setup.params().evaluator(&base_set);
        let pairs = self.setup.published_pairs(eval.bounded());
        self.transcript.push(
            Role::Commission,
            KIND_PUBLISHED_PAIRS,
            &ItemPairs {
                item,
                pairs: pairs.clone(),
            },
        );

        let alpha = self.public.alpha;
        let mut voter_values = Vec::with_capacity(r);
        let mut cast = Vec::with_capacity(r);
        for (share, &vote) in self.shares.iter().zip(votes) {
            let v = compute_voter_value(share, &pairs, &base_set, alpha)?;
            let w = cast_vote(&v.value, vote);
            self.voters_channel.push(
                Role::Member(share.voter),
                KIND_CAST,
                &ItemValue {
                    item,
                    value: w.clone(),
                },
            );
            voter_values.push(v.value);
            cast.push(w);
        }

        let total = decision_makers_total(&cast, &self.public, &pairs, &base_set);
        let target =
            BigInt::from(eval.masked_product(self.setup.params().n1, self.setup.params().n2));
        self.transcript.push(
            Role::DecisionMakers,
            KIND_VOTE_SUM,
            &ItemValue {
                item,
                value: total.clone(),
            },
        );
        self.transcript.push(
            Role::Commission,
            KIND_TARGET,
            &ItemValue {
                item,
                value: target.clone(),
            },
        );

        let inspection = if self.options.inspect {
            let hash = self.options.hash;
            let table = publish_fair_vote_table(
                &self.setup.voter_values(eval.bounded()),
                &hash,
                self.options.table_ceiling,
            )?;
            let digest = hash.hash(&cast);
            let result = check_vote_hash(&cast, &table, &hash);
            self.transcript.push(
                Role::Commission,
                KIND_FAIR_TABLE,
                &ItemTable { item, hash, table },
            );
            self.transcript.push(
                Role::DecisionMakers,
                KIND_VOTE_HASH,
                &ItemDigest { item, digest },
            );
            self.transcript.push(
                Role::Public,
                KIND_INSPECTION,
                &ItemInspection { item, result },
            );
            Some(result)
        } else {
            None
        };

        let tally = tally_from_difference(&(&total - &target), r);
        let record = match &tally {
            Ok(t) => ItemTally {
                item,
                ayes: Some(t.ayes),
                nays: Some(t.nays),
                error: None,
            },
            Err(e) => ItemTally {
                item,
                ayes: None,
                nays: None,
                error: Some(e.to_string()),
            },
        };
        self.transcript.push(Role::Public, KIND_TALLY, &record);

        Ok(ItemOutcome {
            item,
            base_set,
            voter_values,
            cast,
            total,
            target,
            tally,
            inspection,
        })
    }
}

/// Setup and a single vote, base set drawn from `params.rng_seed`.
pub fn run_ballot_session(
    params: &SchemeParams,
    votes: &[i64],
    options: BallotOptions,
) -> Result<(BallotSession, ItemOutcome)> {
    let mut session = BallotSession::new(params, options)?;
    let outcome = session.vote(votes, params.rng_seed)?;
    Ok((session, outcome))
}
