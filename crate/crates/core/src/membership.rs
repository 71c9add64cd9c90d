//! r-person membership verification.
//!
//! The dealer (a bank employee) expands the masked product
//! `(p(n1) - p_a(n1)) (p(n2) - p_a(n2))`, hands roughly half of the eligible
//! expansion rows to the members as secret factor groups and keeps the rest.
//! Each round, a fresh random base set is drawn, members report the values
//! of their factor groups, the dealer announces complement values and the
//! withheld rows, and everyone checks that the recombined sum equals the
//! masked product on that base set.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base_set::BaseSet;
use crate::error::{Error, Result};
use crate::identity::ExpandedProduct;
use crate::partition::{CountTable, MultiplicityBound};
use crate::scheme::{
    search_base_set, stream, RowValue, SchemeParams, ShareRow, SplitRow, BEHAVIOR_STREAM,
    ROUND_STREAM, SETUP_STREAM,
};
use crate::transcript::{decimal, Role, Transcript};

pub type MemberId = usize;

/// A member's secret: factor groups of whole expansion rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Share {
    pub member: MemberId,
    pub rows: Vec<ShareRow>,
}

impl Share {
    pub fn max_arg(&self) -> u64 {
        self.rows
            .iter()
            .flat_map(|r| r.args.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, table: &CountTable) -> Vec<RowValue> {
        self.rows
            .iter()
            .map(|r| RowValue {
                row: r.row,
                value: r.evaluate(table).into(),
            })
            .collect()
    }
}

/// Everything the dealer keeps to itself.
#[derive(Debug, Clone)]
pub struct DealerSecret {
    params: SchemeParams,
    expansion: ExpandedProduct,
    splits: BTreeMap<usize, SplitRow>,
    assignment: Vec<Vec<usize>>,
    withheld: Vec<usize>,
}

impl DealerSecret {
    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn expansion(&self) -> &ExpandedProduct {
        &self.expansion
    }

    /// Row ids handed to each member.
    pub fn assignment(&self) -> &[Vec<usize>] {
        &self.assignment
    }

    /// Rows never handed out; the dealer announces their full value.
    pub fn withheld(&self) -> &[usize] {
        &self.withheld
    }

    pub fn split(&self, row: usize) -> Option<&SplitRow> {
        self.splits.get(&row)
    }

    /// Values the member should report on a base set.
    pub fn true_values(&self, member: MemberId, table: &CountTable) -> Vec<RowValue> {
        self.assignment[member]
            .iter()
            .map(|row| RowValue {
                row: *row,
                value: self.splits[row].secret_share().evaluate(table).into(),
            })
            .collect()
    }

    fn complements(&self, table: &CountTable) -> Vec<RowValue> {
        self.splits
            .values()
            .map(|s| RowValue {
                row: s.row,
                value: s.complement(table).into(),
            })
            .collect()
    }

    fn withheld_values(&self, table: &CountTable) -> Vec<RowValue> {
        self.withheld
            .iter()
            .map(|&row| RowValue {
                row,
                value: self.expansion.terms()[row].evaluate(table).into(),
            })
            .collect()
    }

    /// No distributed factor group and no complement vanishes on `base`.
    /// A zero there would let a wrong answer slip through unnoticed.
    pub fn is_viable(&self, base: &BaseSet) -> bool {
        let eval = self.params.evaluator(base);
        let table = eval.bounded();
        self.splits
            .values()
            .all(|s| !s.secret_share().evaluate(table).is_zero() && !s.complement(table).is_zero())
    }
}

/// What the public learns at setup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicParams {
    pub alpha: MultiplicityBound,
}

#[derive(Debug, Clone)]
pub struct MembershipSetup {
    pub secret: DealerSecret,
    pub shares: Vec<Share>,
    pub public: PublicParams,
}

/// Expands the masked product and deals secret factor groups.
pub fn membership_setup(params: &SchemeParams) -> Result<MembershipSetup> {
    params.validate()?;
    let expansion = params.expansion()?;
    let mut eligible: Vec<SplitRow> = expansion
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| params.split(i, t))
        .filter(SplitRow::is_distributable)
        .collect();
    if eligible.len() < params.r {
        return Err(Error::InfeasibleDistribution(format!(
            "{} eligible rows for {} members",
            eligible.len(),
            params.r
        )));
    }
    let ratio = params.distribute_ratio;
    let wanted = (eligible.len() as u64 * ratio.numerator()).div_ceil(ratio.denominator()) as usize;
    let count = wanted.max(params.r);

    let mut rng = stream(params.rng_seed, SETUP_STREAM);
    eligible.shuffle(&mut rng);
    eligible.truncate(count);

    let mut assignment = vec![Vec::new(); params.r];
    for (k, split) in eligible.iter().enumerate() {
        assignment[k % params.r].push(split.row);
    }
    for rows in &mut assignment {
        rows.sort_unstable();
    }
    let splits: BTreeMap<usize, SplitRow> = eligible.into_iter().map(|s| (s.row, s)).collect();
    let withheld = (0..expansion.len())
        .filter(|row| !splits.contains_key(row))
        .collect();
    let shares = assignment
        .iter()
        .enumerate()
        .map(|(member, rows)| Share {
            member,
            rows: rows.iter().map(|r| splits[r].secret_share()).collect(),
        })
        .collect();

    Ok(MembershipSetup {
        public: PublicParams {
            alpha: params.alpha,
        },
        secret: DealerSecret {
            params: params.clone(),
            expansion,
            splits,
            assignment,
            withheld,
        },
        shares,
    })
}

/// How a member answers a round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    Honest,
    /// Adds a fixed amount to every reported value.
    ConstantOffset(i64),
    /// Reports uniformly random values.
    RandomValue,
    /// Computes once, then keeps reporting the first round's values.
    ReplayPreviousRound,
    /// Holds no share; guesses from the public transcript.
    Eavesdropper,
}

impl Behavior {
    pub fn is_honest(&self) -> bool {
        matches!(self, Behavior::Honest)
    }
}

/// A party answering rounds. Sees only its own share and the public board.
#[derive(Debug, Clone)]
pub struct Claimant {
    id: MemberId,
    share: Option<Share>,
    behavior: Behavior,
    previous: Option<Vec<RowValue>>,
}

const RANDOM_VALUE_RANGE: u64 = 1 << 20;

impl Claimant {
    pub fn new(id: MemberId, share: Option<Share>, behavior: Behavior) -> Self {
        let share = match behavior {
            Behavior::Eavesdropper => None,
            _ => share,
        };
        Self {
            id,
            share,
            behavior,
            previous: None,
        }
    }

    pub fn id(&self) -> MemberId {
        self.id
    }

    fn honest_values(&self, base: &BaseSet, alpha: MultiplicityBound) -> Vec<RowValue> {
        match &self.share {
            Some(share) => {
                let table = CountTable::new(base, Some(alpha), share.max_arg());
                share.evaluate(&table)
            }
            None => Vec::new(),
        }
    }

    pub fn respond<R: Rng>(
        &mut self,
        base: &BaseSet,
        alpha: MultiplicityBound,
        board: &Transcript,
        rng: &mut R,
    ) -> Vec<RowValue> {
        match self.behavior.clone() {
            Behavior::Honest => self.honest_values(base, alpha),
            Behavior::ConstantOffset(k) => {
                let mut values = self.honest_values(base, alpha);
                for v in &mut values {
                    v.value += k;
                }
                values
            }
            Behavior::RandomValue => {
                let mut values = self.honest_values(base, alpha);
                for v in &mut values {
                    let truth = std::mem::take(&mut v.value);
                    v.value = loop {
                        let guess = BigInt::from(rng.random_range(0..RANDOM_VALUE_RANGE));
                        if guess != truth {
                            break guess;
                        }
                    };
                }
                values
            }
            Behavior::ReplayPreviousRound => {
                if self.previous.is_none() {
                    self.previous = Some(self.honest_values(base, alpha));
                }
                self.previous.clone().unwrap_or_default()
            }
            Behavior::Eavesdropper => unanswered_rows(board)
                .into_iter()
                .map(|row| RowValue {
                    row,
                    value: BigInt::from(rng.random_range(0..RANDOM_VALUE_RANGE)),
                })
                .collect(),
        }
    }
}

/// Rows the dealer announced complements for in the last finished round
/// that no member answered: all an outsider can learn about the missing
/// member's share.
fn unanswered_rows(board: &Transcript) -> Vec<usize> {
    let Ok(Some(last)) = board.last_payload::<DealerValues>(KIND_DEALER_VALUES) else {
        return Vec::new();
    };
    let answered: BTreeSet<usize> = board
        .payloads::<ClaimantResponse>(KIND_RESPONSE)
        .unwrap_or_default()
        .into_iter()
        .filter(|r| r.round == last.round)
        .flat_map(|r| r.values.into_iter().map(|v| v.row))
        .collect();
    last.complements
        .iter()
        .map(|c| c.row)
        .filter(|row| !answered.contains(row))
        .collect()
}

pub const KIND_BASE_SET: &str = "base_set";
pub const KIND_RESPONSE: &str = "claimant_response";
pub const KIND_DEALER_VALUES: &str = "dealer_values";
pub const KIND_ROUND_CHECK: &str = "round_check";
pub const KIND_VERDICT: &str = "verdict";
pub const KIND_REVEALED: &str = "revealed_values";
pub const KIND_CHEATERS: &str = "cheaters";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSetAnnouncement {
    pub round: u32,
    pub base_set: BaseSet,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimantResponse {
    pub round: u32,
    pub values: Vec<RowValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DealerValues {
    pub round: u32,
    /// Multiply each reported row value by the complement of the same row.
    pub complements: Vec<RowValue>,
    /// Added as-is.
    pub withheld: Vec<RowValue>,
    #[serde(with = "decimal")]
    pub target: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundCheck {
    pub round: u32,
    #[serde(with = "decimal")]
    pub combined: BigInt,
    #[serde(with = "decimal")]
    pub target: BigInt,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevealedValues {
    pub round: u32,
    pub member: MemberId,
    pub values: Vec<RowValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheaterList {
    pub members: BTreeSet<MemberId>,
}

/// Sum of reported values times their row complements, plus the withheld
/// rows. Reports for rows without an announced complement count for nothing.
pub fn combine<'a, I>(responses: I, dealer: &DealerValues) -> BigInt
where
    I: IntoIterator<Item = &'a RowValue>,
{
    let complements: BTreeMap<usize, &BigInt> = dealer
        .complements
        .iter()
        .map(|c| (c.row, &c.value))
        .collect();
    let reported: BigInt = responses
        .into_iter()
        .filter_map(|v| complements.get(&v.row).map(|c| &v.value * *c))
        .sum();
    reported + dealer.withheld.iter().map(|w| &w.value).sum::<BigInt>()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u32,
    pub base_set: BaseSet,
    pub attempts: u32,
    pub responses: BTreeMap<MemberId, Vec<RowValue>>,
    pub dealer: DealerValues,
    pub combined: BigInt,
    pub target: BigInt,
    pub pass: bool,
}

/// One challenge round: pick a viable base set, collect answers, recombine.
pub fn membership_round(
    secret: &DealerSecret,
    claimants: &mut [Claimant],
    round: u32,
    round_seed: u64,
    board: &mut Transcript,
) -> Result<RoundRecord> {
    let params = secret.params();
    let mut rng = stream(round_seed, ROUND_STREAM);
    let (base_set, attempts) = search_base_set(&mut rng, params, |b| secret.is_viable(b))?;
    board.push(
        Role::Public,
        KIND_BASE_SET,
        &BaseSetAnnouncement {
            round,
            base_set: base_set.clone(),
            attempts,
        },
    );

    let mut behavior_rng = stream(round_seed, BEHAVIOR_STREAM);
    let mut responses = BTreeMap::new();
    for claimant in claimants.iter_mut() {
        let values = claimant.respond(&base_set, params.alpha, board, &mut behavior_rng);
        board.push(
            Role::Member(claimant.id()),
            KIND_RESPONSE,
            &ClaimantResponse {
                round,
                values: values.clone(),
            },
        );
        responses.insert(claimant.id(), values);
    }

    let eval = params.evaluator(&base_set);
    let target = BigInt::from(eval.masked_product(params.n1, params.n2));
    let dealer = DealerValues {
        round,
        complements: secret.complements(eval.bounded()),
        withheld: secret.withheld_values(eval.bounded()),
        target: target.clone(),
    };
    board.push(Role::Dealer, KIND_DEALER_VALUES, &dealer);

    let combined = combine(responses.values().flatten(), &dealer);
    let pass = combined == target;
    board.push(
        Role::Public,
        KIND_ROUND_CHECK,
        &RoundCheck {
            round,
            combined: combined.clone(),
            target: target.clone(),
            pass,
        },
    );
    Ok(RoundRecord {
        round,
        base_set,
        attempts,
        responses,
        dealer,
        combined,
        target,
        pass,
    })
}

#[derive(Debug, Clone)]
pub struct MembershipOutcome {
    pub setup: MembershipSetup,
    pub transcript: Transcript,
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
    /// Empty on accept.
    pub cheaters: BTreeSet<MemberId>,
}

/// Builds one claimant per member; members beyond `behaviors.len()` are
/// honest.
pub fn claimants_for(setup: &MembershipSetup, behaviors: &[Behavior]) -> Vec<Claimant> {
    setup
        .shares
        .iter()
        .map(|share| {
            let behavior = behaviors
                .get(share.member)
                .cloned()
                .unwrap_or(Behavior::Honest);
            Claimant::new(share.member, Some(share.clone()), behavior)
        })
        .collect()
}

/// Setup, `params.rounds` challenge rounds, verdict, and on rejection the
/// revealed values and the list of cheaters.
pub fn run_membership_session(
    params: &SchemeParams,
    behaviors: &[Behavior],
) -> Result<MembershipOutcome> {
    let setup = membership_setup(params)?;
    let mut claimants = claimants_for(&setup, behaviors);
    run_with_claimants(setup, &mut claimants)
}

/// As [`run_membership_session`], with caller-built claimants (for example
/// two members who swapped shares).
pub fn run_with_claimants(
    setup: MembershipSetup,
    claimants: &mut [Claimant],
) -> Result<MembershipOutcome> {
    let params = setup.secret.params().clone();
    let mut board = Transcript::new();
    let mut seeds = stream(params.rng_seed, ROUND_STREAM);
    let mut rounds = Vec::with_capacity(params.rounds as usize);
    for round in 1..=params.rounds {
        let round_seed = seeds.random();
        rounds.push(membership_round(
            &setup.secret,
            claimants,
            round,
            round_seed,
            &mut board,
        )?);
    }
    let verdict = if rounds.iter().all(|r| r.pass) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    board.push(Role::Public, KIND_VERDICT, &VerdictRecord { verdict });

    let mut cheaters = BTreeSet::new();
    if verdict == Verdict::Reject {
        for record in &rounds {
            let table = params.evaluator(&record.base_set);
            for member in 0..params.r {
                board.push(
                    Role::Dealer,
                    KIND_REVEALED,
                    &RevealedValues {
                        round: record.round,
                        member,
                        values: setup.secret.true_values(member, table.bounded()),
                    },
                );
            }
        }
        cheaters = identify_cheaters(&board, &setup.secret)?;
        board.push(
            Role::Public,
            KIND_CHEATERS,
            &CheaterList {
                members: cheaters.clone(),
            },
        );
    }
    Ok(MembershipOutcome {
        setup,
        transcript: board,
        rounds,
        verdict,
        cheaters,
    })
}

/// Members whose reports in any round differ from what their shares give.
pub fn identify_cheaters(board: &Transcript, secret: &DealerSecret) -> Result<BTreeSet<MemberId>> {
    match board.last_payload::<VerdictRecord>(KIND_VERDICT)? {
        Some(VerdictRecord {
            verdict: Verdict::Reject,
        }) => {}
        _ => return Err(Error::NotRejected),
    }
    let params = secret.params();
    let mut reported: BTreeMap<(u32, MemberId), Vec<RowValue>> = BTreeMap::new();
    for record in board.of_kind(KIND_RESPONSE) {
        let Role::Member(member) = record.role else {
            continue;
        };
        let response: ClaimantResponse = serde_json::from_value(record.payload.clone())
            .map_err(|e| Error::Transcript(e.to_string()))?;
        reported
            .entry((response.round, member))
            .or_default()
            .extend(response.values);
    }
    let mut cheaters = BTreeSet::new();
    for announcement in board.payloads::<BaseSetAnnouncement>(KIND_BASE_SET)? {
        let eval = params.evaluator(&announcement.base_set);
        for member in 0..params.r {
            let mut expected = secret.true_values(member, eval.bounded());
            let mut got = reported
                .get(&(announcement.round, member))
                .cloned()
                .unwrap_or_default();
            expected.sort();
            got.sort();
            if expected != got {
                cheaters.insert(member);
            }
        }
    }
    Ok(cheaters)
}

/// Recomputes the verdict from public records alone.
pub fn replay_verdict(board: &Transcript) -> Result<Verdict> {
    let responses = board.payloads::<ClaimantResponse>(KIND_RESPONSE)?;
    let dealers = board.payloads::<DealerValues>(KIND_DEALER_VALUES)?;
    if dealers.is_empty() {
        return Err(Error::Transcript("no rounds recorded".into()));
    }
    let all_pass = dealers.iter().all(|dealer| {
        let combined = combine(
            responses
                .iter()
                .filter(|r| r.round == dealer.round)
                .flat_map(|r| &r.values),
            dealer,
        );
        combined == dealer.target
    });
    Ok(if all_pass {
        Verdict::Accept
    } else {
        Verdict::Reject
    })
}
