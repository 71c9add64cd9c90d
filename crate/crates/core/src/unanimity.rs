//! Unanimity vote that hides the number of voters and objectors.
//!
//! Setup is the membership deal. Each round the decision-makers evaluate
//! their factor groups on a fresh base set and combine them with the
//! complements the commission sent them; an objector replaces its result by
//! a different random value. The public only sees the combined total next to
//! the masked product: equal means no objection was raised.
//!
//! Two objectors can cancel each other out. Rounds record every applied
//! perturbation in [`UnanimityRound::debug_deltas`] so that case can be
//! constructed on purpose.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base_set::BaseSet;
use crate::error::{Error, Result};
use crate::membership::{membership_setup, DealerSecret, MemberId, MembershipSetup, Share};
use crate::partition::CountTable;
use crate::scheme::{
    search_base_set, stream, RowValue, SchemeParams, BEHAVIOR_STREAM, ROUND_STREAM,
};
use crate::transcript::{decimal, Role, Transcript};

/// Default half-width of the window objectors draw replacement values from.
pub const DEFAULT_WINDOW: u64 = 1 << 16;

/// How an objector changes its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// Uniform over `[v - M, v + M]` without `v`.
    Random,
    /// Adds exactly this (nonzero) amount.
    Fixed(i64),
}

pub const KIND_BASE_SET: &str = "base_set";
pub const KIND_WITHHELD: &str = "withheld_values";
pub const KIND_SHARE_SUM: &str = "perturbed_share_sum";
pub const KIND_TARGET: &str = "target";
pub const KIND_ROUND_CHECK: &str = "round_check";
pub const KIND_VERDICT: &str = "unanimity_verdict";
pub const KIND_PROOF: &str = "disagreement_proof";
/// Decision-makers' channel only.
pub const KIND_COMPLEMENTS: &str = "complements";
/// Decision-makers' channel only.
pub const KIND_SHARED: &str = "shared_value";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundBaseSet {
    pub round: u32,
    pub base_set: BaseSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundValues {
    pub round: u32,
    pub values: Vec<RowValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundValue {
    pub round: u32,
    #[serde(with = "decimal")]
    pub value: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundPass {
    pub round: u32,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnanimityVerdict {
    Unanimous,
    ObjectionDetected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub verdict: UnanimityVerdict,
}

/// What one decision-maker knows after some rounds: its own unperturbed
/// results and every value shared among the decision-makers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecisionMakerView {
    pub member: MemberId,
    pub originals: BTreeMap<u32, BigInt>,
    pub observed: BTreeMap<u32, BTreeMap<MemberId, BigInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnanimityRound {
    pub round: u32,
    pub base_set: BaseSet,
    pub pass: bool,
    /// Private: perturbation each objector applied.
    pub debug_deltas: BTreeMap<MemberId, BigInt>,
}

/// A running unanimity vote.
#[derive(Debug, Clone)]
pub struct UnanimitySession {
    pub setup: MembershipSetup,
    objectors: BTreeMap<MemberId, Perturbation>,
    window: u64,
    pub public: Transcript,
    pub insiders: Transcript,
    pub views: Vec<DecisionMakerView>,
    pub rounds: Vec<UnanimityRound>,
}

impl UnanimitySession {
    pub fn new(
        params: &SchemeParams,
        objectors: BTreeMap<MemberId, Perturbation>,
        window: u64,
    ) -> Result<Self> {
        let setup = membership_setup(params)?;
        if let Some(m) = objectors.keys().find(|&&m| m >= params.r) {
            return Err(Error::BadParams(format!(
                "objector {m} is not a decision-maker"
            )));
        }
        if objectors.values().any(|p| *p == Perturbation::Fixed(0)) {
            return Err(Error::BadParams(
                "a zero perturbation is not an objection".into(),
            ));
        }
        if window == 0 {
            return Err(Error::BadParams(
                "perturbation window must be positive".into(),
            ));
        }
        let views = (0..params.r)
            .map(|member| DecisionMakerView {
                member,
                ..Default::default()
            })
            .collect();
        Ok(Self {
            setup,
            objectors,
            window,
            public: Transcript::new(),
            insiders: Transcript::new(),
            views,
            rounds: Vec::new(),
        })
    }

    fn secret(&self) -> &DealerSecret {
        &self.setup.secret
    }

    /// One secret-ballot round on a base set drawn from `round_seed`.
    pub fn run_round(&mut self, round_seed: u64) -> Result<&UnanimityRound> {
        let round = self.rounds.len() as u32 + 1;
        let params = self.secret().params().clone();
        let mut rng = stream(round_seed, ROUND_STREAM);
        let (base_set, _) = search_base_set(&mut rng, &params, |b| self.secret().is_viable(b))?;
        self.public.push(
            Role::Public,
            KIND_BASE_SET,
            &RoundBaseSet {
                round,
                base_set: base_set.clone(),
            },
        );

        let eval = params.evaluator(&base_set);
        let table = eval.bounded();
        let complements = self.secret_complements(table);
        self.insiders.push(
            Role::Commission,
            KIND_COMPLEMENTS,
            &RoundValues {
                round,
                values: complements.clone(),
            },
        );

        let mut perturb_rng = stream(round_seed, BEHAVIOR_STREAM);
        let mut shared = BTreeMap::new();
        let mut debug_deltas = BTreeMap::new();
        for share in &self.setup.shares {
            let original = decision_maker_result(share, &base_set, &params, &complements);
            let value = match self.objectors.get(&share.member) {
                None => original.clone(),
                Some(p) => {
                    let delta = match *p {
                        Perturbation::Fixed(d) => BigInt::from(d),
                        Perturbation::Random => {
                            random_nonzero_offset(&mut perturb_rng, self.window)
                        }
                    };
                    let value = &original + &delta;
                    debug_deltas.insert(share.member, delta);
                    value
                }
            };
            self.views[share.member].originals.insert(round, original);
            self.insiders.push(
                Role::Member(share.member),
                KIND_SHARED,
                &RoundValue {
                    round,
                    value: value.clone(),
                },
            );
            shared.insert(share.member, value);
        }
        for view in &mut self.views {
            view.observed.insert(round, shared.clone());
        }

        let withheld: Vec<RowValue> = self
            .secret()
            .withheld()
            .iter()
            .map(|&row| RowValue {
                row,
                value: self.secret().expansion().terms()[row]
                    .evaluate(table)
                    .into(),
            })
            .collect();
        let total: BigInt =
            shared.values().sum::<BigInt>() + withheld.iter().map(|w| &w.value).sum::<BigInt>();
        let target = BigInt::from(eval.masked_product(params.n1, params.n2));
        let pass = total == target;
        self.public.push(
            Role::Commission,
            KIND_WITHHELD,
            &RoundValues {
                round,
                values: withheld,
            },
        );
        self.public.push(
            Role::DecisionMakers,
            KIND_SHARE_SUM,
            &RoundValue {
                round,
                value: total,
            },
        );
        self.public.push(
            Role::Commission,
            KIND_TARGET,
            &RoundValue {
                round,
                value: target,
            },
        );
        self.public
            .push(Role::Public, KIND_ROUND_CHECK, &RoundPass { round, pass });

        self.rounds.push(UnanimityRound {
            round,
            base_set,
            pass,
            debug_deltas,
        });
        Ok(self.rounds.last().expect("just pushed"))
    }

    fn secret_complements(&self, table: &CountTable) -> Vec<RowValue> {
        let secret = self.secret();
        secret
            .assignment()
            .iter()
            .flatten()
            .map(|&row| RowValue {
                row,
                value: secret
                    .split(row)
                    .expect("dealt rows are split")
                    .complement(table)
                    .into(),
            })
            .collect()
    }

    pub fn verdict(&self) -> UnanimityVerdict {
        if self.rounds.iter().all(|r| r.pass) {
            UnanimityVerdict::Unanimous
        } else {
            UnanimityVerdict::ObjectionDetected
        }
    }

    /// Publishes the verdict over all rounds so far.
    pub fn close(&mut self) -> UnanimityVerdict {
        let verdict = self.verdict();
        self.public
            .push(Role::Public, KIND_VERDICT, &VerdictRecord { verdict });
        verdict
    }
}

/// The decision-maker's unperturbed result: its factor groups times their
/// complements, summed.
fn decision_maker_result(
    share: &Share,
    base: &BaseSet,
    params: &SchemeParams,
    complements: &[RowValue],
) -> BigInt {
    let table = CountTable::new(base, Some(params.alpha), share.max_arg());
    share
        .evaluate(&table)
        .into_iter()
        .map(|v| {
            let c = complements
                .iter()
                .find(|c| c.row == v.row)
                .map(|c| c.value.clone())
                .unwrap_or_default();
            v.value * c
        })
        .sum()
}

fn random_nonzero_offset<R: Rng>(rng: &mut R, window: u64) -> BigInt {
    let k = rng.random_range(0..2 * window);
    if k < window {
        -BigInt::from(window - k)
    } else {
        BigInt::from(k - window + 1)
    }
}

#[derive(Debug, Clone)]
pub struct UnanimityOutcome {
    pub session: UnanimitySession,
    pub verdict: UnanimityVerdict,
}

/// Setup, `params.rounds` rounds with the same objectors, and the verdict.
pub fn run_unanimity_session(
    params: &SchemeParams,
    objectors: BTreeMap<MemberId, Perturbation>,
    window: u64,
) -> Result<UnanimityOutcome> {
    let mut session = UnanimitySession::new(params, objectors, window)?;
    let mut seeds = stream(params.rng_seed, ROUND_STREAM);
    for _ in 0..params.rounds {
        session.run_round(seeds.random())?;
    }
    let verdict = session.close();
    Ok(UnanimityOutcome { session, verdict })
}

/// Objectors' evidence for one round: what they really computed and every
/// value the decision-makers shared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisagreementProof {
    pub round: u32,
    #[serde(with = "decimal_map")]
    pub originals: BTreeMap<MemberId, BigInt>,
    #[serde(with = "decimal_map")]
    pub shared: BTreeMap<MemberId, BigInt>,
}

/// Assembles the proof from the objectors' own views.
pub fn prove_disagreement(
    objectors: &[DecisionMakerView],
    round: u32,
) -> Result<DisagreementProof> {
    let first = objectors
        .first()
        .ok_or_else(|| Error::BadParams("a proof needs at least one objector".into()))?;
    let shared = first
        .observed
        .get(&round)
        .cloned()
        .ok_or_else(|| Error::Transcript(format!("round {round} not observed")))?;
    let originals = objectors
        .iter()
        .map(|v| {
            v.originals
                .get(&round)
                .cloned()
                .map(|o| (v.member, o))
                .ok_or_else(|| Error::Transcript(format!("round {round} not observed")))
        })
        .collect::<Result<_>>()?;
    Ok(DisagreementProof {
        round,
        originals,
        shared,
    })
}

/// Recomputes the round's total from the proof and checks it against the
/// public board: the shared values must add up to what the decision-makers
/// published, and swapping in the objectors' original values must hit the
/// target.
pub fn verify_disagreement_proof(proof: &DisagreementProof, board: &Transcript) -> bool {
    let find = |kind: &str| -> Option<RoundValue> {
        board
            .payloads::<RoundValue>(kind)
            .ok()?
            .into_iter()
            .find(|v| v.round == proof.round)
    };
    let withheld = board
        .payloads::<RoundValues>(KIND_WITHHELD)
        .ok()
        .and_then(|all| all.into_iter().find(|v| v.round == proof.round));
    let (Some(published), Some(target), Some(withheld)) =
        (find(KIND_SHARE_SUM), find(KIND_TARGET), withheld)
    else {
        return false;
    };
    if proof.originals.is_empty() {
        return false;
    }
    for (member, original) in &proof.originals {
        match proof.shared.get(member) {
            Some(v) if v != original => {}
            _ => return false,
        }
    }
    let withheld: BigInt = withheld.values.iter().map(|w| &w.value).sum();
    let as_shared: BigInt = proof.shared.values().sum::<BigInt>() + &withheld;
    if as_shared != published.value {
        return false;
    }
    let restored: BigInt = proof
        .shared
        .iter()
        .map(|(m, v)| proof.originals.get(m).unwrap_or(v))
        .sum::<BigInt>()
        + &withheld;
    restored == target.value
}

mod decimal_map {
    use std::collections::BTreeMap;

    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, BigInt>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (*k, v.to_string()))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<usize, BigInt>, D::Error> {
        BTreeMap::<usize, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| v.parse().map(|v| (k, v)).map_err(serde::de::Error::custom))
            .collect()
    }
}
