use thiserror::Error;

/// Errors raised by the counting engine, the identity engine and the
/// protocol simulators.
///
/// Protocol *failures* (a round that does not verify, a vote that does not
/// hash into the fair table) are verdicts, not errors; they never show up
/// here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumeration oracle refuses n = {n}: above ceiling {ceiling}")]
    OracleCeilingExceeded { n: u64, ceiling: u64 },

    #[error("multiplicity bound must be at least 1")]
    ZeroMultiplicityBound,

    #[error("invalid base set: {0}")]
    InvalidBaseSet(String),

    #[error("n = {n} has no nontrivial solution rows for alpha = {alpha}")]
    NoNontrivialRows { n: u64, alpha: u32 },

    #[error("bad scheme parameters: {0}")]
    BadParams(String),

    #[error("infeasible distribution: {0}")]
    InfeasibleDistribution(String),

    #[error("no viable base set after {attempts} attempts")]
    NoViableBaseSet { attempts: u32 },

    #[error("tally {y} outside [0, {r}]")]
    TallyOutOfRange { y: String, r: usize },

    #[error("fair-vote table for r = {r} exceeds ceiling {ceiling}")]
    TableTooLarge { r: usize, ceiling: usize },

    #[error("session was not rejected")]
    NotRejected,

    #[error("candidate bound {bound} exceeds ceiling {ceiling}")]
    BoundTooLarge { bound: u64, ceiling: u64 },

    #[error("no observations supplied")]
    NoObservations,

    #[error("malformed text: {0}")]
    Parse(String),

    #[error("transcript: {0}")]
    Transcript(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
