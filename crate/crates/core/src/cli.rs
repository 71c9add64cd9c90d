//! The `partshare` command line.
//!
//! Exit status: 0 when the command verifies, accepts or finds the vote
//! unanimous; 1 on a mismatch, rejection, fraud or objection; 2 on usage,
//! configuration or domain errors.
//!
//! `--config FILE` reads `key = value` lines named after the long flags.
//! A key given on the command line wins over the file.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::adversary::AttackExperiment;
use crate::ballot::{BallotOptions, BallotSession};
use crate::base_set::{BaseSet, Density};
use crate::error::{Error, Result};
use crate::identity::{
    build_identity, enumerate_solutions, expand_pair_product, verify_identity, Evaluator,
};
use crate::membership::{run_membership_session, Behavior, Verdict};
use crate::partition::{enumerate_partitions, CountTable, MultiplicityBound};
use crate::scheme::SchemeParams;
use crate::transcript::Transcript;
use crate::unanimity::{
    prove_disagreement, run_unanimity_session, verify_disagreement_proof, Perturbation,
    UnanimityVerdict, DEFAULT_WINDOW, KIND_PROOF,
};
use crate::vote_hash::{HashAlgorithm, HashSpec, Inspection, DEFAULT_TABLE_CEILING};

#[derive(Debug, Parser)]
#[command(
    name = "partshare",
    version,
    about = "Bounded-multiplicity partition counts and the schemes built on them"
)]
struct Cli {
    /// key = value file with defaults for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count partitions of n into parts from a base set.
    Count {
        #[arg(long, default_value = "naturals")]
        base: BaseSet,
        #[arg(long)]
        n: u64,
        /// Cap on equal parts; unrestricted if absent.
        #[arg(long)]
        alpha: Option<u32>,
        /// Also list the partitions (small n only).
        #[arg(long)]
        list: bool,
    },
    /// Rows (u_0, u_1, ...) with sum u_i (alpha+1)^i = n.
    Solutions {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: u32,
    },
    /// The identity p(n) = sum over rows of products of p_alpha.
    Identity {
        #[command(subcommand)]
        action: IdentityAction,
    },
    /// Expand (p(n1) - p_alpha(n1))(p(n2) - p_alpha(n2)) into terms.
    Expand {
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        #[arg(long)]
        alpha: u32,
        /// Evaluate the expansion on this base set and compare.
        #[arg(long)]
        base: Option<BaseSet>,
    },
    /// Run a protocol session.
    Simulate {
        #[command(subcommand)]
        scheme: Scheme,
    },
    /// Brute-force the arguments behind p_alpha(u) p_alpha(v).
    Attack {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[arg(long, default_value_t = 30)]
        bound: u64,
        #[arg(long, default_value_t = 1)]
        alpha: u32,
        /// Observations per hidden pair.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "1/2")]
        density: Density,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Replay the worked examples for n = 10, alpha = 1.
    Golden,
}

#[derive(Debug, Subcommand)]
enum IdentityAction {
    Verify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        base: BaseSet,
    },
    /// Print the terms of the identity.
    Show {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: u32,
    },
}

#[derive(Debug, Subcommand)]
enum Scheme {
    Membership {
        #[command(flatten)]
        common: Common,
        /// MEMBER=STRATEGY with STRATEGY one of honest, offset:N, random,
        /// replay, eavesdropper. Repeatable.
        #[arg(long = "behavior", value_name = "MEMBER=STRATEGY")]
        behaviors: Vec<String>,
    },
    Ballot {
        #[command(flatten)]
        common: Common,
        /// One vote per decision-maker, e.g. 1,0,1.
        #[arg(long, conflicts_with = "votes_file")]
        votes: Option<String>,
        #[arg(long, value_name = "FILE")]
        votes_file: Option<PathBuf>,
        #[arg(long, default_value = "sha256")]
        hash: HashAlgorithm,
        #[arg(long, default_value_t = DEFAULT_TABLE_CEILING)]
        table_ceiling: usize,
        /// Skip the fair-vote table and the hash inspection.
        #[arg(long)]
        no_inspect: bool,
    },
    Unanimity {
        #[command(flatten)]
        common: Common,
        /// MEMBER=random or MEMBER=fixed:N. Repeatable.
        #[arg(long = "objector", value_name = "MEMBER=PERTURBATION")]
        objectors: Vec<String>,
        /// Half-width of the random perturbation window.
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: u64,
        /// After an objection, publish and check a disagreement proof.
        #[arg(long)]
        prove: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 17)]
    n1: u64,
    #[arg(long, default_value_t = 19)]
    n2: u64,
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    delta: u64,
    #[arg(long, default_value_t = 5)]
    rounds: u32,
    /// Fraction of eligible expansion rows dealt out.
    #[arg(long, default_value = "1/2")]
    ratio: Density,
    #[arg(long, default_value_t = 32)]
    retries: u32,
    #[arg(long, default_value = "1/2")]
    round_density: Density,
    #[arg(long, default_value_t = 1024)]
    round_max: u64,
    /// Write transcripts here instead of stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Common {
    fn params(&self) -> Result<SchemeParams> {
        Ok(SchemeParams {
            n1: self.n1,
            n2: self.n2,
            alpha: MultiplicityBound::new(self.alpha)?,
            r: self.r,
            delta: self.delta,
            rounds: self.rounds,
            rng_seed: self.seed,
            distribute_ratio: self.ratio,
            max_retries: self.retries,
            round_density: self.round_density,
            round_max_element: self.round_max,
        })
    }
}

/// What a command concluded, mapped to the exit status.
enum Outcome {
    Ok,
    Negative,
}

/// Runs the command line `argv` (program name first) and returns the exit
/// status.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match with_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match run(cli.command, out) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Negative) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Appends `--key value` for every config entry whose flag is not already
/// on the command line.
fn with_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
    let entries = parse_config(&text)?;
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (key, values) in entries {
        if given.contains(&key) {
            continue;
        }
        for value in values {
            match value.as_str() {
                "true" => argv.push(format!("--{key}")),
                "false" => {}
                _ => {
                    argv.push(format!("--{key}"));
                    argv.push(value);
                }
            }
        }
    }
    Ok(argv)
}

/// `key = value` lines; `#` starts a comment; a key may repeat. Underscores
/// in keys read as dashes.
fn parse_config(text: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::Config(format!(
                "line {}: bad key `{key}`",
                lineno + 1
            )));
        }
        entries
            .entry(key)
            .or_default()
            .push(value.trim().to_string());
    }
    Ok(entries)
}

fn alpha(a: u32) -> Result<MultiplicityBound> {
    MultiplicityBound::new(a)
}

fn io(e: std::io::Error) -> Error {
    Error::Transcript(e.to_string())
}

fn run(command: Command, out: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Count {
            base,
            n,
            alpha: a,
            list,
        } => {
            let bound = a.map(alpha).transpose()?;
            let table = CountTable::new(&base, bound, n);
            writeln!(out, "{}", table.get(n)).map_err(io)?;
            if list {
                for p in enumerate_partitions(&base, bound, n)? {
                    writeln!(out, "{p}").map_err(io)?;
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Solutions { n, alpha: a } => {
            write!(out, "{}", enumerate_solutions(n, alpha(a)?).to_text()).map_err(io)?;
            Ok(Outcome::Ok)
        }
        Command::Identity { action } => match action {
            IdentityAction::Verify { n, alpha: a, base } => {
                let report = verify_identity(n, alpha(a)?, &base);
                if report.equal {
                    writeln!(out, "OK lhs=rhs={}", report.lhs).map_err(io)?;
                    Ok(Outcome::Ok)
                } else {
                    writeln!(out, "MISMATCH lhs={} rhs={}", report.lhs, report.rhs).map_err(io)?;
                    Ok(Outcome::Negative)
                }
            }
            IdentityAction::Show { n, alpha: a } => {
                let a = alpha(a)?;
                let expr = build_identity(n, a);
                let rendered: Vec<String> = expr.terms().iter().map(|t| t.render(a)).collect();
                writeln!(out, "p({n}) = {}", rendered.join(" + ")).map_err(io)?;
                Ok(Outcome::Ok)
            }
        },
        Command::Expand {
            n1,
            n2,
            alpha: a,
            base,
        } => {
            let a = alpha(a)?;
            let expansion = expand_pair_product(n1, n2, a)?;
            write!(out, "{}", expansion.to_text()).map_err(io)?;
            let Some(base) = base else {
                return Ok(Outcome::Ok);
            };
            let eval = Evaluator::new(&base, a, n1.max(n2));
            let value = expansion.evaluate(eval.bounded());
            let masked = eval.masked_product(n1, n2);
            if value == masked {
                writeln!(out, "OK value={value}").map_err(io)?;
                Ok(Outcome::Ok)
            } else {
                writeln!(out, "MISMATCH expansion={value} product={masked}").map_err(io)?;
                Ok(Outcome::Negative)
            }
        }
        Command::Simulate { scheme } => simulate(scheme, out),
        Command::Attack {
            seed,
            trials,
            bound,
            alpha: a,
            k,
            density,
            out: dir,
        } => {
            let report = AttackExperiment {
                seed,
                trials,
                bound,
                alpha: alpha(a)?,
                max_k: k,
                density,
            }
            .run()?;
            writeln!(out, "{report}").map_err(io)?;
            if let Some(dir) = dir {
                fs::create_dir_all(&dir).map_err(io)?;
                let json = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Transcript(e.to_string()))?;
                fs::write(dir.join("attack.json"), json + "\n").map_err(io)?;
            }
            Ok(if report.always_sound() && report.always_narrowing() {
                Outcome::Ok
            } else {
                Outcome::Negative
            })
        }
        Command::Golden => golden(out),
    }
}

fn emit(out: &mut dyn Write, dir: Option<&Path>, files: &[(&str, &Transcript)]) -> Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io)?;
            for (name, t) in files {
                fs::write(dir.join(name), t.to_jsonl()).map_err(io)?;
            }
        }
        None => write!(out, "{}", files[0].1.to_jsonl()).map_err(io)?,
    }
    Ok(())
}

fn parse_assignment(s: &str) -> Result<(usize, &str)> {
    let (member, what) = s
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected MEMBER=VALUE, got `{s}`")))?;
    let member = member
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad member id `{member}`")))?;
    Ok((member, what.trim()))
}

fn parse_behavior(s: &str) -> Result<Behavior> {
    Ok(match s {
        "honest" => Behavior::Honest,
        "random" => Behavior::RandomValue,
        "replay" => Behavior::ReplayPreviousRound,
        "eavesdropper" => Behavior::Eavesdropper,
        _ => match s.strip_prefix("offset:").map(str::parse) {
            Some(Ok(d)) => Behavior::ConstantOffset(d),
            _ => return Err(Error::Parse(format!("unknown strategy `{s}`"))),
        },
    })
}

fn parse_perturbation(s: &str) -> Result<Perturbation> {
    if s == "random" {
        return Ok(Perturbation::Random);
    }
    match s.strip_prefix("fixed:").map(str::parse) {
        Some(Ok(d)) => Ok(Perturbation::Fixed(d)),
        _ => Err(Error::Parse(format!("unknown perturbation `{s}`"))),
    }
}

fn parse_votes(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad vote `{t}`")))
        })
        .collect()
}

fn simulate(scheme: Scheme, out: &mut dyn Write) -> Result<Outcome> {
    match scheme {
        Scheme::Membership { common, behaviors } => {
            let params = common.params()?;
            let mut list = vec![Behavior::Honest; params.r];
            for b in &behaviors {
                let (member, strategy) = parse_assignment(b)?;
                let slot = list
                    .get_mut(member)
                    .ok_or_else(|| Error::BadParams(format!("no member {member}")))?;
                *slot = parse_behavior(strategy)?;
            }
            let outcome = run_membership_session(&params, &list)?;
            emit(
                out,
                common.out.as_deref(),
                &[("transcript.jsonl", &outcome.transcript)],
            )?;
            let passed = outcome.rounds.iter().filter(|r| r.pass).count();
            match outcome.verdict {
                Verdict::Accept => {
                    writeln!(out, "accept rounds={passed}/{}", outcome.rounds.len()).map_err(io)?;
                    Ok(Outcome::Ok)
                }
                Verdict::Reject => {
                    let ids: Vec<String> = outcome.cheaters.iter().map(|m| m.to_string()).collect();
                    writeln!(
                        out,
                        "reject rounds={passed}/{} cheaters={}",
                        outcome.rounds.len(),
                        ids.join(",")
                    )
                    .map_err(io)?;
                    Ok(Outcome::Negative)
                }
            }
        }
        Scheme::Ballot {
            common,
            votes,
            votes_file,
            hash,
            table_ceiling,
            no_inspect,
        } => {
            let text = match (votes, votes_file) {
                (Some(v), _) => v,
                (None, Some(path)) => fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
                (None, None) => {
                    return Err(Error::Config(
                        "one of --votes or --votes-file is required".into(),
                    ))
                }
            };
            let votes = parse_votes(&text)?;
            let params = common.params()?;
            let options = BallotOptions {
                hash: HashSpec::new(hash),
                table_ceiling,
                inspect: !no_inspect,
            };
            let mut session = BallotSession::new(&params, options)?;
            let item = session.vote(&votes, params.rng_seed)?;
            emit(
                out,
                common.out.as_deref(),
                &[
                    ("transcript.jsonl", &session.transcript),
                    ("voters_channel.jsonl", &session.voters_channel),
                ],
            )?;
            let mut ok = true;
            if let Some(inspection) = item.inspection {
                let fair = inspection == Inspection::Fair;
                ok &= fair;
                writeln!(
                    out,
                    "inspection={}",
                    if fair { "fair" } else { "fraudulent" }
                )
                .map_err(io)?;
            }
            match &item.tally {
                Ok(t) => writeln!(out, "y={} nays={}", t.ayes, t.nays).map_err(io)?,
                Err(e) => {
                    ok = false;
                    writeln!(out, "tally error: {e}").map_err(io)?;
                }
            }
            Ok(if ok { Outcome::Ok } else { Outcome::Negative })
        }
        Scheme::Unanimity {
            common,
            objectors,
            window,
            prove,
        } => {
            let params = common.params()?;
            let mut map = BTreeMap::new();
            for o in &objectors {
                let (member, p) = parse_assignment(o)?;
                map.insert(member, parse_perturbation(p)?);
            }
            let mut outcome = run_unanimity_session(&params, map.clone(), window)?;
            let session = &mut outcome.session;
            let mut proof_line = None;
            if prove && outcome.verdict == UnanimityVerdict::ObjectionDetected {
                let round = session
                    .rounds
                    .iter()
                    .find(|r| !r.pass)
                    .expect("objection has a failing round")
                    .round;
                let views: Vec<_> = map.keys().map(|&m| session.views[m].clone()).collect();
                let proof = prove_disagreement(&views, round)?;
                let verified = verify_disagreement_proof(&proof, &session.public);
                session
                    .public
                    .push(crate::transcript::Role::Public, KIND_PROOF, &proof);
                proof_line = Some(format!("proof round={round} verified={verified}"));
            }
            emit(
                out,
                common.out.as_deref(),
                &[
                    ("transcript.jsonl", &session.public),
                    ("insiders.jsonl", &session.insiders),
                ],
            )?;
            let passed = session.rounds.iter().filter(|r| r.pass).count();
            let total = session.rounds.len();
            let verdict = match outcome.verdict {
                UnanimityVerdict::Unanimous => "unanimous",
                UnanimityVerdict::ObjectionDetected => "objection_detected",
            };
            writeln!(out, "{verdict} rounds={passed}/{total}").map_err(io)?;
            if let Some(line) = proof_line {
                writeln!(out, "{line}").map_err(io)?;
            }
            Ok(match outcome.verdict {
                UnanimityVerdict::Unanimous => Outcome::Ok,
                UnanimityVerdict::ObjectionDetected => Outcome::Negative,
            })
        }
    }
}

/// Worked examples for n = 10, alpha = 1: the unrestricted count and the
/// distinct-part counts that enter the identity.
pub const GOLDEN_ARGS: [u64; 8] = [1, 2, 3, 4, 5, 6, 8, 10];

pub fn golden_table() -> Vec<(BaseSet, u64, [u64; 8])> {
    vec![
        (BaseSet::Primes, 5, [0, 1, 1, 0, 2, 0, 1, 2]),
        (BaseSet::Squares, 4, [1, 0, 0, 1, 1, 0, 0, 1]),
        (BaseSet::Odds, 10, [1, 0, 1, 1, 1, 1, 2, 2]),
    ]
}

fn golden(out: &mut dyn Write) -> Result<Outcome> {
    let one = alpha(1)?;
    let mut all = true;
    for (base, total, expected) in golden_table() {
        let full = CountTable::new(&base, None, 10);
        let bounded = CountTable::new(&base, Some(one), 10);
        let got_total = full.get(10).to_string();
        let mut ok = got_total == total.to_string();
        let mut cells = Vec::new();
        for (&k, &want) in GOLDEN_ARGS.iter().zip(&expected) {
            let got = bounded.get(k).to_string();
            ok &= got == want.to_string();
            cells.push(format!("p_1({k})={got}"));
        }
        let report = verify_identity(10, one, &base);
        ok &= report.equal;
        all &= ok;
        writeln!(
            out,
            "{} {base}: p(10)={got_total} {} identity={}",
            if ok { "OK" } else { "MISMATCH" },
            cells.join(" "),
            report.rhs
        )
        .map_err(io)?;
    }
    Ok(if all { Outcome::Ok } else { Outcome::Negative })
}
