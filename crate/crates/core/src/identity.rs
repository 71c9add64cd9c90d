//! The partition identity
//!
//! ```text
//! p^A(n) = sum over rows u of the solution matrix of  prod_i p^A_alpha(u_i)
//! ```
//!
//! where the solution matrix holds every nonnegative vector `(u_0, u_1, ...)`
//! with `sum_i u_i * (alpha + 1)^i = n`. Writing the multiplicity of each part
//! in base `alpha + 1` splits a partition into layers whose multiplicities are
//! digits `<= alpha`; layer `i` is a bounded partition of `u_i`. That is why
//! the identity holds for every base set `A`.
//!
//! Radix note: the source material states the representation once with
//! powers of `alpha` starting at exponent 1 and once with powers of
//! `alpha + 1` starting at exponent 0. Only the second reading reproduces the
//! worked expansion for `n = 10, alpha = 1` and makes the identity true, so
//! that is what this module implements.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::base_set::BaseSet;
use crate::error::{Error, Result};
use crate::partition::{BigCount, CountTable, MultiplicityBound};

/// One representation `n = sum_i u_i (alpha+1)^i`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionRow {
    coefficients: Vec<u64>,
}

impl SolutionRow {
    pub fn new(mut coefficients: Vec<u64>) -> Self {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// `sum_i u_i * radix^i`, or `None` on overflow.
    pub fn value(&self, radix: u64) -> Option<u64> {
        let mut total: u64 = 0;
        let mut power: u64 = 1;
        for (i, &u) in self.coefficients.iter().enumerate() {
            if i > 0 {
                power = power.checked_mul(radix)?;
            }
            total = total.checked_add(u.checked_mul(power)?)?;
        }
        Some(total)
    }

    /// The row `(n, 0, 0, ...)`.
    pub fn is_trivial(&self, n: u64) -> bool {
        self.coefficients == [n]
    }

    /// Nonzero coefficients, ascending: the arguments of this row's term.
    pub fn args(&self) -> Vec<u64> {
        let mut args: Vec<u64> = self
            .coefficients
            .iter()
            .copied()
            .filter(|&u| u > 0)
            .collect();
        args.sort_unstable();
        args
    }
}

/// Every solution row for `(n, alpha)`, in canonical order: descending
/// lexicographic on `(u_k, ..., u_1, u_0)`, so the trivial row is last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionMatrix {
    n: u64,
    alpha: MultiplicityBound,
    rows: Vec<SolutionRow>,
}

impl SolutionMatrix {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alpha(&self) -> MultiplicityBound {
        self.alpha
    }

    pub fn rows(&self) -> &[SolutionRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn trivial_index(&self) -> usize {
        self.rows
            .iter()
            .position(|r| r.is_trivial(self.n))
            .expect("solution matrix always holds the trivial row")
    }

    /// One line of header, then one comma-separated row per line (`()` for
    /// the empty row of `n = 0`).
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} alpha={}\n", self.n, self.alpha);
        for row in &self.rows {
            if row.coefficients().is_empty() {
                out.push_str("()");
            }
            out.push_str(&join(row.coefficients()));
            out.push('\n');
        }
        out
    }
}

impl FromStr for SolutionMatrix {
    type Err = Error;

    /// Parses [`SolutionMatrix::to_text`] output, keeping row order and
    /// checking that every row solves the header's equation.
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let fields = parse_header(header, &["n", "alpha"])?;
        let n = fields[0];
        let alpha = MultiplicityBound::new(
            u32::try_from(fields[1]).map_err(|_| Error::Parse("alpha too large".into()))?,
        )?;
        let mut rows = Vec::new();
        for line in lines {
            let coefficients = if line.trim() == "()" {
                Vec::new()
            } else {
                parse_list(line)?
            };
            let row = SolutionRow::new(coefficients.clone());
            if row.coefficients.len() != coefficients.len() {
                return Err(Error::Parse(format!("row `{line}` has trailing zeros")));
            }
            if row.value(alpha.radix()) != Some(n) {
                return Err(Error::Parse(format!("row `{line}` does not sum to {n}")));
            }
            rows.push(row);
        }
        Ok(SolutionMatrix { n, alpha, rows })
    }
}

/// All nonnegative solutions of `n = sum_i u_i (alpha+1)^i`.
pub fn enumerate_solutions(n: u64, alpha: MultiplicityBound) -> SolutionMatrix {
    let radix = alpha.radix();
    let mut powers = vec![1u64];
    while let Some(next) = powers.last().unwrap().checked_mul(radix) {
        if next > n {
            break;
        }
        powers.push(next);
    }
    let mut rows = Vec::new();
    let mut coeffs = vec![0u64; powers.len()];
    fill_rows(&powers, powers.len() - 1, n, &mut coeffs, &mut rows);
    SolutionMatrix { n, alpha, rows }
}

fn fill_rows(
    powers: &[u64],
    level: usize,
    remaining: u64,
    coeffs: &mut Vec<u64>,
    rows: &mut Vec<SolutionRow>,
) {
    if level == 0 {
        coeffs[0] = remaining;
        rows.push(SolutionRow::new(coeffs.clone()));
        return;
    }
    for u in (0..=remaining / powers[level]).rev() {
        coeffs[level] = u;
        fill_rows(
            powers,
            level - 1,
            remaining - u * powers[level],
            coeffs,
            rows,
        );
    }
    coeffs[level] = 0;
}

/// Where a term came from: a row of one solution matrix, or one row of each
/// of two matrices in an expanded product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TermOrigin {
    Row(usize),
    Pair(usize, usize),
}

impl fmt::Display for TermOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermOrigin::Row(i) => write!(f, "{i}"),
            TermOrigin::Pair(i, j) => write!(f, "{i}/{j}"),
        }
    }
}

/// A product `prod_j p^A_alpha(arg_j)`. Arguments are kept sorted so that
/// two terms compare equal exactly when their multisets agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    args: Vec<u64>,
    origin: TermOrigin,
}

impl Term {
    pub fn new(mut args: Vec<u64>, origin: TermOrigin) -> Self {
        args.retain(|&a| a > 0);
        args.sort_unstable();
        Self { args, origin }
    }

    pub fn args(&self) -> &[u64] {
        &self.args
    }

    pub fn origin(&self) -> TermOrigin {
        self.origin
    }

    pub fn max_arg(&self) -> u64 {
        self.args.last().copied().unwrap_or(0)
    }

    /// Product of table lookups; the empty product is 1.
    pub fn evaluate(&self, table: &CountTable) -> BigCount {
        product_of(&self.args, table)
    }

    /// Human-readable form such as `p_1(2)p_1(2)p_1(1)`.
    pub fn render(&self, alpha: MultiplicityBound) -> String {
        if self.args.is_empty() {
            return "1".into();
        }
        self.args
            .iter()
            .rev()
            .map(|a| format!("p_{alpha}({a})"))
            .collect()
    }
}

pub(crate) fn product_of(args: &[u64], table: &CountTable) -> BigCount {
    args.iter()
        .fold(BigCount::one(), |acc, &a| acc * table.get(a))
}

/// `p^A_alpha` evaluated on each argument and multiplied out.
pub fn evaluate_term(term: &Term, base: &BaseSet, alpha: MultiplicityBound) -> BigCount {
    let table = CountTable::new(base, Some(alpha), term.max_arg());
    term.evaluate(&table)
}

/// The right-hand side of the identity for one `(n, alpha)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityExpr {
    n: u64,
    alpha: MultiplicityBound,
    terms: Vec<Term>,
    trivial: usize,
}

impl IdentityExpr {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alpha(&self) -> MultiplicityBound {
        self.alpha
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The term `p_alpha(n)` from the trivial row.
    pub fn trivial_term(&self) -> &Term {
        &self.terms[self.trivial]
    }

    /// Every term except the trivial one; these sum to `p(n) - p_alpha(n)`.
    pub fn nontrivial_terms(&self) -> impl Iterator<Item = &Term> {
        let trivial = self.trivial;
        self.terms
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != trivial)
            .map(|(_, t)| t)
    }

    pub fn evaluate(&self, table: &CountTable) -> BigCount {
        self.terms.iter().map(|t| t.evaluate(table)).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("identity n={} alpha={}\n", self.n, self.alpha);
        for t in &self.terms {
            out.push_str(&format!("{}:{}\n", t.origin, join(&t.args)));
        }
        out
    }
}

pub fn build_identity(n: u64, alpha: MultiplicityBound) -> IdentityExpr {
    identity_from_matrix(&enumerate_solutions(n, alpha))
}

pub fn identity_from_matrix(matrix: &SolutionMatrix) -> IdentityExpr {
    let terms = matrix
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| Term::new(row.args(), TermOrigin::Row(i)))
        .collect();
    IdentityExpr {
        n: matrix.n(),
        alpha: matrix.alpha(),
        terms,
        trivial: matrix.trivial_index(),
    }
}

/// Counting tables for one base set and bound, sized for the largest
/// argument a caller will need.
#[derive(Debug, Clone)]
pub struct Evaluator {
    bounded: CountTable,
    unrestricted: CountTable,
}

impl Evaluator {
    pub fn new(base: &BaseSet, alpha: MultiplicityBound, limit: u64) -> Self {
        let parts = base.parts_up_to(limit);
        Self {
            bounded: CountTable::from_parts(&parts, Some(alpha), limit),
            unrestricted: CountTable::from_parts(&parts, None, limit),
        }
    }

    pub fn bounded(&self) -> &CountTable {
        &self.bounded
    }

    pub fn unrestricted(&self) -> &CountTable {
        &self.unrestricted
    }

    pub fn term(&self, term: &Term) -> BigCount {
        term.evaluate(&self.bounded)
    }

    pub fn product(&self, args: &[u64]) -> BigCount {
        product_of(args, &self.bounded)
    }

    /// `p(n) - p_alpha(n)`; never negative since bounded partitions are a
    /// subset of unrestricted ones.
    pub fn masked_factor(&self, n: u64) -> BigCount {
        self.unrestricted.get(n) - self.bounded.get(n)
    }

    /// `(p(n1) - p_alpha(n1)) * (p(n2) - p_alpha(n2))`.
    pub fn masked_product(&self, n1: u64, n2: u64) -> BigCount {
        self.masked_factor(n1) * self.masked_factor(n2)
    }
}

/// Both sides of the identity on one base set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    #[serde(with = "crate::transcript::decimal")]
    pub lhs: BigCount,
    #[serde(with = "crate::transcript::decimal")]
    pub rhs: BigCount,
    pub equal: bool,
}

pub fn verify_identity(n: u64, alpha: MultiplicityBound, base: &BaseSet) -> IdentityReport {
    verify_expr(&build_identity(n, alpha), base)
}

pub fn verify_expr(expr: &IdentityExpr, base: &BaseSet) -> IdentityReport {
    let eval = Evaluator::new(base, expr.alpha(), expr.n());
    let lhs = eval.unrestricted().get(expr.n()).clone();
    let rhs = expr.evaluate(eval.bounded());
    let equal = lhs == rhs;
    IdentityReport { lhs, rhs, equal }
}

/// The expansion of `(p(n1) - p_alpha(n1)) * (p(n2) - p_alpha(n2))` into
/// products of bounded counts: one term per pair of nontrivial rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedProduct {
    n1: u64,
    n2: u64,
    alpha: MultiplicityBound,
    terms: Vec<Term>,
}

impl ExpandedProduct {
    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    pub fn alpha(&self) -> MultiplicityBound {
        self.alpha
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_arg(&self) -> u64 {
        self.terms.iter().map(Term::max_arg).max().unwrap_or(0)
    }

    pub fn evaluate(&self, table: &CountTable) -> BigCount {
        self.terms.iter().map(|t| t.evaluate(table)).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "expansion n1={} n2={} alpha={}\n",
            self.n1, self.n2, self.alpha
        );
        for t in &self.terms {
            out.push_str(&format!("{}:{}\n", t.origin, join(&t.args)));
        }
        out
    }
}

pub fn expand_pair_product(n1: u64, n2: u64, alpha: MultiplicityBound) -> Result<ExpandedProduct> {
    for n in [n1, n2] {
        if n < alpha.radix() {
            return Err(Error::NoNontrivialRows {
                n,
                alpha: alpha.get(),
            });
        }
    }
    let first = build_identity(n1, alpha);
    let second = build_identity(n2, alpha);
    let mut terms = Vec::new();
    for a in first.nontrivial_terms() {
        for b in second.nontrivial_terms() {
            let (TermOrigin::Row(i), TermOrigin::Row(j)) = (a.origin, b.origin) else {
                unreachable!("identity terms carry row origins");
            };
            let args = a.args.iter().chain(&b.args).copied().collect();
            terms.push(Term::new(args, TermOrigin::Pair(i, j)));
        }
    }
    Ok(ExpandedProduct {
        n1,
        n2,
        alpha,
        terms,
    })
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_list(line: &str) -> Result<Vec<u64>> {
    line.split(',')
        .map(str::trim)
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad integer `{t}` in `{line}`")))
        })
        .collect()
}

fn parse_header(line: &str, keys: &[&str]) -> Result<Vec<u64>> {
    let mut values = Vec::with_capacity(keys.len());
    let mut fields = line.split_whitespace();
    for key in keys {
        let field = fields
            .next()
            .ok_or_else(|| Error::Parse(format!("header `{line}` is missing {key}")))?;
        let value = field
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| Error::Parse(format!("expected `{key}=` in `{line}`")))?;
        values.push(
            value
                .parse()
                .map_err(|_| Error::Parse(format!("bad {key} in `{line}`")))?,
        );
    }
    Ok(values)
}
