//! Elections: alternatives, rankings, preference and utility profiles.

use std::fmt;
use std::io::{self, Write};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// A candidate, identified by its 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alternative(usize);

impl Alternative {
    pub fn new(index: usize, m: usize) -> Result<Self> {
        if index == 0 || index > m {
            return Err(Error::AlternativeOutOfRange { index, m });
        }
        Ok(Alternative(index))
    }

    /// Builds from a 0-based position without a range check.
    pub fn from_zero_based(index: usize) -> Self {
        Alternative(index + 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn zero_based(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A strict ranking; `order()[0]` is the most preferred alternative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<u32>,
}

impl Ranking {
    pub fn new(order: Vec<u32>) -> Result<Self> {
        check_permutation(&order).map_err(|problem| Error::InvalidProfile(problem.describe(1)))?;
        Ok(Ranking { order })
    }

    pub(crate) fn new_unchecked(order: Vec<u32>) -> Self {
        debug_assert!(check_permutation(&order).is_ok());
        Ranking { order }
    }

    /// The identity ranking `1, 2, ..., m`.
    pub fn identity(m: usize) -> Self {
        Ranking {
            order: (1..=m as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Alternative at 1-based rank `k`.
    pub fn at_rank(&self, k: usize) -> Alternative {
        Alternative(self.order[k - 1] as usize)
    }

    /// 1-based rank of `j`.
    pub fn rank_of(&self, j: Alternative) -> usize {
        self.order
            .iter()
            .position(|&a| a as usize == j.0)
            .map(|p| p + 1)
            .expect("alternative belongs to the ranking")
    }
}

/// Something that can be read as a list of rankings with multiplicities.
///
/// Voters are numbered consecutively through the groups, so the voter index
/// seen by the random streams does not depend on the representation.
pub trait Electorate: Sync {
    fn num_alternatives(&self) -> usize;
    fn num_voters(&self) -> u64;
    fn group_count(&self) -> usize;
    fn group(&self, g: usize) -> (&Ranking, u64);

    fn histogram(&self) -> RankHistogram {
        RankHistogram::from_electorate(self)
    }
}

/// Explicit list of `n` rankings over `m` alternatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceProfile {
    rankings: Vec<Ranking>,
    m: usize,
}

impl PreferenceProfile {
    pub fn new(rankings: Vec<Ranking>) -> Result<Self> {
        let Some(first) = rankings.first() else {
            return Err(Error::InvalidProfile("profile has no voters".into()));
        };
        let m = first.len();
        if m == 0 {
            return Err(Error::InvalidProfile("profile has no alternatives".into()));
        }
        if let Some(i) = rankings.iter().position(|r| r.len() != m) {
            return Err(Error::InvalidProfile(format!(
                "inconsistent m at voter {}: expected {m}, found {}",
                i + 1,
                rankings[i].len()
            )));
        }
        Ok(PreferenceProfile { rankings, m })
    }

    /// Builds from raw 1-based sequences, validating every voter.
    pub fn from_orders(orders: Vec<Vec<u32>>) -> Result<Self> {
        if let Err(violations) = validate_profile(&orders) {
            let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidProfile(text.join("; ")));
        }
        Self::new(orders.into_iter().map(Ranking::new_unchecked).collect())
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Parses the text format: a header `n m`, then one ranking per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty profile text".into()))?;
        let dims = parse_numbers(header)?;
        let [n, m] = dims[..] else {
            return Err(Error::Parse(format!("header must be `n m`, found `{header}`")));
        };
        let mut orders = Vec::with_capacity(n as usize);
        for line in lines {
            let order = parse_numbers(line)?;
            if order.len() != m as usize {
                return Err(Error::Parse(format!(
                    "voter {}: expected {m} entries, found {}",
                    orders.len() + 1,
                    order.len()
                )));
            }
            orders.push(order);
        }
        if orders.len() != n as usize {
            return Err(Error::Parse(format!(
                "header announces {n} voters, found {}",
                orders.len()
            )));
        }
        Self::from_orders(orders)
    }

    /// Parses the compact inline form `1 2 3; 2 1 3` (commas also separate).
    pub fn parse_inline(text: &str) -> Result<Self> {
        let orders = text
            .split(['/', ';'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(|r| parse_numbers(&r.replace(',', " ")))
            .collect::<Result<Vec<_>>>()?;
        Self::from_orders(orders)
    }

    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        write_profile_text(self, &mut out).expect("writing to memory");
        String::from_utf8(out).expect("ascii")
    }

    pub fn permute_alternatives(&self, pi: &[u32]) -> Self {
        let rankings = self
            .rankings
            .iter()
            .map(|r| Ranking::new_unchecked(r.order.iter().map(|&a| pi[a as usize - 1]).collect()))
            .collect();
        PreferenceProfile {
            rankings,
            m: self.m,
        }
    }
}

fn parse_numbers(line: &str) -> Result<Vec<u32>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| Error::Parse(format!("`{t}` is not a non-negative integer")))
        })
        .collect()
}

impl Electorate for PreferenceProfile {
    fn num_alternatives(&self) -> usize {
        self.m
    }
    fn num_voters(&self) -> u64 {
        self.rankings.len() as u64
    }
    fn group_count(&self) -> usize {
        self.rankings.len()
    }
    fn group(&self, g: usize) -> (&Ranking, u64) {
        (&self.rankings[g], 1)
    }
}

/// Rankings with multiplicities; the compact form for large electorates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedProfile {
    groups: Vec<(Ranking, u64)>,
    m: usize,
    n: u64,
}

impl GroupedProfile {
    pub fn new(groups: Vec<(Ranking, u64)>) -> Result<Self> {
        let groups: Vec<_> = groups.into_iter().filter(|(_, c)| *c > 0).collect();
        let Some((first, _)) = groups.first() else {
            return Err(Error::InvalidProfile("profile has no voters".into()));
        };
        let m = first.len();
        if m == 0 {
            return Err(Error::InvalidProfile("profile has no alternatives".into()));
        }
        if groups.iter().any(|(r, _)| r.len() != m) {
            return Err(Error::InvalidProfile("inconsistent m across groups".into()));
        }
        let n = groups.iter().map(|(_, c)| c).sum();
        Ok(GroupedProfile { groups, m, n })
    }

    pub fn groups(&self) -> &[(Ranking, u64)] {
        &self.groups
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Expands into one ranking per voter.
    pub fn expand(&self) -> PreferenceProfile {
        let rankings = self
            .groups
            .iter()
            .flat_map(|(r, c)| std::iter::repeat_n(r.clone(), *c as usize))
            .collect();
        PreferenceProfile {
            rankings,
            m: self.m,
        }
    }
}

impl From<&PreferenceProfile> for GroupedProfile {
    fn from(p: &PreferenceProfile) -> Self {
        GroupedProfile {
            groups: p.rankings.iter().map(|r| (r.clone(), 1)).collect(),
            m: p.m,
            n: p.n() as u64,
        }
    }
}

impl Electorate for GroupedProfile {
    fn num_alternatives(&self) -> usize {
        self.m
    }
    fn num_voters(&self) -> u64 {
        self.n
    }
    fn group_count(&self) -> usize {
        self.groups.len()
    }
    fn group(&self, g: usize) -> (&Ranking, u64) {
        let (r, c) = &self.groups[g];
        (r, *c)
    }
}

/// Writes any electorate in the plain profile text format.
pub fn write_profile_text<E: Electorate + ?Sized, W: Write>(e: &E, out: &mut W) -> io::Result<()> {
    writeln!(out, "{} {}", e.num_voters(), e.num_alternatives())?;
    let mut line = String::new();
    for g in 0..e.group_count() {
        let (ranking, count) = e.group(g);
        line.clear();
        for (k, a) in ranking.order().iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push_str(&a.to_string());
        }
        line.push('\n');
        for _ in 0..count {
            out.write_all(line.as_bytes())?;
        }
    }
    Ok(())
}

/// Count of voters placing each alternative at each rank.
///
/// Any non-negative integer matrix whose rows and columns all sum to `n` is a
/// sum of `n` permutation matrices, so it describes some profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankHistogram {
    m: usize,
    n: u64,
    counts: Vec<u64>,
}

impl RankHistogram {
    pub fn from_electorate<E: Electorate + ?Sized>(e: &E) -> Self {
        let m = e.num_alternatives();
        let mut counts = vec![0u64; m * m];
        for g in 0..e.group_count() {
            let (ranking, c) = e.group(g);
            for (k, &a) in ranking.order().iter().enumerate() {
                counts[(a as usize - 1) * m + k] += c;
            }
        }
        RankHistogram {
            m,
            n: e.num_voters(),
            counts,
        }
    }

    /// Row-major `counts[j][k]` for 0-based alternative `j` and rank `k`.
    pub fn from_counts(m: usize, counts: Vec<u64>) -> Result<Self> {
        if m == 0 || counts.len() != m * m {
            return Err(Error::InvalidProfile(format!(
                "histogram for m = {m} needs {} entries",
                m * m
            )));
        }
        let n: u64 = counts[..m].iter().sum();
        for j in 0..m {
            let row: u64 = counts[j * m..(j + 1) * m].iter().sum();
            let col: u64 = (0..m).map(|a| counts[a * m + j]).sum();
            if row != n || col != n {
                return Err(Error::InvalidProfile(format!(
                    "row/column {} does not sum to {n}",
                    j + 1
                )));
            }
        }
        if n == 0 {
            return Err(Error::InvalidProfile("profile has no voters".into()));
        }
        Ok(RankHistogram { m, n, counts })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Voters ranking `j` at 1-based rank `k`.
    pub fn count(&self, j: Alternative, k: usize) -> u64 {
        self.counts[j.zero_based() * self.m + k - 1]
    }

    pub fn row(&self, j: Alternative) -> &[u64] {
        let s = j.zero_based() * self.m;
        &self.counts[s..s + self.m]
    }

    /// Per alternative, `Σ_k count[j][k] · per_rank[k]` summed in rank order.
    ///
    /// Alternatives with identical rows get bit-identical totals.
    pub fn weighted_totals(&self, per_rank: &[f64]) -> Result<Vec<f64>> {
        if per_rank.len() != self.m {
            return Err(Error::LengthMismatch {
                expected: self.m,
                found: per_rank.len(),
            });
        }
        Ok(self
            .counts
            .chunks_exact(self.m)
            .map(|row| {
                row.iter()
                    .zip(per_rank)
                    .map(|(&c, &s)| c as f64 * s)
                    .fold(0.0, |acc, x| acc + x)
            })
            .collect())
    }
}

/// One voter's problem with a raw ranking list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileViolation {
    NoVoters,
    Empty { voter: usize },
    InconsistentLength { voter: usize, expected: usize, found: usize },
    OutOfRange { voter: usize, value: u32 },
    Duplicate { voter: usize, alternative: u32 },
}

impl fmt::Display for ProfileViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileViolation::NoVoters => write!(f, "profile has no voters"),
            ProfileViolation::Empty { voter } => write!(f, "empty ranking at voter {voter}"),
            ProfileViolation::InconsistentLength {
                voter,
                expected,
                found,
            } => write!(
                f,
                "inconsistent m at voter {voter}: expected {expected}, found {found}"
            ),
            ProfileViolation::OutOfRange { voter, value } => {
                write!(f, "alternative {value} out of range at voter {voter}")
            }
            ProfileViolation::Duplicate { voter, alternative } => {
                write!(f, "duplicate alternative {alternative} at voter {voter}")
            }
        }
    }
}

enum PermutationProblem {
    Empty,
    OutOfRange(u32),
    Duplicate(u32),
}

impl PermutationProblem {
    fn describe(&self, voter: usize) -> String {
        self.violation(voter).to_string()
    }

    fn violation(&self, voter: usize) -> ProfileViolation {
        match *self {
            PermutationProblem::Empty => ProfileViolation::Empty { voter },
            PermutationProblem::OutOfRange(value) => ProfileViolation::OutOfRange { voter, value },
            PermutationProblem::Duplicate(alternative) => {
                ProfileViolation::Duplicate { voter, alternative }
            }
        }
    }
}

fn check_permutation(order: &[u32]) -> std::result::Result<(), PermutationProblem> {
    let m = order.len();
    if m == 0 {
        return Err(PermutationProblem::Empty);
    }
    let mut seen = vec![false; m];
    for &a in order {
        if a == 0 || a as usize > m {
            return Err(PermutationProblem::OutOfRange(a));
        }
        if std::mem::replace(&mut seen[a as usize - 1], true) {
            return Err(PermutationProblem::Duplicate(a));
        }
    }
    Ok(())
}

/// Checks raw rankings and lists every violating voter (1-based).
pub fn validate_profile(orders: &[Vec<u32>]) -> std::result::Result<(), Vec<ProfileViolation>> {
    let Some(first) = orders.first() else {
        return Err(vec![ProfileViolation::NoVoters]);
    };
    let expected = first.len();
    let mut violations = Vec::new();
    for (i, order) in orders.iter().enumerate() {
        let voter = i + 1;
        if order.len() != expected {
            violations.push(ProfileViolation::InconsistentLength {
                voter,
                expected,
                found: order.len(),
            });
        } else if let Err(problem) = check_permutation(order) {
            violations.push(problem.violation(voter));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// An `n × m` utility matrix with entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityProfile {
    n: usize,
    m: usize,
    u: Vec<f64>,
}

impl UtilityProfile {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::InvalidUtilities("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidUtilities("ragged rows".into()));
        }
        Self::from_flat(n, m, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(n: usize, m: usize, u: Vec<f64>) -> Result<Self> {
        if u.len() != n * m || n == 0 || m == 0 {
            return Err(Error::InvalidUtilities(format!(
                "expected {} entries, found {}",
                n * m,
                u.len()
            )));
        }
        if let Some(x) = u.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidUtilities(format!("entry {x} outside [0, 1]")));
        }
        Ok(UtilityProfile { n, m, u })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Utilities of 0-based voter `i`, indexed by 0-based alternative.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i * self.m..(i + 1) * self.m]
    }

    pub fn get(&self, i: usize, j: Alternative) -> f64 {
        self.u[i * self.m + j.zero_based()]
    }
}

/// Utilitarian welfare `Σ_i u[i][j]`.
pub fn social_welfare(u: &UtilityProfile, j: Alternative) -> Result<f64> {
    if j.index() > u.m {
        return Err(Error::AlternativeOutOfRange {
            index: j.index(),
            m: u.m,
        });
    }
    Ok((0..u.n).map(|i| u.get(i, j)).sum())
}

/// Ranks each voter's alternatives by utility, ties to the lower index.
pub fn induced_profile(u: &UtilityProfile) -> PreferenceProfile {
    let rankings = (0..u.n)
        .map(|i| {
            let row = u.row(i);
            let mut order: Vec<u32> = (1..=u.m as u32).collect();
            order.sort_by(|&a, &b| row[b as usize - 1].total_cmp(&row[a as usize - 1]));
            Ranking::new_unchecked(order)
        })
        .collect();
    PreferenceProfile { rankings, m: u.m }
}

/// Draws `u ▷ σ`: per voter, `m` draws sorted descending and handed out in
/// rank order. Voter `i` reads from `stream.voter(i)`.
pub fn draw_consistent_utilities<E: Electorate + ?Sized>(
    sigma: &E,
    d: &DistributionSpec,
    stream: &RandomStream,
) -> UtilityProfile {
    let m = sigma.num_alternatives();
    let n = sigma.num_voters() as usize;
    let mut u = vec![0.0; n * m];
    let mut draws = vec![0.0; m];
    let mut voter = 0usize;
    for g in 0..sigma.group_count() {
        let (ranking, count) = sigma.group(g);
        for _ in 0..count {
            let mut rng = stream.voter(voter as u64);
            for x in draws.iter_mut() {
                *x = d.sample(&mut rng);
            }
            draws.sort_unstable_by(|a, b| b.total_cmp(a));
            let row = &mut u[voter * m..(voter + 1) * m];
            for (k, &a) in ranking.order().iter().enumerate() {
                row[a as usize - 1] = draws[k];
            }
            voter += 1;
        }
    }
    UtilityProfile { n, m, u }
}
