//! Positional scoring rules and randomized rules.

use std::fmt;
use std::str::FromStr;

use crate::binomial::{unnormalized_upper_sums, TailTable};
use crate::distributions::{DistributionSpec, QuantileList, PROB_SUM_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{Alternative, Electorate};

/// Per-rank scores `s[1] ≥ ... ≥ s[m] ≥ 0` with `s[1] > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidScores("no ranks".into()));
        }
        if scores.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidScores("scores must be finite and non-negative".into()));
        }
        if let Some(k) = scores.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidScores(format!(
                "score at rank {} exceeds rank {}",
                k + 2,
                k + 1
            )));
        }
        if scores[0] <= 0.0 {
            return Err(Error::InvalidScores("top score must be positive".into()));
        }
        Ok(ScoreVector(scores))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Score of 1-based rank `k`.
    pub fn get(&self, k: usize) -> f64 {
        self.0[k - 1]
    }

    /// `a·s + b` for `a > 0`, `b ≥ 0`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        ScoreVector::new(self.0.iter().map(|s| a * s + b).collect())
    }
}

fn degenerate_if_zero(scores: Vec<f64>, what: &str) -> Result<ScoreVector> {
    if scores.first().is_some_and(|s| *s == 0.0) {
        return Err(Error::DegenerateRule(format!("{what}: every score is zero")));
    }
    ScoreVector::new(scores)
}

/// Total score of every alternative, summed over ranks in order.
pub fn score_totals<E: Electorate + ?Sized>(sigma: &E, s: &ScoreVector) -> Result<Vec<f64>> {
    if s.len() != sigma.num_alternatives() {
        return Err(Error::LengthMismatch {
            expected: sigma.num_alternatives(),
            found: s.len(),
        });
    }
    sigma.histogram().weighted_totals(s.as_slice())
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> Alternative {
    let mut best = 0;
    for (j, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = j;
        }
    }
    Alternative::from_zero_based(best)
}

/// Winner of the scoring rule `s`; ties go to the lowest index.
pub fn score_winner<E: Electorate + ?Sized>(sigma: &E, s: &ScoreVector) -> Result<Alternative> {
    Ok(argmax(&score_totals(sigma, s)?))
}

/// `s[k] = P(Bin(m, 1/2) ≥ k)`.
pub fn binomial_scores(m: usize) -> Result<ScoreVector> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    if m <= 52 {
        let sums = unnormalized_upper_sums(m).expect("m ≤ 64");
        let scale = 2f64.powi(m as i32);
        return ScoreVector::new((1..=m).map(|k| sums[k] as f64 / scale).collect());
    }
    ScoreVector::new(TailTable::new(m).upper_tails(0.5)[1..=m].to_vec())
}

/// `Σ_{ℓ=k}^m C(m, ℓ)` for `k = 1..=m`, available for `m ≤ 64`.
pub fn binomial_scores_unnormalized(m: usize) -> Option<Vec<u128>> {
    unnormalized_upper_sums(m).map(|s| s[1..=m].to_vec())
}

/// `s[k] = P(Bin(m, 1 − p) ≥ k)`.
pub fn quantile_scores(m: usize, p: f64) -> Result<ScoreVector> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Precondition(format!("quantile fraction {p} outside (0, 1]")));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let tails = TailTable::new(m).upper_tails(1.0 - p);
    degenerate_if_zero(tails[1..=m].to_vec(), "quantile rule")
}

/// Generalized binomial scores for the quantile list `q`.
///
/// Evaluated as `Σ_t (Q_t − Q_{t−1}) · P(Bin(m, 1 − p_t) ≥ k)` with `Q_0 = 0`,
/// which equals the tail-difference form and is non-increasing in `k` by
/// construction.
pub fn generalized_binomial_scores(m: usize, q: &QuantileList) -> Result<ScoreVector> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let table = TailTable::new(m);
    let mut scores = vec![0.0; m];
    let mut previous = 0.0;
    for (p, value) in q.fractions().iter().zip(q.values()) {
        let weight = value - previous;
        previous = *value;
        if weight == 0.0 {
            continue;
        }
        let tails = table.upper_tails(1.0 - p);
        for (s, t) in scores.iter_mut().zip(&tails[1..=m]) {
            *s += weight * t;
        }
    }
    degenerate_if_zero(scores, "generalized binomial rule")
}

/// 1 for the top `⌈m/2⌉` ranks, 0 below.
pub fn top_half_scores(m: usize) -> Result<ScoreVector> {
    ScoreVector::new((1..=m).map(|k| if k <= m.div_ceil(2) { 1.0 } else { 0.0 }).collect())
}

/// `(m, m − 1, ..., 1)`.
pub fn borda_scores(m: usize) -> Result<ScoreVector> {
    ScoreVector::new((1..=m).map(|k| (m + 1 - k) as f64).collect())
}

/// `(1, 0, ..., 0)`.
pub fn plurality_scores(m: usize) -> Result<ScoreVector> {
    ScoreVector::new((1..=m).map(|k| if k == 1 { 1.0 } else { 0.0 }).collect())
}

/// `s[k] = E[X_(m+1−k)]`: the expected-welfare-maximizing scores for `d`.
pub fn ewmr_scores(d: &DistributionSpec, m: usize) -> Result<ScoreVector> {
    let e = d.order_stat_expectations(m)?;
    degenerate_if_zero(e.into_iter().rev().collect(), "expected-welfare rule")
}

/// Majority for two alternatives: ranked first by at least half, ties to 1.
pub fn majority_winner<E: Electorate + ?Sized>(sigma: &E) -> Result<Alternative> {
    if sigma.num_alternatives() != 2 {
        return Err(Error::Precondition(format!(
            "majority needs m = 2, found m = {}",
            sigma.num_alternatives()
        )));
    }
    let first: u64 = (0..sigma.group_count())
        .map(|g| sigma.group(g))
        .filter(|(r, _)| r.order()[0] == 1)
        .map(|(_, c)| c)
        .sum();
    Ok(Alternative::from_zero_based(if 2 * first >= sigma.num_voters() { 0 } else { 1 }))
}

/// Text form of a rule, resolved against `m` by [`RuleSpec::build`].
#[derive(Clone, Debug, PartialEq)]
pub enum RuleSpec {
    Binomial,
    TopHalf,
    Borda,
    Plurality,
    Majority,
    Quantile(f64),
    GeneralizedBinomial(Vec<(f64, f64)>),
    Ewmr(DistributionSpec),
    UniformRandom,
}

/// A rule instantiated for a fixed number of alternatives.
#[derive(Clone, Debug, PartialEq)]
pub enum VotingRule {
    Scoring { name: String, scores: ScoreVector },
    Majority,
    Randomized { name: String, probs: Vec<f64> },
}

impl RuleSpec {
    pub fn build(&self, m: usize) -> Result<VotingRule> {
        let scoring = |scores: Result<ScoreVector>| {
            scores.map(|scores| VotingRule::Scoring {
                name: self.to_string(),
                scores,
            })
        };
        match self {
            RuleSpec::Binomial => scoring(binomial_scores(m)),
            RuleSpec::TopHalf => scoring(top_half_scores(m)),
            RuleSpec::Borda => scoring(borda_scores(m)),
            RuleSpec::Plurality => scoring(plurality_scores(m)),
            RuleSpec::Quantile(p) => scoring(quantile_scores(m, *p)),
            RuleSpec::GeneralizedBinomial(pairs) => {
                let q = QuantileList::new(
                    pairs.iter().map(|p| p.0).collect(),
                    pairs.iter().map(|p| p.1).collect(),
                )?;
                scoring(generalized_binomial_scores(m, &q))
            }
            RuleSpec::Ewmr(d) => scoring(ewmr_scores(d, m)),
            RuleSpec::Majority => {
                if m != 2 {
                    return Err(Error::Precondition(format!("majority needs m = 2, found m = {m}")));
                }
                Ok(VotingRule::Majority)
            }
            RuleSpec::UniformRandom => VotingRule::randomized(self.to_string(), vec![1.0 / m as f64; m]),
        }
    }
}

impl VotingRule {
    pub fn randomized(name: String, probs: Vec<f64>) -> Result<Self> {
        check_probabilities(&probs)?;
        Ok(VotingRule::Randomized { name, probs })
    }

    pub fn name(&self) -> &str {
        match self {
            VotingRule::Scoring { name, .. } | VotingRule::Randomized { name, .. } => name,
            VotingRule::Majority => "majority",
        }
    }

    /// Deterministic winner; randomized rules have none.
    pub fn winner<E: Electorate + ?Sized>(&self, sigma: &E) -> Result<Alternative> {
        match self {
            VotingRule::Scoring { scores, .. } => score_winner(sigma, scores),
            VotingRule::Majority => majority_winner(sigma),
            VotingRule::Randomized { .. } => Err(Error::Precondition(
                "a randomized rule has no deterministic winner".into(),
            )),
        }
    }

    /// Distribution over the chosen alternative.
    pub fn probabilities<E: Electorate + ?Sized>(&self, sigma: &E) -> Result<Vec<f64>> {
        match self {
            VotingRule::Randomized { probs, .. } => {
                if probs.len() != sigma.num_alternatives() {
                    return Err(Error::LengthMismatch {
                        expected: sigma.num_alternatives(),
                        found: probs.len(),
                    });
                }
                Ok(probs.clone())
            }
            _ => {
                let w = self.winner(sigma)?;
                let mut p = vec![0.0; sigma.num_alternatives()];
                p[w.zero_based()] = 1.0;
                Ok(p)
            }
        }
    }
}

/// Non-negative entries summing to 1 within `1e-12`.
pub fn check_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Precondition("probabilities must be non-negative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(Error::Precondition(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Binomial => write!(f, "binomial"),
            RuleSpec::TopHalf => write!(f, "tophalf"),
            RuleSpec::Borda => write!(f, "borda"),
            RuleSpec::Plurality => write!(f, "plurality"),
            RuleSpec::Majority => write!(f, "majority"),
            RuleSpec::Quantile(p) => write!(f, "quantile:{p}"),
            RuleSpec::GeneralizedBinomial(pairs) => {
                write!(f, "genbinomial:")?;
                for (i, (p, q)) in pairs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}={q}")?;
                }
                Ok(())
            }
            RuleSpec::Ewmr(d) => write!(f, "ewmr:{d}"),
            RuleSpec::UniformRandom => write!(f, "uniform-random"),
        }
    }
}

impl FromStr for RuleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{}` is not a number", t.trim())))
        };
        match s.split_once(':') {
            None => match s {
                "binomial" => Ok(RuleSpec::Binomial),
                "tophalf" => Ok(RuleSpec::TopHalf),
                "borda" => Ok(RuleSpec::Borda),
                "plurality" => Ok(RuleSpec::Plurality),
                "majority" => Ok(RuleSpec::Majority),
                "uniform-random" => Ok(RuleSpec::UniformRandom),
                _ => Err(Error::Parse(format!("unknown rule `{s}`"))),
            },
            Some(("quantile", p)) => Ok(RuleSpec::Quantile(number(p)?)),
            Some(("ewmr", d)) => Ok(RuleSpec::Ewmr(d.parse()?)),
            Some(("genbinomial", list)) => {
                let pairs = list
                    .split(',')
                    .map(|pair| {
                        let (p, q) = pair
                            .split_once('=')
                            .ok_or_else(|| Error::Parse(format!("`{pair}` is not `p=Q`")))?;
                        Ok((number(p)?, number(q)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(RuleSpec::GeneralizedBinomial(pairs))
            }
            _ => Err(Error::Parse(format!("unknown rule `{s}`"))),
        }
    }
}
