//! Desk-scale reproductions of every guarantee and construction.
//!
//! Each procedure returns a [`VerificationResult`] that carries both sides of
//! the inequalities it checked, so a failure can be diagnosed from the
//! result alone.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::{appendix_c_instance, thm2_instance, thm4_instance, thm6_instance, two_alt_profile};
use crate::distributions::{DistributionSpec, QuantileList};
use crate::engine::{
    exact_expected_distortion, exact_expected_welfare, hoeffding95, mc_expected_distortion,
    mc_expected_inverse_distortion_many, randomized_rule_expected_distortion, sample_based_edmr,
    sampling_batches, EstimationConfig, InverseDistortionOptions,
};
use crate::error::{Error, Result};
use crate::model::{Alternative, PreferenceProfile, Ranking};
use crate::rules::{
    argmax, binomial_scores, borda_scores, ewmr_scores, generalized_binomial_scores, majority_winner,
    plurality_scores, quantile_scores, score_totals, score_winner, top_half_scores, ScoreVector,
};

/// Identifiers accepted by [`run`].
pub const IDS: &[&str] = &[
    "thm1",
    "ewmr-equivalence",
    "thm2",
    "thm3-trend",
    "thm4",
    "thm5",
    "thm6",
    "thm7-binomial",
    "cor-quantile",
    "thm-genbinomial",
    "cor-limit",
    "appendixA",
    "appendixC",
    "appendixF-mu",
    "appendixK-sampling",
    "appendixL-borda-tv",
    "appendixM-plurality",
];

/// Scale and seeding. `None` picks each procedure's default size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub workers: usize,
    pub instances: Option<usize>,
    pub trials: Option<u64>,
}

impl VerifyOptions {
    pub fn new(seed: u64) -> Self {
        VerifyOptions {
            seed,
            workers: 1,
            instances: None,
            trials: None,
        }
    }

    fn instances(&self, default: usize) -> usize {
        self.instances.unwrap_or(default)
    }

    fn trials(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
    Equal,
}

/// One inequality `lhs (≥ | ≤ | =) rhs`, allowing `tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub description: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl Check {
    fn slack(&self) -> f64 {
        match self.relation {
            Relation::AtLeast => self.lhs - self.rhs,
            Relation::AtMost => self.rhs - self.lhs,
            Relation::Equal => -(self.lhs - self.rhs).abs(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Equal => "==",
        };
        write!(
            f,
            "[{}] {}: {} {op} {} (tolerance {})",
            if self.holds { "ok" } else { "VIOLATED" },
            self.description,
            self.lhs,
            self.rhs,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationResult {
    pub id: String,
    pub passed: bool,
    pub measured: Vec<(String, f64)>,
    /// Headline checks, every violation, and the tightest passing check.
    pub checks: Vec<Check>,
    pub checks_run: usize,
    pub claimed_bound: f64,
    pub tolerance: f64,
    pub runtime: Duration,
}

impl VerificationResult {
    /// First violated check, if any.
    pub fn violation(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.holds)
    }

    /// Summary line: id, verdict and the deciding numbers.
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let detail = match self.violation() {
            Some(c) => c.to_string(),
            None => self
                .checks
                .iter()
                .min_by(|a, b| a.slack().total_cmp(&b.slack()))
                .map_or_else(String::new, |c| format!("tightest {c}")),
        };
        format!("{verdict} {} ({} checks) {detail}", self.id, self.checks_run)
    }
}

impl fmt::Display for VerificationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "id = {}", self.id)?;
        writeln!(f, "result = {}", if self.passed { "pass" } else { "fail" })?;
        writeln!(f, "claimed_bound = {}", self.claimed_bound)?;
        writeln!(f, "tolerance = {}", self.tolerance)?;
        writeln!(f, "checks_run = {}", self.checks_run)?;
        for (k, v) in &self.measured {
            writeln!(f, "measured.{k} = {v}")?;
        }
        for c in &self.checks {
            writeln!(f, "check = {c}")?;
        }
        write!(f, "runtime_seconds = {:.3}", self.runtime.as_secs_f64())
    }
}

const MAX_RECORDED_FAILURES: usize = 25;

struct CheckLog {
    checks: Vec<Check>,
    tightest: Option<Check>,
    failures: usize,
    run: usize,
}

impl CheckLog {
    fn new() -> Self {
        CheckLog {
            checks: Vec::new(),
            tightest: None,
            failures: 0,
            run: 0,
        }
    }

    fn check(&mut self, description: impl FnOnce() -> String, lhs: f64, relation: Relation, rhs: f64, tolerance: f64, keep: bool) -> bool {
        let holds = match relation {
            Relation::AtLeast => lhs >= rhs - tolerance,
            Relation::AtMost => lhs <= rhs + tolerance,
            Relation::Equal => (lhs - rhs).abs() <= tolerance,
        };
        self.run += 1;
        let make = |description: String| Check {
            description,
            lhs,
            relation,
            rhs,
            tolerance,
            holds,
        };
        if keep || (!holds && self.failures < MAX_RECORDED_FAILURES) {
            self.checks.push(make(description()));
        } else if holds {
            let slack = make(String::new()).slack();
            if self.tightest.as_ref().is_none_or(|t| slack < t.slack()) {
                self.tightest = Some(make(description()));
            }
        }
        if !holds {
            self.failures += 1;
        }
        holds
    }

    fn at_least(&mut self, description: impl FnOnce() -> String, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        self.check(description, lhs, Relation::AtLeast, rhs, tolerance, false)
    }

    fn at_most(&mut self, description: impl FnOnce() -> String, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        self.check(description, lhs, Relation::AtMost, rhs, tolerance, false)
    }

    fn headline(&mut self, description: &str, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> bool {
        self.check(|| description.to_string(), lhs, relation, rhs, tolerance, true)
    }

    fn finish(
        mut self,
        id: &str,
        measured: Vec<(String, f64)>,
        claimed_bound: f64,
        tolerance: f64,
        started: Instant,
    ) -> VerificationResult {
        if let Some(t) = self.tightest.take() {
            self.checks.push(t);
        }
        VerificationResult {
            id: id.to_string(),
            passed: self.failures == 0,
            measured,
            checks: self.checks,
            checks_run: self.run,
            claimed_bound,
            tolerance,
            runtime: started.elapsed(),
        }
    }
}

/// Impartial-culture profile: every ranking uniformly at random.
pub fn random_profile<R: Rng>(rng: &mut R, n: usize, m: usize) -> PreferenceProfile {
    let rankings = (0..n)
        .map(|_| {
            let mut order: Vec<u32> = (1..=m as u32).collect();
            order.shuffle(rng);
            Ranking::new_unchecked(order)
        })
        .collect();
    PreferenceProfile::new(rankings).expect("n, m >= 1")
}

fn random_probs<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Random finite distribution with `atoms` distinct atoms in `[lo, 1]`.
pub fn random_discrete<R: Rng>(rng: &mut R, atoms: usize, lo: f64) -> DistributionSpec {
    loop {
        let mut a: Vec<f64> = (0..atoms).map(|_| rng.gen_range(lo..=1.0)).collect();
        a.sort_by(f64::total_cmp);
        if a.windows(2).all(|w| w[0] < w[1]) {
            let probs = random_probs(rng, atoms);
            return DistributionSpec::discrete(a, probs).expect("valid by construction");
        }
    }
}

/// Random finite distribution with two to four atoms in `[lo, 1]`.
pub fn random_discrete_2_to_4<R: Rng>(rng: &mut R, lo: f64) -> DistributionSpec {
    let atoms = rng.gen_range(2..=4);
    random_discrete(rng, atoms, lo)
}

/// Random finite distribution mirrored about 1/2.
pub fn random_symmetric_discrete<R: Rng>(rng: &mut R) -> DistributionSpec {
    let pairs = rng.gen_range(1..=2);
    let centre = rng.gen_bool(0.5);
    let mut lows: Vec<f64> = (0..pairs).map(|_| rng.gen_range(0.0..0.49)).collect();
    lows.sort_by(f64::total_cmp);
    lows.dedup();
    let weights = random_probs(rng, lows.len() + usize::from(centre));
    let mut atoms = Vec::new();
    let mut probs = Vec::new();
    for (a, w) in lows.iter().zip(&weights) {
        atoms.push(*a);
        probs.push(w / 2.0);
    }
    if centre {
        atoms.push(0.5);
        probs.push(*weights.last().unwrap());
    }
    for (a, w) in lows.iter().zip(&weights).rev() {
        atoms.push(1.0 - a);
        probs.push(w / 2.0);
    }
    DistributionSpec::discrete(atoms, probs).expect("valid by construction")
}

/// Runs the procedure named `id`.
pub fn run(id: &str, opts: &VerifyOptions) -> Result<VerificationResult> {
    match id {
        "thm1" => thm1(opts),
        "ewmr-equivalence" => ewmr_equivalence(opts),
        "thm2" => thm2(opts),
        "thm3-trend" => thm3_trend(opts),
        "thm4" => thm4(opts),
        "thm5" => thm5(opts),
        "thm6" => thm6(opts),
        "thm7-binomial" => thm7_binomial(opts),
        "cor-quantile" => cor_quantile(opts),
        "thm-genbinomial" => thm_genbinomial(opts),
        "cor-limit" => cor_limit(opts),
        "appendixA" => appendix_a(opts),
        "appendixC" => appendix_c(opts),
        "appendixF-mu" => appendix_f_mu(opts),
        "appendixK-sampling" => appendix_k_sampling(opts),
        "appendixL-borda-tv" => appendix_l_borda_tv(opts),
        "appendixM-plurality" => appendix_m_plurality(opts),
        _ => Err(Error::Parse(format!("unknown verification id `{id}`"))),
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Majority is optimal for two alternatives, checked by full enumeration.
pub fn thm1(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut rng = opts.rng(1);
    let dists: Vec<DistributionSpec> = (0..opts.instances(24))
        .map(|i| random_discrete(&mut rng, 2 + i % 2, 0.01))
        .collect();
    let mut log = CheckLog::new();
    let mut worst_gap = 0.0f64;
    for (di, d) in dists.iter().enumerate() {
        let fd = d.to_discrete().expect("finite");
        for n in 1..=4 {
            let mut previous: Option<f64> = None;
            for k in 0..=n {
                let sigma = two_alt_profile(n, k)?;
                let dist = exact_expected_distortion(&sigma, &fd)?;
                let welfare = exact_expected_welfare(&sigma, d)?;
                let w = majority_winner(&sigma)?.zero_based();
                worst_gap = worst_gap.max(max_of(&dist) - dist[w]);
                log.at_least(|| format!("dist {di} n={n} k={k}: majority distortion vs max"), dist[w], max_of(&dist), 1e-9);
                log.at_least(|| format!("dist {di} n={n} k={k}: majority welfare vs max"), welfare[w], max_of(&welfare), 1e-9);
                if let Some(prev) = previous {
                    log.at_least(|| format!("dist {di} n={n}: distortion of 1 non-decreasing at k={k}"), dist[0], prev, 1e-9);
                }
                previous = Some(dist[0]);
            }
        }
    }
    let measured = vec![
        ("distributions".into(), dists.len() as f64),
        ("max_distortion_shortfall_of_majority".into(), worst_gap),
    ];
    Ok(log.finish("thm1", measured, 1.0, 1e-9, started))
}

/// Exact welfare argmax equals the winner under the expected order statistics.
pub fn ewmr_equivalence(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut rng = opts.rng(2);
    let mut log = CheckLog::new();
    let total = opts.instances(200);
    let mut agree = 0;
    for i in 0..total {
        let (n, m) = (rng.gen_range(1..=20), rng.gen_range(1..=6));
        let d = random_discrete_2_to_4(&mut rng, 0.01);
        let sigma = random_profile(&mut rng, n, m);
        let by_welfare = argmax(&exact_expected_welfare(&sigma, &d)?);
        let by_score = score_winner(&sigma, &ewmr_scores(&d, m)?)?;
        agree += usize::from(by_welfare == by_score);
        log.check(
            || format!("instance {i}: welfare argmax vs score winner"),
            by_welfare.index() as f64,
            Relation::Equal,
            by_score.index() as f64,
            0.0,
            false,
        );
    }
    let measured = vec![("instances".into(), total as f64), ("agreements".into(), agree as f64)];
    Ok(log.finish("ewmr-equivalence", measured, 1.0, 0.0, started))
}

fn ratio_harness<F>(
    id: &str,
    opts: &VerifyOptions,
    salt: u64,
    default_instances: usize,
    mut sample: F,
) -> Result<VerificationResult>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<(String, PreferenceProfile, DistributionSpec, ScoreVector, f64)>,
{
    let started = Instant::now();
    let mut rng = opts.rng(salt);
    let mut log = CheckLog::new();
    let total = opts.instances(default_instances);
    let mut min_ratio = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut bound_at_min = 0.0;
    for i in 0..total {
        let (label, sigma, d, scores, bound) = sample(&mut rng)?;
        let welfare = exact_expected_welfare(&sigma, &d)?;
        let best = max_of(&welfare);
        let chosen = welfare[score_winner(&sigma, &scores)?.zero_based()];
        let ratio = if best > 0.0 { chosen / best } else { 1.0 };
        min_ratio = min_ratio.min(ratio);
        if ratio - bound < min_margin {
            min_margin = ratio - bound;
            bound_at_min = bound;
        }
        log.at_least(
            || format!("instance {i} ({label}): EW(rule winner) vs bound x EW(best)"),
            chosen,
            bound * best,
            1e-9,
        );
    }
    let measured = vec![
        ("instances".into(), total as f64),
        ("min_welfare_ratio".into(), min_ratio),
        ("min_ratio_minus_bound".into(), min_margin),
        ("bound_at_tightest_instance".into(), bound_at_min),
    ];
    Ok(log.finish(id, measured, bound_at_min, 1e-9, started))
}

fn small_instance(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> (PreferenceProfile, usize) {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(2..=max_m);
    (random_profile(rng, n, m), m)
}

/// Binomial voting reaches `ν/2` of the optimal expected welfare.
pub fn thm7_binomial(opts: &VerifyOptions) -> Result<VerificationResult> {
    ratio_harness("thm7-binomial", opts, 7, 500, |rng| {
        let (sigma, m) = small_instance(rng, 50, 10);
        let d = random_discrete_2_to_4(rng, 0.0);
        let nu = d.largest_median();
        Ok((format!("nu = {nu}"), sigma, d, binomial_scores(m)?, nu / 2.0))
    })
}

/// Top-half approval reaches 1/3 of the optimum for symmetric distributions.
pub fn thm5(opts: &VerifyOptions) -> Result<VerificationResult> {
    ratio_harness("thm5", opts, 5, 500, |rng| {
        let (sigma, m) = small_instance(rng, 50, 10);
        let d = random_symmetric_discrete(rng);
        debug_assert!(d.is_symmetric());
        Ok((d.to_string(), sigma, d, top_half_scores(m)?, 1.0 / 3.0))
    })
}

/// The `p`-quantile rule reaches `(1 − p) Q_p` of the optimum.
pub fn cor_quantile(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut parts = Vec::new();
    for (i, p) in [0.1, 0.25, 0.75].into_iter().enumerate() {
        parts.push(ratio_harness("cor-quantile", opts, 20 + i as u64, 500, |rng| {
            let (sigma, m) = small_instance(rng, 50, 10);
            let d = random_discrete_2_to_4(rng, 0.0);
            let q = d.largest_quantile(p)?;
            Ok((format!("p = {p}, Q = {q}"), sigma, d, quantile_scores(m, p)?, (1.0 - p) * q))
        })?);
    }
    Ok(merge("cor-quantile", parts, started))
}

/// Plurality reaches `max(1/n, 1/m)` of the optimum.
pub fn appendix_m_plurality(opts: &VerifyOptions) -> Result<VerificationResult> {
    ratio_harness("appendixM-plurality", opts, 13, 500, |rng| {
        let (sigma, m) = small_instance(rng, 50, 10);
        let d = random_discrete_2_to_4(rng, 0.0);
        let alpha = (1.0 / sigma.n() as f64).max(1.0 / m as f64);
        Ok((format!("n = {}, m = {m}", sigma.n()), sigma, d, plurality_scores(m)?, alpha))
    })
}

fn merge(id: &str, parts: Vec<VerificationResult>, started: Instant) -> VerificationResult {
    let mut out = VerificationResult {
        id: id.to_string(),
        passed: parts.iter().all(|p| p.passed),
        measured: Vec::new(),
        checks: Vec::new(),
        checks_run: parts.iter().map(|p| p.checks_run).sum(),
        claimed_bound: parts.iter().map(|p| p.claimed_bound).fold(f64::INFINITY, f64::min),
        tolerance: parts.iter().map(|p| p.tolerance).fold(0.0, f64::max),
        runtime: Duration::ZERO,
    };
    for (i, p) in parts.into_iter().enumerate() {
        out.measured.extend(p.measured.into_iter().map(|(k, v)| (format!("part{}.{k}", i + 1), v)));
        out.checks.extend(p.checks);
    }
    out.runtime = started.elapsed();
    out
}

/// Generalized binomial voting is a `β`-approximation, and its scores never
/// exceed the expected welfare.
pub fn thm_genbinomial(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut rng = opts.rng(31);
    let mut log = CheckLog::new();
    let total = opts.instances(500);
    let mut min_ratio = f64::INFINITY;
    for i in 0..total {
        let t = [1usize, 3, 10][i % 3];
        let (sigma, m) = small_instance(&mut rng, 50, 10);
        let d = random_discrete_2_to_4(&mut rng, 0.0);
        let fractions = (1..=t).map(|s| s as f64 / (t + 1) as f64).collect();
        let q = QuantileList::from_distribution(&d, fractions)?;
        let beta = q.guarantee();
        let welfare = exact_expected_welfare(&sigma, &d)?;
        let best = max_of(&welfare);
        let scores = match generalized_binomial_scores(m, &q) {
            Ok(s) => s,
            // All quantiles at zero: the guarantee is zero and holds trivially.
            Err(Error::DegenerateRule(_)) if beta == 0.0 => continue,
            Err(e) => return Err(e),
        };
        let chosen = welfare[score_winner(&sigma, &scores)?.zero_based()];
        if best > 0.0 {
            min_ratio = min_ratio.min(chosen / best);
        }
        log.at_least(|| format!("instance {i} (T = {t}, beta = {beta}): EW(winner) vs beta x EW(best)"), chosen, beta * best, 1e-9);
        let totals = score_totals(&sigma, &scores)?;
        for (j, (s, w)) in totals.iter().zip(&welfare).enumerate() {
            log.at_most(|| format!("instance {i}: total score of {} vs its expected welfare", j + 1), *s, *w, 1e-9);
        }
    }
    let measured = vec![("instances".into(), total as f64), ("min_welfare_ratio".into(), min_ratio)];
    Ok(log.finish("thm-genbinomial", measured, 0.0, 1e-9, started))
}

/// Generalized binomial scores on the grid `t/T` approach the uniform
/// expected order statistics within `2/T`.
pub fn cor_limit(_opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut log = CheckLog::new();
    let m = 5;
    let u = DistributionSpec::Uniform01;
    let mut measured = Vec::new();
    for t in [10usize, 100, 1000] {
        let q = QuantileList::uniform_grid(&u, t)?;
        let s = generalized_binomial_scores(m, &q)?;
        let err = (1..=m)
            .map(|k| (s.get(k) - (m + 1 - k) as f64 / (m + 1) as f64).abs())
            .fold(0.0, f64::max);
        measured.push((format!("sup_error_T{t}"), err));
        log.headline(&format!("T = {t}: sup-norm error vs 2/T"), err, Relation::AtMost, 2.0 / t as f64, 0.0);
    }
    Ok(log.finish("cor-limit", measured, 0.0, 0.0, started))
}

fn oracle_instance(rng: &mut ChaCha8Rng) -> (PreferenceProfile, DistributionSpec) {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(2..=3);
    let atoms = rng.gen_range(2..=3);
    (random_profile(rng, n, m), random_discrete(rng, atoms, 0.01))
}

/// Deterministic choices dominate randomized ones.
pub fn appendix_a(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut rng = opts.rng(41);
    let mut log = CheckLog::new();
    let instances = 10;
    let vectors = opts.instances(100);
    for i in 0..instances {
        let (sigma, d) = oracle_instance(&mut rng);
        let dist = exact_expected_distortion(&sigma, &d.to_discrete().expect("finite"))?;
        let welfare = exact_expected_welfare(&sigma, &d)?;
        for v in 0..vectors {
            let probs = random_probs(&mut rng, sigma.m());
            let rd = randomized_rule_expected_distortion(&dist, &probs)?;
            let rw = randomized_rule_expected_distortion(&welfare, &probs)?;
            log.at_most(|| format!("instance {i} vector {v}: randomized distortion vs best"), rd, max_of(&dist), 1e-12);
            log.at_most(|| format!("instance {i} vector {v}: randomized welfare vs best"), rw, max_of(&welfare), 1e-12);
        }
    }
    let measured = vec![("instances".into(), instances as f64), ("vectors_per_instance".into(), vectors as f64)];
    Ok(log.finish("appendixA", measured, 0.0, 1e-12, started))
}

/// The welfare winner's expected distortion is at least the mean utility.
pub fn appendix_f_mu(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut rng = opts.rng(51);
    let mut log = CheckLog::new();
    let total = opts.instances(200);
    let mut min_margin = f64::INFINITY;
    for i in 0..total {
        let (sigma, d) = oracle_instance(&mut rng);
        let dist = exact_expected_distortion(&sigma, &d.to_discrete().expect("finite"))?;
        let w = argmax(&exact_expected_welfare(&sigma, &d)?);
        min_margin = min_margin.min(dist[w.zero_based()] - d.mean());
        log.at_least(|| format!("instance {i}: E[dist(welfare winner)] vs mean"), dist[w.zero_based()], d.mean(), 1e-9);
    }
    let measured = vec![("instances".into(), total as f64), ("min_distortion_minus_mean".into(), min_margin)];
    Ok(log.finish("appendixF-mu", measured, 0.0, 1e-9, started))
}

/// Sampling-based rule: near-optimal with the promised probability.
pub fn appendix_k_sampling(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut log = CheckLog::new();
    let (eps, delta) = (0.1f64, 0.1f64);
    let sigma = PreferenceProfile::from_orders(vec![vec![1, 2, 3], vec![2, 1, 3], vec![3, 2, 1]])?;
    let d = DistributionSpec::discrete(vec![0.2, 1.0], vec![0.5, 0.5])?;
    let truth = exact_expected_distortion(&sigma, &d.to_discrete().expect("finite"))?;
    let optimum = max_of(&truth);
    let expected_t = (2.0 * (2.0 * 3.0 / delta).ln() / (d.mean().powi(2) * eps * eps)).ceil() as u64;
    log.headline("batch count vs formula", sampling_batches(3, d.mean(), eps, delta)? as f64, Relation::Equal, expected_t as f64, 0.0);
    let runs = opts.instances(200);
    let mut bad = 0;
    let mut seeds = opts.rng(61);
    for r in 0..runs {
        let (winner, t) = sample_based_edmr(&sigma, &d, eps, delta, seeds.gen())?;
        log.at_least(|| format!("run {r}: batches used"), t as f64, expected_t as f64, 0.0);
        if truth[winner.zero_based()] < (1.0 - eps) * optimum {
            bad += 1;
        }
    }
    let fraction = bad as f64 / runs as f64;
    log.headline("fraction of runs below (1 - eps) x optimum vs delta + 0.05", fraction, Relation::AtMost, delta + 0.05, 0.0);
    let measured = vec![
        ("runs".into(), runs as f64),
        ("batches".into(), expected_t as f64),
        ("bad_fraction".into(), fraction),
        ("optimum".into(), optimum),
    ];
    Ok(log.finish("appendixK-sampling", measured, delta + 0.05, 0.0, started))
}

/// Borda near the uniform distribution: within `1 − 5 eps` of the optimum.
pub fn appendix_l_borda_tv(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut rng = opts.rng(71);
    let mut log = CheckLog::new();
    let total = opts.instances(100);
    let mut measured = Vec::new();
    for eps in [0.01, 0.02] {
        let d = DistributionSpec::perturbed(eps)?;
        let per_m: Vec<Option<ScoreVector>> = (0..=8).map(|m| if m >= 2 { ewmr_scores(&d, m).ok() } else { None }).collect();
        let mut min_ratio = f64::INFINITY;
        for i in 0..total {
            let (sigma, m) = small_instance(&mut rng, 30, 8);
            let ew_scores = per_m[m].as_ref().ok_or(Error::Quadrature { achieved: f64::NAN })?;
            let welfare = score_totals(&sigma, ew_scores)?;
            let best = max_of(&welfare);
            let chosen = welfare[score_winner(&sigma, &borda_scores(m)?)?.zero_based()];
            min_ratio = min_ratio.min(chosen / best);
            log.at_least(|| format!("eps {eps} instance {i}: EW(Borda) vs (1 - 5 eps) x EW(best)"), chosen, (1.0 - 5.0 * eps) * best, 1e-6);
        }
        measured.push((format!("min_ratio_eps{eps}"), min_ratio));
    }
    let u = DistributionSpec::Uniform01;
    let mut identical = 0;
    for i in 0..total {
        let (sigma, m) = small_instance(&mut rng, 30, 8);
        let welfare = exact_expected_welfare(&sigma, &u)?;
        let borda = score_winner(&sigma, &borda_scores(m)?)?;
        let ewmr = argmax(&welfare);
        identical += usize::from(borda == ewmr);
        // Equal up to rounding of k/(m+1): a tie in exact arithmetic is an agreement.
        let best = max_of(&welfare);
        log.at_least(|| format!("uniform instance {i}: EW(Borda) vs EW(best)"), welfare[borda.zero_based()], best, 1e-12 * best.max(1.0));
    }
    measured.push(("uniform_identical_winners".into(), identical as f64));
    measured.push(("uniform_instances".into(), total as f64));
    Ok(log.finish("appendixL-borda-tv", measured, 0.9, 1e-6, started))
}

/// Welfare winner and distortion winner separate by a factor `16/m`.
pub fn thm2(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut log = CheckLog::new();
    let (m, n) = (32usize, 1_000_000u64);
    let inst = thm2_instance(m, n)?;
    let d = &inst.distributions[0];
    let welfare = exact_expected_welfare(&inst.profile, d)?;
    let ewmr = argmax(&welfare);
    log.headline("welfare winner is alternative 1", ewmr.index() as f64, Relation::Equal, 1.0, 0.0);
    let trials = opts.trials(200);
    let cfg = EstimationConfig::new(trials, opts.seed).with_workers(opts.workers);
    let report = mc_expected_distortion(&inst.profile, d, &cfg)?;
    let h = hoeffding95(trials);
    let first = report.get(Alternative::from_zero_based(0)).expected_distortion;
    let second = report.get(Alternative::from_zero_based(1)).expected_distortion;
    let mf = m as f64;
    log.headline("E[dist(1)] vs 8/m + h", first, Relation::AtMost, 8.0 / mf + h, 0.0);
    log.headline("E[dist(2)] vs 1/2 - h", second, Relation::AtLeast, 0.5 - h, 0.0);
    log.headline("(E[dist(1)] - h) vs 16/m x (E[dist(2)] + h)", first - h, Relation::AtMost, 16.0 / mf * (second + h), 0.0);
    let edmr = argmax(&report.distortions());
    let measured = vec![
        ("m".into(), mf),
        ("n".into(), n as f64),
        ("trials".into(), trials as f64),
        ("hoeffding95".into(), h),
        ("est_distortion_alt1".into(), first),
        ("est_distortion_alt2".into(), second),
        ("measured_ratio".into(), first / second),
        ("distortion_winner".into(), edmr.index() as f64),
        ("zero_welfare_trials".into(), report.zero_welfare_trials as f64),
    ];
    Ok(log.finish("thm2", measured, 16.0 / mf, h, started))
}

/// The welfare winner's expected distortion ratio grows with `n`.
pub fn thm3_trend(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut log = CheckLog::new();
    let d = DistributionSpec::discrete(vec![0.01, 1.0], vec![0.9, 0.1])?;
    let m = 6;
    let trials = opts.trials(2000);
    let h = hoeffding95(trials);
    let mut measured = vec![("trials".into(), trials as f64), ("hoeffding95".into(), h)];
    let mut previous: Option<f64> = None;
    let mut last = 0.0;
    for (i, n) in [10usize, 100, 1000].into_iter().enumerate() {
        let sigma = random_profile(&mut opts.rng(80 + i as u64), n, m);
        let ewmr = argmax(&exact_expected_welfare(&sigma, &d)?);
        let cfg = EstimationConfig::new(trials, opts.seed.wrapping_add(i as u64)).with_workers(opts.workers);
        let report = mc_expected_distortion(&sigma, &d, &cfg)?;
        let dist = report.distortions();
        let ratio = dist[ewmr.zero_based()] / max_of(&dist);
        measured.push((format!("ratio_n{n}"), ratio));
        if let Some(prev) = previous {
            log.headline(&format!("ratio at n = {n} vs previous n"), ratio, Relation::AtLeast, prev, 2.0 * h);
        }
        previous = Some(ratio);
        last = ratio;
    }
    log.headline("ratio at n = 1000 vs 0.95", last, Relation::AtLeast, 0.95, 0.0);
    Ok(log.finish("thm3-trend", measured, 0.95, 2.0 * h, started))
}

/// No alternative is within factor `α = 0.4` for both Bernoulli laws.
pub fn thm4(_opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut log = CheckLog::new();
    let alpha = 0.4;
    let inst = thm4_instance(alpha)?;
    let low = exact_expected_welfare(&inst.profile, &inst.distributions[0])?;
    let high = exact_expected_welfare(&inst.profile, &inst.distributions[1])?;
    let (max_low, max_high) = (max_of(&low), max_of(&high));
    log.headline("alternative 1 under Bernoulli(mu - delta): EW / max", low[0] / max_low, Relation::AtMost, alpha, 0.0);
    let (worst_j, worst) = high
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, w)| (j, w / max_high))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    log.headline(&format!("best other alternative ({}) under Bernoulli(mu): EW / max", worst_j + 1), worst, Relation::AtMost, alpha, 0.0);
    let mut measured: Vec<(String, f64)> = inst.parameters().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    measured.push(("ratio_alt1_low".into(), low[0] / max_low));
    measured.push(("ratio_best_other_high".into(), worst));
    Ok(log.finish("thm4", measured, alpha, 0.0, started))
}

/// Uniform versus fair coin at `m = 256`.
pub fn thm6(_opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut log = CheckLog::new();
    let inst = thm6_instance(256, 254 * 100)?;
    let uniform = exact_expected_welfare(&inst.profile, &inst.distributions[0])?;
    let coin = exact_expected_welfare(&inst.profile, &inst.distributions[1])?;
    let ratio_uniform = uniform[0] / max_of(&uniform);
    let max_coin = max_of(&coin);
    let worst_other = coin[1..].iter().map(|w| w / max_coin).fold(f64::NEG_INFINITY, f64::max);
    log.headline("uniform: EW(1) / max", ratio_uniform, Relation::AtMost, 0.90, 0.0);
    log.headline("coin: max over j != 1 of EW(j) / max", worst_other, Relation::AtMost, 0.62, 0.0);
    let mut measured: Vec<(String, f64)> = inst.parameters().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    measured.push(("uniform_ratio_alt1".into(), ratio_uniform));
    measured.push(("coin_ratio_best_other".into(), worst_other));
    measured.push(("uniform_welfare_alt1_per_voter".into(), uniform[0] / 25_400.0));
    measured.push(("uniform_welfare_alt2_per_voter".into(), uniform[1] / 25_400.0));
    Ok(log.finish("thm6", measured, 0.9, 0.0, started))
}

/// Randomizing beats every deterministic choice in inverse distortion.
pub fn appendix_c(opts: &VerifyOptions) -> Result<VerificationResult> {
    let started = Instant::now();
    let mut log = CheckLog::new();
    let inst = appendix_c_instance(0.01)?;
    let m = inst.profile.m();
    let mut rules: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut p = vec![0.0; m];
            p[j] = 1.0;
            p
        })
        .collect();
    rules.push(vec![1.0 / m as f64; m]);
    let trials = opts.trials(100_000);
    let cfg = EstimationConfig::new(trials, opts.seed).with_workers(opts.workers);
    let reports = mc_expected_inverse_distortion_many(
        &inst.profile,
        &inst.distributions[0],
        &rules,
        &cfg,
        &InverseDistortionOptions::default(),
    )?;
    let uniform = &reports[m];
    let (best_j, best) = reports[..m]
        .iter()
        .enumerate()
        .map(|(j, r)| (j, r.mean))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    log.headline("best deterministic inverse distortion vs 10 x uniform rule", best, Relation::AtLeast, 10.0 * uniform.mean, 0.0);
    log.headline("uniform rule inverse distortion vs m", uniform.mean, Relation::AtMost, m as f64, 0.0);
    let measured = vec![
        ("trials".into(), trials as f64),
        ("best_deterministic_alternative".into(), (best_j + 1) as f64),
        ("best_deterministic_inverse_distortion".into(), best),
        ("uniform_rule_inverse_distortion".into(), uniform.mean),
        ("uniform_rule_std_err".into(), uniform.std_err),
        ("gap_factor".into(), best / uniform.mean),
        ("capped_trials".into(), reports.iter().map(|r| r.capped_trials).sum::<u64>() as f64),
    ];
    Ok(log.finish("appendixC", measured, 10.0, 0.0, started))
}
