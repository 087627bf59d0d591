//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::time::{Duration, Instant};

use binvote::constructions::{thm2_instance, thm4_instance, thm6_instance};
use binvote::engine::{exact_expected_welfare, mc_expected_distortion};
use binvote::model::Electorate;
use binvote::verify::{self, random_profile, VerificationResult, VerifyOptions};
use binvote::{Alternative, EstimationConfig, GroupedProfile, RankHistogram};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_verify(r: VerificationResult, limit: Option<Duration>) -> Outcome {
    let mut detail = r.summary();
    let mut passed = r.passed;
    for (k, v) in &r.measured {
        detail.push_str(&format!("; {k} = {v}"));
    }
    if let Some(limit) = limit {
        let within = r.runtime <= limit;
        detail.push_str(&format!("; runtime {:.2}s (limit {}s)", r.runtime.as_secs_f64(), limit.as_secs()));
        passed &= within;
    }
    Outcome { passed, detail }
}

fn run_verify(id: &str, limit: Option<Duration>) -> Outcome {
    match verify::run(id, &VerifyOptions::new(SEED)) {
        Ok(r) => from_verify(r, limit),
        Err(e) => Outcome {
            passed: false,
            detail: format!("{id} errored: {e}"),
        },
    }
}

fn mins(n: u64) -> Option<Duration> {
    Some(Duration::from_secs(60 * n))
}

/// Closed-form welfare from the rank histogram, with per-rank values
/// `value[k - 1]` for rank `k`. Independent of the engine's code path.
fn closed_form_welfare(h: &RankHistogram, m: usize, value: impl Fn(usize) -> f64) -> Vec<f64> {
    (1..=m)
        .map(|j| {
            let alt = Alternative::new(j, m).unwrap();
            (1..=m).map(|k| h.count(alt, k) as f64 * value(k)).sum()
        })
        .collect()
}

/// `E[X_(m+1-k)]` under Bernoulli(p) is `P(Bin(m, p) ≥ k)`.
fn bernoulli_rank_value(m: usize, p: f64) -> impl Fn(usize) -> f64 {
    let b = Binomial::new(p, m as u64).unwrap();
    move |k| if k == 0 { 1.0 } else { b.sf(k as u64 - 1) }
}

fn agree(a: &[f64], b: &[f64], scale: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * scale)
}

fn ratio_to_max(w: &[f64], j: usize) -> f64 {
    w[j] / w.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_11() -> Outcome {
    let started = Instant::now();
    let inst = thm4_instance(0.4).unwrap();
    let (m, n) = (inst.profile.m(), inst.profile.n() as f64);
    let h = inst.profile.histogram();
    let mut detail = String::new();
    let mut passed = true;
    let mut ratios = Vec::new();
    for (i, d) in inst.distributions.iter().enumerate() {
        let engine = exact_expected_welfare(&inst.profile, d).unwrap();
        let oracle = closed_form_welfare(&h, m, bernoulli_rank_value(m, d.mean()));
        let ok = agree(&engine, &oracle, n);
        passed &= ok;
        detail.push_str(&format!("oracle agreement d{} = {ok}; ", i + 1));
        ratios.push(oracle);
    }
    let low = ratio_to_max(&ratios[0], 0);
    let high = (1..m).map(|j| ratio_to_max(&ratios[1], j)).fold(0.0, f64::max);
    passed &= low <= 0.4 && high <= 0.4;
    let secs = started.elapsed().as_secs_f64();
    passed &= secs < 60.0;
    detail.push_str(&format!(
        "alt 1 under Bernoulli(mu - delta): {low:.4} <= 0.4; best other under Bernoulli(mu): {high:.4} <= 0.4; runtime {secs:.2}s"
    ));
    Outcome { passed, detail }
}

fn criterion_12() -> Outcome {
    let inst = thm6_instance(256, 254 * 100).unwrap();
    let (m, n) = (inst.profile.m(), inst.profile.n() as f64);
    let h = inst.profile.histogram();
    let uniform = closed_form_welfare(&h, m, |k| (m + 1 - k) as f64 / (m + 1) as f64);
    let coin = closed_form_welfare(&h, m, bernoulli_rank_value(m, 0.5));
    let engine_u = exact_expected_welfare(&inst.profile, &inst.distributions[0]).unwrap();
    let engine_c = exact_expected_welfare(&inst.profile, &inst.distributions[1]).unwrap();
    let oracle_ok = agree(&engine_u, &uniform, n) && agree(&engine_c, &coin, n);
    let r_uniform = ratio_to_max(&uniform, 0);
    let r_coin = (1..m).map(|j| ratio_to_max(&coin, j)).fold(0.0, f64::max);
    Outcome {
        passed: oracle_ok && r_uniform <= 0.90 && r_coin <= 0.62,
        detail: format!(
            "oracle agreement = {oracle_ok}; uniform ratio(alt 1)/max = {r_uniform:.4} (needs <= 0.90); \
             coin max_(j != 1) ratio = {r_coin:.4} (needs <= 0.62); uniform welfare per voter: alt 1 = {:.4}, alt 2 = {:.4}",
            uniform[0] / n,
            uniform[1] / n
        ),
    }
}

fn criterion_18() -> Outcome {
    let mut passed = true;
    let mut detail = String::new();
    let inst = thm2_instance(26, 100_000).unwrap();
    let culture = GroupedProfile::from(&random_profile(&mut ChaCha8Rng::seed_from_u64(SEED), 2000, 8));
    let cases: [(&str, &GroupedProfile, binvote::DistributionSpec, u64); 2] = [
        ("thm2 m=26 n=1e5", &inst.profile, inst.distributions[0].clone(), 300),
        ("impartial culture n=2000 m=8 uniform", &culture, binvote::DistributionSpec::Uniform01, 600),
    ];
    for (label, sigma, d, trials) in cases {
        let csv: Vec<String> = [1, 4, 8]
            .iter()
            .map(|&w| {
                mc_expected_distortion(sigma, &d, &EstimationConfig::new(trials, SEED).with_workers(w))
                    .unwrap()
                    .to_csv()
            })
            .collect();
        let same = csv.iter().all(|c| c == &csv[0]);
        passed &= same;
        detail.push_str(&format!("{label}: identical CSV across workers 1/4/8 = {same}; "));
    }
    let big = thm2_instance(32, 1_000_000).unwrap();
    let trials = 3;
    let started = Instant::now();
    mc_expected_distortion(&big.profile, &binvote::DistributionSpec::Uniform01, &EstimationConfig::new(trials, SEED)).unwrap();
    let rate = (trials * 32 * 1_000_000) as f64 / started.elapsed().as_secs_f64();
    passed &= rate >= 1e7;
    detail.push_str(&format!("single-thread throughput at n=1e6, m=32: {rate:.3e} draws/s (target 1e7)"));
    Outcome { passed, detail }
}

type Criterion = (u32, &'static str, Box<dyn Fn() -> Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "majority optimal for two alternatives", Box::new(|| run_verify("thm1", mins(2)))),
        (2, "welfare argmax equals order-statistic scoring", Box::new(|| run_verify("ewmr-equivalence", None))),
        (3, "binomial voting nu/2", Box::new(|| run_verify("thm7-binomial", mins(1)))),
        (4, "top-half approval 1/3 for symmetric d", Box::new(|| run_verify("thm5", None))),
        (5, "quantile rules (1-p)Q", Box::new(|| run_verify("cor-quantile", None))),
        (6, "generalized binomial beta and score lower bound", Box::new(|| run_verify("thm-genbinomial", None))),
        (7, "generalized binomial limit 2/T", Box::new(|| run_verify("cor-limit", None))),
        (8, "plurality max(1/n, 1/m)", Box::new(|| run_verify("appendixM-plurality", None))),
        (9, "welfare winner distortion at least the mean", Box::new(|| run_verify("appendixF-mu", None))),
        (10, "welfare/distortion separation at m=32, n=1e6", Box::new(|| run_verify("thm2", mins(10)))),
        (11, "no 0.4-approximation for both Bernoulli laws", Box::new(criterion_11)),
        (12, "uniform versus coin at m=256", Box::new(criterion_12)),
        (13, "randomization gap in inverse distortion", Box::new(|| run_verify("appendixC", None))),
        (14, "sampling-based distortion winner", Box::new(|| run_verify("appendixK-sampling", None))),
        (15, "Borda near uniform", Box::new(|| run_verify("appendixL-borda-tv", None))),
        (16, "deterministic dominates randomized", Box::new(|| run_verify("appendixA", None))),
        (17, "welfare winner ratio trend in n", Box::new(|| run_verify("thm3-trend", None))),
        (18, "determinism across workers and throughput", Box::new(criterion_18)),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in &criteria {
        let out = check();
        println!(
            "criterion {id:>2} {}: {name}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        );
        if !out.passed {
            failed.push(*id);
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
