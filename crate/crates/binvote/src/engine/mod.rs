//! Expected welfare and expected distortion, exact and by Monte Carlo.

mod monte_carlo;
mod oracle;

use std::fmt;
use std::io::{self, Write};

pub use monte_carlo::trial_welfares;
pub use oracle::{exact_expected_distortion, exact_report, ORACLE_LIMIT};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::model::{Alternative, Electorate, RankHistogram};
use crate::rules::{argmax, check_probabilities};

/// Monte Carlo settings. Results depend on `trials` and `master_seed` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimationConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub workers: usize,
}

impl EstimationConfig {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        EstimationConfig {
            trials,
            master_seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Precondition("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// 95% Hoeffding radius for the mean of `trials` values in `[0, 1]`.
pub fn hoeffding95(trials: u64) -> f64 {
    ((2.0f64 / 0.05).ln() / (2.0 * trials as f64)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlternativeEstimate {
    pub alternative: Alternative,
    pub expected_welfare: f64,
    pub expected_distortion: f64,
    pub std_err_welfare: f64,
    pub std_err_distortion: f64,
    pub hoeffding95: f64,
}

/// Per-alternative expected welfare and distortion.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub method: Method,
    pub trials: u64,
    pub voters: u64,
    pub estimates: Vec<AlternativeEstimate>,
    /// Trials in which every welfare was zero; each ratio was taken as 1.
    pub zero_welfare_trials: u64,
}

impl DistortionReport {
    pub fn distortions(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.expected_distortion).collect()
    }

    pub fn welfares(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.expected_welfare).collect()
    }

    pub fn get(&self, j: Alternative) -> &AlternativeEstimate {
        &self.estimates[j.zero_based()]
    }

    pub const CSV_HEADER: &'static str =
        "alternative,method,est_expected_welfare,est_expected_distortion,std_err,hoeffding95,trials";

    /// One row per alternative; `std_err` is that of the distortion estimate.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for e in &self.estimates {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.alternative,
                self.method,
                e.expected_welfare,
                e.expected_distortion,
                e.std_err_distortion,
                e.hoeffding95,
                self.trials
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("ascii")
    }
}

/// Running mean and variance, updated in a fixed order.
#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn std_err(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

/// Ratio `SW(j)/max_k SW(k)` for every `j`; all ones when the maximum is zero.
pub fn distortion_ratios(sw: &[f64], out: &mut [f64]) -> bool {
    let max = sw.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for (o, s) in out.iter_mut().zip(sw) {
            *o = s / max;
        }
        false
    } else {
        out.fill(1.0);
        true
    }
}

/// Monte Carlo estimate of `E[dist(j, σ)]` and `E[SW(j, σ)]` for every `j`.
pub fn mc_expected_distortion<E: Electorate + ?Sized>(
    sigma: &E,
    d: &DistributionSpec,
    cfg: &EstimationConfig,
) -> Result<DistortionReport> {
    let m = sigma.num_alternatives();
    let mut welfare = vec![Welford::default(); m];
    let mut ratio = vec![Welford::default(); m];
    let mut ratios = vec![0.0; m];
    let mut zero_welfare_trials = 0;
    monte_carlo::for_each_trial(sigma, d, cfg, |sw| {
        if distortion_ratios(sw, &mut ratios) {
            zero_welfare_trials += 1;
        }
        for j in 0..m {
            welfare[j].push(sw[j]);
            ratio[j].push(ratios[j]);
        }
    })?;
    let radius = hoeffding95(cfg.trials);
    let estimates = (0..m)
        .map(|j| AlternativeEstimate {
            alternative: Alternative::from_zero_based(j),
            expected_welfare: welfare[j].mean,
            expected_distortion: ratio[j].mean,
            std_err_welfare: welfare[j].std_err(),
            std_err_distortion: ratio[j].std_err(),
            hoeffding95: radius,
        })
        .collect();
    Ok(DistortionReport {
        method: Method::MonteCarlo,
        trials: cfg.trials,
        voters: sigma.num_voters(),
        estimates,
        zero_welfare_trials,
    })
}

/// Same simulation as [`mc_expected_distortion`]; the welfare columns are
/// the quantity of interest.
pub fn mc_expected_welfare<E: Electorate + ?Sized>(
    sigma: &E,
    d: &DistributionSpec,
    cfg: &EstimationConfig,
) -> Result<DistortionReport> {
    mc_expected_distortion(sigma, d, cfg)
}

/// `Σ_k count[j][k] · E[X_(m+1−k)]` for every alternative.
pub fn exact_expected_welfare_histogram(h: &RankHistogram, d: &DistributionSpec) -> Result<Vec<f64>> {
    let e = d.order_stat_expectations(h.m())?;
    let per_rank: Vec<f64> = e.into_iter().rev().collect();
    h.weighted_totals(&per_rank)
}

/// Exact `E[SW(j, σ)]` by linearity over the order statistics.
pub fn exact_expected_welfare<E: Electorate + ?Sized>(sigma: &E, d: &DistributionSpec) -> Result<Vec<f64>> {
    exact_expected_welfare_histogram(&sigma.histogram(), d)
}

/// Alternative with the largest expected distortion.
pub fn edmr_winner(report: &DistortionReport) -> Alternative {
    argmax(&report.distortions())
}

/// Alternative with the largest expected welfare.
pub fn ewmr_winner(values: &[f64]) -> Alternative {
    argmax(values)
}

/// Batches used by the sampling-based rule: `⌈2 ln(2m/δ) / (μ² ε²)⌉`.
pub fn sampling_batches(m: usize, mean: f64, eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition("eps and delta must lie in (0, 1)".into()));
    }
    if mean <= 0.0 {
        return Err(Error::Precondition("distribution has zero mean".into()));
    }
    Ok((2.0 * (2.0 * m as f64 / delta).ln() / (mean * mean * eps * eps)).ceil() as u64)
}

/// Picks the alternative with the best mean sample distortion.
pub fn sample_based_edmr<E: Electorate + ?Sized>(
    sigma: &E,
    d: &DistributionSpec,
    eps: f64,
    delta: f64,
    master_seed: u64,
) -> Result<(Alternative, u64)> {
    let t = sampling_batches(sigma.num_alternatives(), d.mean(), eps, delta)?;
    let report = mc_expected_distortion(sigma, d, &EstimationConfig::new(t, master_seed))?;
    Ok((edmr_winner(&report), t))
}

/// `Σ_j probs_j · values_j` for a randomized rule.
pub fn randomized_rule_expected_distortion(values: &[f64], probs: &[f64]) -> Result<f64> {
    if values.len() != probs.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            found: probs.len(),
        });
    }
    check_probabilities(probs)?;
    Ok(values.iter().zip(probs).map(|(v, p)| v * p).sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseDistortionOptions {
    /// Ceiling applied to each trial's ratio.
    pub cap: f64,
    /// Accept distributions with mass near zero, whose estimate may be heavy tailed.
    pub allow_heavy_tail: bool,
}

impl Default for InverseDistortionOptions {
    fn default() -> Self {
        InverseDistortionOptions {
            cap: 1e12,
            allow_heavy_tail: false,
        }
    }
}

/// Estimate of `E[max_j SW(j) / Σ_j probs_j SW(j)]`.
///
/// The true expectation can be infinite when utilities can be arbitrarily
/// close to zero, in which case the sample mean never settles. Check
/// `capped_trials` and `max_observed` before trusting `mean`.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseDistortionReport {
    pub mean: f64,
    pub std_err: f64,
    pub max_observed: f64,
    pub capped_trials: u64,
    pub trials: u64,
}

/// Inverse distortion of one randomized (or one-hot) rule.
pub fn mc_expected_inverse_distortion<E: Electorate + ?Sized>(
    sigma: &E,
    d: &DistributionSpec,
    probs: &[f64],
    cfg: &EstimationConfig,
    opts: &InverseDistortionOptions,
) -> Result<InverseDistortionReport> {
    let mut all = mc_expected_inverse_distortion_many(sigma, d, &[probs.to_vec()], cfg, opts)?;
    Ok(all.remove(0))
}

/// Inverse distortion of several rules from the same draws.
pub fn mc_expected_inverse_distortion_many<E: Electorate + ?Sized>(
    sigma: &E,
    d: &DistributionSpec,
    rules: &[Vec<f64>],
    cfg: &EstimationConfig,
    opts: &InverseDistortionOptions,
) -> Result<Vec<InverseDistortionReport>> {
    if d.support_min() <= 0.0 && !opts.allow_heavy_tail {
        return Err(Error::Precondition(
            "distribution reaches zero; the inverse distortion may have infinite mean \
             (set allow_heavy_tail to estimate anyway)"
                .into(),
        ));
    }
    for probs in rules {
        if probs.len() != sigma.num_alternatives() {
            return Err(Error::LengthMismatch {
                expected: sigma.num_alternatives(),
                found: probs.len(),
            });
        }
        check_probabilities(probs)?;
    }
    let mut stats = vec![Welford::default(); rules.len()];
    let mut max_observed = vec![0.0f64; rules.len()];
    let mut capped = vec![0u64; rules.len()];
    monte_carlo::for_each_trial(sigma, d, cfg, |sw| {
        let max = sw.iter().copied().fold(0.0, f64::max);
        for (r, probs) in rules.iter().enumerate() {
            let chosen: f64 = probs.iter().zip(sw).map(|(p, s)| p * s).sum();
            let mut ratio = if max == 0.0 { 1.0 } else { max / chosen };
            if ratio.is_nan() || ratio > opts.cap {
                ratio = opts.cap;
                capped[r] += 1;
            }
            stats[r].push(ratio);
            max_observed[r] = max_observed[r].max(ratio);
        }
    })?;
    Ok((0..rules.len())
        .map(|r| InverseDistortionReport {
            mean: stats[r].mean,
            std_err: stats[r].std_err(),
            max_observed: max_observed[r],
            capped_trials: capped[r],
            trials: cfg.trials,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{draw_consistent_utilities, social_welfare, GroupedProfile, PreferenceProfile, Ranking};
    use crate::rng::RandomStream;

    fn profile(orders: &[&[u32]]) -> PreferenceProfile {
        PreferenceProfile::from_orders(orders.iter().map(|o| o.to_vec()).collect()).unwrap()
    }

    fn two_atom() -> DistributionSpec {
        DistributionSpec::discrete(vec![0.5, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn point_mass_is_exactly_one() {
        let sigma = profile(&[&[1, 2, 3], &[3, 2, 1]]);
        let d = DistributionSpec::point_mass(0.6).unwrap();
        let r = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(50, 1)).unwrap();
        assert!(r.distortions().iter().all(|&x| x == 1.0));
        assert!(r.welfares().iter().all(|&x| (x - 1.2).abs() < 1e-15));
    }

    #[test]
    fn two_atom_single_voter() {
        let sigma = profile(&[&[1, 2]]);
        let r = mc_expected_distortion(&sigma, &two_atom(), &EstimationConfig::new(100_000, 9)).unwrap();
        let first = r.get(Alternative::from_zero_based(0));
        let second = r.get(Alternative::from_zero_based(1));
        assert_eq!(first.expected_distortion, 1.0);
        assert!((second.expected_distortion - 0.75).abs() < 3.0 * second.std_err_distortion);
    }

    #[test]
    fn uniform_single_voter_welfare() {
        let sigma = profile(&[&[1, 2, 3]]);
        let r = mc_expected_welfare(&sigma, &DistributionSpec::Uniform01, &EstimationConfig::new(50_000, 2)).unwrap();
        let e = r.get(Alternative::from_zero_based(0));
        assert!((e.expected_welfare - 0.75).abs() < 4.0 * e.std_err_welfare);
    }

    #[test]
    fn exact_welfare_examples() {
        let w = exact_expected_welfare(&profile(&[&[1, 2, 3]]), &DistributionSpec::Uniform01).unwrap();
        assert_eq!(w, vec![0.75, 0.5, 0.25]);
        let b = DistributionSpec::bernoulli(0.5).unwrap();
        let w = exact_expected_welfare(&profile(&[&[1, 2], &[1, 2]]), &b).unwrap();
        assert!((w[0] - 1.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trial_welfare_matches_materialized_draws() {
        let sigma = profile(&[&[1, 2, 3, 4], &[4, 2, 3, 1], &[1, 2, 3, 4]]);
        let grouped = GroupedProfile::new(vec![
            (Ranking::new(vec![1, 2, 3, 4]).unwrap(), 1),
            (Ranking::new(vec![4, 2, 3, 1]).unwrap(), 1),
            (Ranking::new(vec![1, 2, 3, 4]).unwrap(), 1),
        ])
        .unwrap();
        for d in [
            DistributionSpec::Uniform01,
            DistributionSpec::perturbed(0.3).unwrap(),
            DistributionSpec::discrete(vec![0.1, 0.4, 0.9], vec![0.3, 0.3, 0.4]).unwrap(),
            DistributionSpec::bernoulli(0.4).unwrap(),
        ] {
            let cfg = EstimationConfig::new(5, 77);
            let sims = trial_welfares(&sigma, &d, &cfg).unwrap();
            assert_eq!(sims, trial_welfares(&grouped, &d, &cfg).unwrap());
            for (t, sw) in sims.iter().enumerate() {
                let u = draw_consistent_utilities(&sigma, &d, &RandomStream::new(77, t as u64));
                for (j, got) in sw.iter().enumerate() {
                    let want = social_welfare(&u, Alternative::from_zero_based(j)).unwrap();
                    assert!((got - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn workers_do_not_change_results() {
        let sigma = profile(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2], &[1, 3, 2]]);
        let d = DistributionSpec::discrete(vec![0.2, 1.0], vec![0.7, 0.3]).unwrap();
        let base = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(700, 3)).unwrap();
        for w in [2, 4, 8] {
            let other = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(700, 3).with_workers(w)).unwrap();
            assert_eq!(base.to_csv(), other.to_csv());
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let sigma = profile(&[&[1, 2]]);
        assert!(mc_expected_distortion(&sigma, &two_atom(), &EstimationConfig::new(0, 1)).is_err());
    }

    #[test]
    fn zero_welfare_convention_is_flagged() {
        let sigma = profile(&[&[1, 2]]);
        let d = DistributionSpec::point_mass(0.0).unwrap();
        let r = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(10, 1)).unwrap();
        assert_eq!(r.zero_welfare_trials, 10);
        assert!(r.distortions().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn winners() {
        assert_eq!(ewmr_winner(&[0.2, 0.9, 0.9]).index(), 2);
        assert_eq!(ewmr_winner(&[0.4]).index(), 1);
    }

    #[test]
    fn sampling_batch_count() {
        assert_eq!(sampling_batches(5, 0.5, 0.2, 0.1).unwrap(), 922);
        assert!(sampling_batches(5, 0.0, 0.2, 0.1).is_err());
        let sigma = profile(&[&[1, 2, 3], &[2, 1, 3]]);
        let d = DistributionSpec::point_mass(0.5).unwrap();
        let (w, t) = sample_based_edmr(&sigma, &d, 0.5, 0.5, 4).unwrap();
        assert_eq!(w.index(), 1);
        assert_eq!(t, sampling_batches(3, 0.5, 0.5, 0.5).unwrap());
    }

    #[test]
    fn randomized_combination() {
        assert_eq!(randomized_rule_expected_distortion(&[0.2, 0.4, 0.6], &[0.0, 1.0, 0.0]).unwrap(), 0.4);
        let avg = randomized_rule_expected_distortion(&[0.2, 0.4, 0.6], &[1.0 / 3.0; 3]).unwrap();
        assert!((avg - 0.4).abs() < 1e-15);
        assert!(randomized_rule_expected_distortion(&[0.2, 0.4], &[0.5, 0.6]).is_err());
    }

    #[test]
    fn inverse_distortion_trivial_cases() {
        let sigma = profile(&[&[1, 2, 3], &[1, 3, 2]]);
        let cfg = EstimationConfig::new(200, 5);
        let pm = DistributionSpec::point_mass(0.3).unwrap();
        let r = mc_expected_inverse_distortion(&sigma, &pm, &[0.2, 0.3, 0.5], &cfg, &Default::default()).unwrap();
        assert_eq!(r.mean, 1.0);
        let d = DistributionSpec::discrete(vec![0.1, 0.9], vec![0.5, 0.5]).unwrap();
        let r = mc_expected_inverse_distortion(&sigma, &d, &[1.0, 0.0, 0.0], &cfg, &Default::default()).unwrap();
        assert_eq!(r.mean, 1.0);
        assert!(mc_expected_inverse_distortion(
            &sigma,
            &DistributionSpec::Uniform01,
            &[1.0, 0.0, 0.0],
            &cfg,
            &Default::default()
        )
        .is_err());
    }

    #[test]
    fn inverse_distortion_cap_counts() {
        let sigma = profile(&[&[1, 2]]);
        let d = DistributionSpec::discrete(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let opts = InverseDistortionOptions {
            cap: 1e6,
            allow_heavy_tail: true,
        };
        let r = mc_expected_inverse_distortion(&sigma, &d, &[0.0, 1.0], &EstimationConfig::new(400, 1), &opts).unwrap();
        assert!(r.capped_trials > 0);
        assert_eq!(r.max_observed, 1e6);
    }

    #[test]
    fn csv_layout() {
        let sigma = profile(&[&[1, 2]]);
        let d = DistributionSpec::point_mass(1.0).unwrap();
        let csv = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(4, 1)).unwrap().to_csv();
        let h = hoeffding95(4);
        assert_eq!(
            csv,
            format!(
                "{}\n1,monte-carlo,1,1,0,{h},4\n2,monte-carlo,1,1,0,{h},4\n",
                DistortionReport::CSV_HEADER
            )
        );
    }
}
