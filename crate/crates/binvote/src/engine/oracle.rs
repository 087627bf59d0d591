//! Exact expected distortion by enumerating every joint draw.

use std::collections::BTreeMap;

use crate::distributions::{DistributionSpec, FiniteDiscrete};
use crate::error::{Error, Result};
use crate::model::{Alternative, Electorate};

use super::{distortion_ratios, exact_expected_welfare, AlternativeEstimate, DistortionReport, Method};

/// Largest number of raw outcomes `|atoms|^(n·m)` the oracle will enumerate.
pub const ORACLE_LIMIT: f64 = 1e8;

/// Sorted outcomes of one voter's `m` draws, with their probabilities.
///
/// Ordered tuples are visited lexicographically by (slot, atom index) and
/// merged by their descending-sorted atom indices.
fn voter_outcomes(fd: &FiniteDiscrete, m: usize) -> Vec<(Vec<f64>, f64)> {
    let a = fd.len();
    let mut merged: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut tuple = vec![0usize; m];
    loop {
        let prob: f64 = tuple.iter().map(|&i| fd.probs()[i]).product();
        let mut key = tuple.clone();
        key.sort_unstable_by(|x, y| y.cmp(x));
        *merged.entry(key).or_insert(0.0) += prob;
        let mut slot = m;
        loop {
            if slot == 0 {
                return merged
                    .into_iter()
                    .map(|(key, p)| (key.iter().map(|&i| fd.atoms()[i]).collect(), p))
                    .collect();
            }
            slot -= 1;
            tuple[slot] += 1;
            if tuple[slot] < a {
                break;
            }
            tuple[slot] = 0;
        }
    }
}

/// Exact `E[dist(j, σ)]` for every alternative.
pub fn exact_expected_distortion<E: Electorate + ?Sized>(sigma: &E, d: &FiniteDiscrete) -> Result<Vec<f64>> {
    let m = sigma.num_alternatives();
    let n = sigma.num_voters();
    let required = (d.len() as f64).powf((n as f64) * m as f64);
    if required > ORACLE_LIMIT {
        return Err(Error::InstanceTooLarge {
            required,
            limit: ORACLE_LIMIT,
        });
    }
    let outcomes = voter_outcomes(d, m);
    let mut voters = Vec::with_capacity(n as usize);
    for g in 0..sigma.group_count() {
        let (ranking, count) = sigma.group(g);
        for _ in 0..count {
            voters.push(ranking.order());
        }
    }
    // levels[v] holds welfare after the first v voters.
    let mut levels = vec![vec![0.0; m]; voters.len() + 1];
    let mut choice = vec![0usize; voters.len()];
    let mut prob = vec![1.0; voters.len() + 1];
    let mut ratios = vec![0.0; m];
    let mut result = vec![0.0; m];
    let mut depth = 0;
    loop {
        if depth == voters.len() {
            distortion_ratios(&levels[depth], &mut ratios);
            for (r, x) in result.iter_mut().zip(&ratios) {
                *r += prob[depth] * x;
            }
            loop {
                if depth == 0 {
                    return Ok(result);
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < outcomes.len() {
                    break;
                }
                choice[depth] = 0;
            }
        }
        let (values, p) = &outcomes[choice[depth]];
        let (done, rest) = levels.split_at_mut(depth + 1);
        let next = &mut rest[0];
        next.copy_from_slice(&done[depth]);
        for (k, &alt) in voters[depth].iter().enumerate() {
            next[alt as usize - 1] += values[k];
        }
        prob[depth + 1] = prob[depth] * p;
        depth += 1;
    }
}

/// Exact expected distortion and welfare as a report.
pub fn exact_report<E: Electorate + ?Sized>(sigma: &E, d: &DistributionSpec) -> Result<DistortionReport> {
    let fd = d.to_discrete().ok_or_else(|| {
        Error::Precondition("exact distortion needs a distribution with finitely many atoms".into())
    })?;
    let distortion = exact_expected_distortion(sigma, &fd)?;
    let welfare = exact_expected_welfare(sigma, d)?;
    let estimates = distortion
        .iter()
        .zip(&welfare)
        .enumerate()
        .map(|(j, (&dist, &w))| AlternativeEstimate {
            alternative: Alternative::from_zero_based(j),
            expected_welfare: w,
            expected_distortion: dist,
            std_err_welfare: 0.0,
            std_err_distortion: 0.0,
            hoeffding95: 0.0,
        })
        .collect();
    Ok(DistortionReport {
        method: Method::Exact,
        trials: 0,
        voters: sigma.num_voters(),
        estimates,
        zero_welfare_trials: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{mc_expected_distortion, EstimationConfig};
    use crate::model::PreferenceProfile;
    use crate::rules::majority_winner;

    fn profile(orders: &[&[u32]]) -> PreferenceProfile {
        PreferenceProfile::from_orders(orders.iter().map(|o| o.to_vec()).collect()).unwrap()
    }

    fn fd(atoms: &[f64], probs: &[f64]) -> FiniteDiscrete {
        FiniteDiscrete::new(atoms.to_vec(), probs.to_vec()).unwrap()
    }

    #[test]
    fn outcome_table_is_a_distribution() {
        let d = fd(&[0.1, 0.5, 0.9], &[0.2, 0.3, 0.5]);
        let out = voter_outcomes(&d, 3);
        assert_eq!(out.len(), 10);
        let total: f64 = out.iter().map(|o| o.1).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(out.iter().all(|(v, _)| v.windows(2).all(|w| w[0] >= w[1])));
    }

    #[test]
    fn point_mass_all_ones() {
        let r = exact_expected_distortion(&profile(&[&[1, 2, 3], &[2, 3, 1]]), &fd(&[0.4], &[1.0])).unwrap();
        assert_eq!(r, vec![1.0; 3]);
    }

    #[test]
    fn two_atom_single_voter() {
        let r = exact_expected_distortion(&profile(&[&[1, 2]]), &fd(&[0.5, 1.0], &[0.5, 0.5])).unwrap();
        assert_eq!(r, vec![1.0, 0.75]);
    }

    #[test]
    fn majority_attains_maximum() {
        let sigma = profile(&[&[2, 1], &[1, 2], &[2, 1]]);
        let r = exact_expected_distortion(&sigma, &fd(&[0.2, 0.7], &[0.6, 0.4])).unwrap();
        let w = majority_winner(&sigma).unwrap();
        assert_eq!(r[w.zero_based()], r.iter().copied().fold(0.0, f64::max));
    }

    #[test]
    fn too_large_is_rejected() {
        let sigma = profile(&[&[1, 2, 3, 4], &[1, 2, 3, 4], &[1, 2, 3, 4], &[1, 2, 3, 4], &[1, 2, 3, 4], &[1, 2, 3, 4], &[1, 2, 3, 4]]);
        let err = exact_expected_distortion(&sigma, &fd(&[0.1, 0.9], &[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, Error::InstanceTooLarge { .. }));
    }

    #[test]
    fn scale_invariance() {
        let sigma = profile(&[&[1, 2, 3], &[3, 1, 2]]);
        let d = fd(&[0.1, 0.6, 1.0], &[0.3, 0.3, 0.4]);
        let base = exact_expected_distortion(&sigma, &d).unwrap();
        for c in [0.5, 0.01, 1e-9] {
            let scaled = exact_expected_distortion(&sigma, &d.scaled(c).unwrap()).unwrap();
            for (a, b) in base.iter().zip(&scaled) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees() {
        let sigma = profile(&[&[1, 2, 3], &[2, 3, 1], &[1, 3, 2]]);
        let d = DistributionSpec::discrete(vec![0.2, 1.0], vec![0.6, 0.4]).unwrap();
        let exact = exact_report(&sigma, &d).unwrap();
        let mc = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(40_000, 12)).unwrap();
        for (e, m) in exact.estimates.iter().zip(&mc.estimates) {
            assert!((e.expected_distortion - m.expected_distortion).abs() <= 4.0 * m.std_err_distortion + 1e-12);
            assert!((e.expected_welfare - m.expected_welfare).abs() <= 4.0 * m.std_err_welfare + 1e-12);
        }
    }
}
