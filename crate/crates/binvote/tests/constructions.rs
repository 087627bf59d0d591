use binvote::constructions::{
    appendix_c_instance, construct, latin_square_profile, thm2_instance, thm4_instance, thm4_instance_at_rank,
    thm6_instance, BoundKind,
};
use binvote::engine::exact_expected_welfare;
use binvote::model::Electorate;
use binvote::rules::{binomial_scores, score_totals};
use binvote::Alternative;

fn ratio(w: &[f64], j: usize) -> f64 {
    w[j] / w.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn best_other(w: &[f64]) -> f64 {
    (1..w.len()).map(|j| ratio(w, j)).fold(0.0, f64::max)
}

// The uniform side of the separation needs ln(m)/sqrt(m) small; at m = 256
// alternative 1 is still the welfare maximiser. These pin what the instance
// actually gives.
#[test]
fn thm6_at_256_observed_ratios() {
    let inst = thm6_instance(256, 254 * 100).unwrap();
    let uniform = exact_expected_welfare(&inst.profile, &inst.distributions[0]).unwrap();
    let coin = exact_expected_welfare(&inst.profile, &inst.distributions[1]).unwrap();
    assert!((ratio(&uniform, 0) - 1.0).abs() <= 0.02, "{}", ratio(&uniform, 0));
    assert!((best_other(&coin) - 0.58).abs() <= 0.02, "{}", best_other(&coin));
}

#[test]
fn thm6_separates_once_m_is_large() {
    let m = 2048;
    let inst = thm6_instance(m, (m as u64 - 2) * 100).unwrap();
    let uniform = exact_expected_welfare(&inst.profile, &inst.distributions[0]).unwrap();
    let coin = exact_expected_welfare(&inst.profile, &inst.distributions[1]).unwrap();
    assert!(ratio(&uniform, 0) < 0.9, "{}", ratio(&uniform, 0));
    assert!(best_other(&coin) < 0.9, "{}", best_other(&coin));
}

#[test]
fn thm4_midpoint_rank_separates_but_nominal_rank_does_not() {
    let inst = thm4_instance(0.4).unwrap();
    let low = exact_expected_welfare(&inst.profile, &inst.distributions[0]).unwrap();
    let high = exact_expected_welfare(&inst.profile, &inst.distributions[1]).unwrap();
    assert!(ratio(&low, 0) <= 0.4 && best_other(&high) <= 0.4);

    let nominal = thm4_instance_at_rank(0.4, 60).unwrap();
    let low = exact_expected_welfare(&nominal.profile, &nominal.distributions[0]).unwrap();
    assert_eq!(ratio(&low, 0), 1.0);
}

#[test]
fn thm4_welfare_two_ways() {
    // Per-rank values from binomial tails against order-statistic means.
    let inst = thm4_instance(0.4).unwrap();
    let m = inst.profile.m();
    for d in &inst.distributions {
        let e = d.order_stat_expectations(m).unwrap();
        let tails = binvote::binomial::upper_tails(m, d.mean());
        for k in 1..=m {
            assert!((e[m - k] - tails[k]).abs() <= 1e-9, "k = {k}");
        }
    }
}

#[test]
fn thm2_first_alternative_wins_on_welfare_but_not_on_scores() {
    let inst = thm2_instance(32, 1_000_000).unwrap();
    assert_eq!(inst.bound_kind, BoundKind::DistortionRatio);
    assert_eq!(inst.claimed_bound, 0.5);
    let w = exact_expected_welfare(&inst.profile, &inst.distributions[0]).unwrap();
    assert_eq!(ratio(&w, 0), 1.0);
    // A distribution-independent rule prefers the alternative always ranked second.
    let totals = score_totals(&inst.profile, &binomial_scores(32).unwrap()).unwrap();
    assert_eq!(ratio(&totals, 1), 1.0);
}

#[test]
fn appendix_c_instance_shape() {
    let inst = appendix_c_instance(0.01).unwrap();
    assert_eq!((inst.profile.m(), inst.profile.n()), (100, 100));
    assert_eq!(inst.bound_kind, BoundKind::InverseDistortionGap);
    let h = inst.profile.histogram();
    for j in 1..=100 {
        for k in 1..=100 {
            assert_eq!(h.count(Alternative::new(j, 100).unwrap(), k), 1);
        }
    }
    assert!(inst.distributions[0].support_min() > 0.0);
    assert_eq!(latin_square_profile(100, 100).unwrap().histogram(), h);
}

#[test]
fn construct_rejects_bad_parameters() {
    assert!(construct("thm2", &[("m".into(), 5.0), ("n".into(), 100.0)]).is_err());
    assert!(construct("thm6", &[("m".into(), 255.0), ("n".into(), 100.0)]).is_err());
    assert!(construct("appendixC", &[("eps".into(), 2.0)]).is_err());
    assert!(construct("thm4", &[]).is_err());
    assert!(construct("nonsense", &[]).is_err());
}

#[test]
fn manifests_are_reproducible() {
    let a = construct("thm4", &[("alpha".into(), 0.4)]).unwrap().manifest();
    let b = thm4_instance(0.4).unwrap().manifest();
    assert_eq!(a, b);
    assert!(a.contains("nominal_rank = 60"));
}
