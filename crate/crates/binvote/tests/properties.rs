use binvote::engine::{exact_expected_distortion, exact_expected_welfare, mc_expected_distortion};
use binvote::model::{draw_consistent_utilities, induced_profile, social_welfare};
use binvote::rules::{
    binomial_scores, ewmr_scores, majority_winner, quantile_scores, score_totals, score_winner, top_half_scores,
};
use binvote::verify::{random_discrete, random_profile};
use binvote::{
    Alternative, DistributionSpec, EstimationConfig, PreferenceProfile, RandomStream, Ranking, ScoreVector,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, max_n: usize, max_m: usize) -> (PreferenceProfile, DistributionSpec) {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let atoms = rng.gen_range(1..=4);
    (random_profile(&mut rng, n, m), random_discrete(&mut rng, atoms, 0.0))
}

fn permutation() -> impl Strategy<Value = Vec<u32>> {
    (1usize..=6).prop_flat_map(|m| Just((1..=m as u32).collect::<Vec<_>>()).prop_shuffle())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn drawn_utilities_are_consistent(seed in any::<u64>(), trial in 0u64..1000) {
        let (sigma, d) = instance(seed, 12, 6);
        let u = draw_consistent_utilities(&sigma, &d, &RandomStream::new(seed, trial));
        for (i, r) in sigma.rankings().iter().enumerate() {
            let values: Vec<f64> = r.order().iter().map(|&a| u.row(i)[a as usize - 1]).collect();
            prop_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        }
        // Welfare is the column sum.
        for j in 1..=sigma.m() {
            let alt = Alternative::new(j, sigma.m()).unwrap();
            let direct: f64 = (0..u.n()).map(|i| u.get(i, alt)).sum();
            prop_assert_eq!(social_welfare(&u, alt).unwrap(), direct);
        }
        // Distinct utilities induce the profile they were drawn for.
        let distinct = (0..u.n()).all(|i| {
            let mut row = u.row(i).to_vec();
            row.sort_by(f64::total_cmp);
            row.windows(2).all(|w| w[0] < w[1])
        });
        if distinct {
            prop_assert_eq!(induced_profile(&u), sigma);
        }
    }

    #[test]
    fn relabeling_permutes_totals(pi in permutation(), seed in any::<u64>(), n in 1usize..20) {
        let m = pi.len();
        let sigma = random_profile(&mut ChaCha8Rng::seed_from_u64(seed), n, m);
        let s = binomial_scores(m).unwrap();
        let before = score_totals(&sigma, &s).unwrap();
        let after = score_totals(&sigma.permute_alternatives(&pi), &s).unwrap();
        for j in 0..m {
            prop_assert_eq!(after[pi[j] as usize - 1], before[j]);
        }
    }

    #[test]
    fn affine_maps_keep_the_winner(
        raw in prop::collection::vec(0u32..20, 1..7),
        a in 1u32..5,
        b in 0u32..5,
        seed in any::<u64>(),
        n in 1usize..30,
    ) {
        // Small integers keep every total exact, so ties survive the map.
        let mut s: Vec<f64> = raw.iter().map(|&x| f64::from(x)).collect();
        s.sort_by(|x, y| y.total_cmp(x));
        s[0] += 1.0;
        let s = ScoreVector::new(s).unwrap();
        let sigma = random_profile(&mut ChaCha8Rng::seed_from_u64(seed), n, s.len());
        let mapped = s.affine(f64::from(a), f64::from(b)).unwrap();
        prop_assert_eq!(score_winner(&sigma, &s).unwrap(), score_winner(&sigma, &mapped).unwrap());
    }

    #[test]
    fn order_statistics_are_ordered_and_sum_to_the_mean(seed in any::<u64>(), m in 1usize..40) {
        let (_, d) = instance(seed, 1, 1);
        let e = d.order_stat_expectations(m).unwrap();
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        prop_assert!(e.iter().all(|&x| x >= d.support_min() - 1e-15 && x <= d.support_max() + 1e-15));
        let total: f64 = e.iter().sum();
        prop_assert!((total - m as f64 * d.mean()).abs() <= 1e-9 * m as f64);
    }

    #[test]
    fn perturbed_order_statistics_sum_to_the_mean(eps in 0.0f64..0.2, m in 1usize..12) {
        let d = DistributionSpec::perturbed(eps).unwrap();
        let e = d.order_stat_expectations(m).unwrap();
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((e.iter().sum::<f64>() - m as f64 * 0.5).abs() <= 1e-7);
    }

    #[test]
    fn quantiles_grow_with_p(seed in any::<u64>(), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let (_, d) = instance(seed, 1, 1);
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(d.largest_quantile(lo).unwrap() <= d.largest_quantile(hi).unwrap());
    }

    #[test]
    fn welfare_scores_stay_inside_the_support(seed in any::<u64>(), m in 1usize..30) {
        let (_, d) = instance(seed, 1, 1);
        prop_assume!(d.support_max() > 0.0);
        let s = ewmr_scores(&d, m).unwrap();
        prop_assert!(s.as_slice().iter().all(|&x| x >= d.support_min() - 1e-15 && x <= d.support_max() + 1e-15));
        prop_assert!(s.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn score_vectors_are_normalised(m in 1usize..200, p in 0.0f64..1.0) {
        for s in [binomial_scores(m).unwrap(), top_half_scores(m).unwrap()] {
            prop_assert!(s.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert!(s.as_slice().windows(2).all(|w| w[0] >= w[1]));
        }
        if let Ok(s) = quantile_scores(m, p) {
            prop_assert!(s.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn total_expected_welfare_is_n_m_mean(seed in any::<u64>()) {
        let (sigma, d) = instance(seed, 30, 8);
        let total: f64 = exact_expected_welfare(&sigma, &d).unwrap().iter().sum();
        let expected = (sigma.n() * sigma.m()) as f64 * d.mean();
        prop_assert!((total - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn exact_distortions_lie_in_unit_interval(seed in any::<u64>()) {
        let (sigma, d) = instance(seed, 3, 3);
        let dist = exact_expected_distortion(&sigma, &d.to_discrete().unwrap()).unwrap();
        prop_assert!(dist.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
        // Some alternative always reaches the maximum, so the best expected
        // distortion is at least 1/m.
        prop_assert!(dist.iter().copied().fold(0.0, f64::max) >= 1.0 / sigma.m() as f64 - 1e-12);
    }

    #[test]
    fn monte_carlo_ignores_worker_count(seed in any::<u64>(), workers in 2usize..5) {
        let (sigma, d) = instance(seed, 15, 5);
        let one = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(300, seed)).unwrap();
        let many = mc_expected_distortion(&sigma, &d, &EstimationConfig::new(300, seed).with_workers(workers)).unwrap();
        prop_assert_eq!(one.to_csv(), many.to_csv());
        prop_assert!(one.distortions().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn profile_text_round_trips(seed in any::<u64>()) {
        let (sigma, _) = instance(seed, 10, 7);
        prop_assert_eq!(PreferenceProfile::parse(&sigma.to_text()).unwrap(), sigma);
    }

    #[test]
    fn distribution_text_round_trips(seed in any::<u64>()) {
        let (_, d) = instance(seed, 1, 1);
        prop_assert_eq!(d.to_string().parse::<DistributionSpec>().unwrap(), d);
    }
}

#[test]
fn two_alternative_rules_agree_with_majority_on_every_profile() {
    for n in 1..=10usize {
        let binomial = binomial_scores(2).unwrap();
        let top_half = top_half_scores(2).unwrap();
        for mask in 0u32..(1 << n) {
            let orders = (0..n)
                .map(|i| if mask >> i & 1 == 1 { vec![1, 2] } else { vec![2, 1] })
                .collect();
            let sigma = PreferenceProfile::from_orders(orders).unwrap();
            let majority = majority_winner(&sigma).unwrap();
            assert_eq!(score_winner(&sigma, &binomial).unwrap(), majority, "n = {n}, mask = {mask:b}");
            assert_eq!(score_winner(&sigma, &top_half).unwrap(), majority, "n = {n}, mask = {mask:b}");
        }
    }
}

#[test]
fn majority_is_the_one_zero_scoring_rule() {
    let s = ScoreVector::new(vec![1.0, 0.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in 1..=100 {
        let sigma = random_profile(&mut rng, n, 2);
        assert_eq!(majority_winner(&sigma).unwrap(), score_winner(&sigma, &s).unwrap());
    }
}

#[test]
fn ranking_accessors_agree() {
    let r = Ranking::new(vec![3, 1, 2]).unwrap();
    for k in 1..=3 {
        assert_eq!(r.rank_of(r.at_rank(k)), k);
    }
}
