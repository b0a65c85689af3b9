use fairbandit_core::{teammate_reward, ArmDistribution, StreamRng, TeammateScore};
use proptest::prelude::*;

fn any_distribution() -> impl Strategy<Value = ArmDistribution> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|p| ArmDistribution::Bernoulli { p }),
        (-5.0f64..5.0, 0.0f64..5.0)
            .prop_map(|(mean, stddev)| ArmDistribution::ClippedGaussian { mean, stddev }),
        (-3.0f64..3.0).prop_map(|value| ArmDistribution::Fixed { value }),
    ]
}

proptest! {
    #[test]
    fn samples_stay_in_unit_interval(dist in any_distribution(), seed: u64) {
        let mut rng = StreamRng::new(seed, 0);
        for _ in 0..200 {
            let r = dist.sample(&mut rng);
            prop_assert!((0.0..=1.0).contains(&r), "{:?} -> {}", dist, r);
        }
        let m = dist.expected_value();
        prop_assert!((0.0..=1.0).contains(&m));
    }

    #[test]
    fn teammate_reward_is_monotone(s1 in 0.0f64..5000.0, ds in 0.0f64..5000.0,
                                   n1 in 1u64..40, dn in 0u64..40) {
        let r = |s, n| teammate_reward(&TeammateScore::new(s, n)).unwrap();
        let base = r(s1, n1);
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(r(s1 + ds, n1) >= base);
        prop_assert!(r(s1, n1 + dn) <= base);
    }
}

#[test]
fn empirical_means_match_expected_values() {
    let dists = [
        ArmDistribution::Bernoulli { p: 0.3 },
        ArmDistribution::Bernoulli { p: 0.9 },
        ArmDistribution::ClippedGaussian { mean: 0.5, stddev: 0.2 },
        ArmDistribution::ClippedGaussian { mean: 0.9, stddev: 0.4 },
        ArmDistribution::ClippedGaussian { mean: -0.1, stddev: 0.6 },
        ArmDistribution::Fixed { value: 0.42 },
    ];
    let n = 100_000;
    for (i, d) in dists.iter().enumerate() {
        let mut rng = StreamRng::new(2024, i as u64);
        let samples: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sigma = (var / n as f64).sqrt();
        let err = (mean - d.expected_value()).abs();
        assert!(err <= 4.0 * sigma + 1e-9, "{d:?}: mean {mean} expected {} (sigma {sigma})", d.expected_value());
    }
}
