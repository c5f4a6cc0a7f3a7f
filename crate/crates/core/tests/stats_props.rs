use proptest::prelude::*;

use cost_minimax::stats::{wilcoxon_exact_p, wilcoxon_signed_rank, PMethod, PairedSample};

fn sample_pair(n: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(|n| {
        (
            proptest::collection::vec(prop_oneof![(0i32..6).prop_map(f64::from), -50.0..50.0f64], n),
            proptest::collection::vec(prop_oneof![(0i32..6).prop_map(f64::from), -50.0..50.0f64], n),
        )
    })
}

proptest! {
    #[test]
    fn swapping_samples_mirrors_the_statistic((a, b) in sample_pair(1..40)) {
        let x = wilcoxon_signed_rank(&PairedSample::new(a.clone(), b.clone()).unwrap());
        let y = wilcoxon_signed_rank(&PairedSample::new(b, a).unwrap());
        let n = x.n_effective as f64;
        prop_assert_eq!(x.n_effective, y.n_effective);
        prop_assert_eq!(x.w_plus + y.w_plus, n * (n + 1.0) / 2.0);
        prop_assert!((x.p_two_sided - y.p_two_sided).abs() < 1e-12);
        prop_assert!(x.p_two_sided > 0.0 && x.p_two_sided <= 1.0);
    }
}

#[test]
fn normal_approximation_tracks_exact_just_above_crossover() {
    // n = 26 nonzero differences, a spread of effect sizes
    for shift in [0.0, 1.0, 3.0, 6.0, 9.0] {
        let a: Vec<f64> = (1..=26).map(|i| i as f64 + shift * ((i % 3) as f64 - 0.8)).collect();
        let b: Vec<f64> = (1..=26)
            .map(|i| i as f64 + 0.5 * ((i * 7 % 5) as f64 - 2.0) + 0.01)
            .collect();
        let sample = PairedSample::new(a, b).unwrap();
        let approx = wilcoxon_signed_rank(&sample);
        assert_eq!(approx.method, PMethod::Normal);
        assert_eq!(approx.n_effective, 26);
        let exact = wilcoxon_exact_p(&sample);
        assert!(
            (approx.p_two_sided - exact).abs() < 0.01,
            "shift {shift}: normal {} vs exact {exact}",
            approx.p_two_sided
        );
    }
}
