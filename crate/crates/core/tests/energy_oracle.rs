use gdf_core::energytest::{
    failure_event_estimate_seeded, lemma36_analytic_bound, lemma36_probability_seeded,
    sample_iid_heterodyne, SourceModel, TestParams, VerdictMethod,
};
use gdf_core::mathkit::binom_tail_exact;
use gdf_core::parallel::McOptions;
use gdf_core::params::g_factor;
use gdf_core::LogReal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `Pr[k d Z_n >= n d' Z_k]` in closed form: `Z_n / (Z_n + Z_k)` is
/// Beta(n, k), whose upper tail at `t` is `Pr[Bin(n + k - 1, t) <= n - 1]`.
fn exact_event_probability(n: u64, k: u64, d: f64, eps: LogReal) -> f64 {
    let d_prime = g_factor(n, k, eps).unwrap() * d;
    let t = n as f64 * d_prime / (k as f64 * d + n as f64 * d_prime);
    binom_tail_exact(n - 1, n + k - 1, t).unwrap().value()
}

#[test]
fn chi_square_event_matches_beta_law() {
    let options = McOptions::default();
    for (n, k, eps) in [(5u64, 30u64, 0.5), (20, 40, 0.3), (100, 100, 0.05)] {
        let eps = LogReal::from_f64(eps);
        let est = lemma36_probability_seeded(n, k, 1.0, eps, 400_000, 21, &options).unwrap();
        let exact = exact_event_probability(n, k, 1.0, eps);
        assert!(
            est.wilson_low <= exact && exact <= est.wilson_high,
            "n={n} k={k}: rate {} exact {exact}",
            est.rate
        );
        assert!(exact <= lemma36_analytic_bound(n, k, eps).unwrap().value() + 1e-15);
        assert!(exact <= eps.value());
    }
}

#[test]
fn event_is_scale_free_in_d() {
    let eps = LogReal::from_f64(0.1);
    let a = lemma36_probability_seeded(50, 60, 0.5, eps, 50_000, 4, &McOptions::default()).unwrap();
    let b = lemma36_probability_seeded(50, 60, 7.0, eps, 50_000, 4, &McOptions::default()).unwrap();
    assert_eq!(a.events, b.events);
}

#[test]
fn lemma36_verdict_switches_to_analytic_when_unresolved() {
    let eps = LogReal::from_f64(1e-9);
    let est = lemma36_probability_seeded(1000, 200, 2.0, eps, 1000, 1, &McOptions::default()).unwrap();
    assert_eq!(est.method, VerdictMethod::Analytic);
    assert!(est.passed);
    assert!(est.analytic_bound <= eps);
}

#[test]
fn heterodyne_convention_adds_vacuum_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples = sample_iid_heterodyne(2.0, 200_000, &mut rng).unwrap();
    let mean = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / samples.len() as f64;
    // Exponential with mean 3: standard error 3 / sqrt(m).
    assert!((mean - 3.0).abs() < 5.0 * 3.0 / (samples.len() as f64).sqrt(), "{mean}");
}

#[test]
fn failure_event_is_rare_for_both_models() {
    let params = TestParams { n: 100, k: 100, d_a: 3.0, d_b: 3.0 };
    let eps = LogReal::from_f64(0.01);
    for source in [
        SourceModel::Thermal { mean_a: 1.0, mean_b: 1.0 },
        SourceModel::Concentrated { mean_a: 1.0, mean_b: 1.0 },
    ] {
        let est = failure_event_estimate_seeded(&params, source, eps, 20_000, 6, &McOptions::default()).unwrap();
        assert!(est.passed, "{est:?}");
        assert!(est.wilson_high <= eps.value());
    }
}

#[test]
fn generous_threshold_always_passes() {
    let params = TestParams { n: 20, k: 20, d_a: 1e6, d_b: 1e6 };
    let source = SourceModel::Thermal { mean_a: 1.0, mean_b: 1.0 };
    let est = failure_event_estimate_seeded(&params, source, LogReal::from_f64(0.01), 2_000, 1, &McOptions::default())
        .unwrap();
    assert_eq!(est.passes, 2_000);
    assert_eq!(est.failures, 0);
}
