use labornet::experiments::referral_experiment;
use labornet::model::referral_arrival;
use labornet::simulate::{
    build_configuration_network, degree_cap, degree_unemployment_profile, estimate_referral_rate, simulate_unemployment,
    spearman, DynamicsConfig, SimConfig,
};
use labornet::{DegreeDistribution, ModelParams, SolverConfig};

#[test]
fn sample_mean_degree_obeys_the_clt() {
    let n = 200_000;
    for (dist, var) in [
        (DegreeDistribution::poisson(10.0).unwrap(), 10.0),
        (DegreeDistribution::degenerate(7), 0.0),
    ] {
        let net = build_configuration_network(&dist, n, 5).unwrap();
        let se = (var / n as f64).sqrt();
        assert!((net.mean_degree() - dist.mean()).abs() <= 4.0 * se + 1e-12, "{dist:?}: {}", net.mean_degree());
    }
    let zipf = DegreeDistribution::zipf(5.0).unwrap();
    let net = build_configuration_network(&zipf, n, 5).unwrap();
    assert!((net.mean_degree() - zipf.mean()).abs() < 0.01);
}

#[test]
fn heavy_tails_are_cut_at_the_structural_cutoff() {
    let dist = DegreeDistribution::zipf(2.05).unwrap();
    let n = 50_000;
    let net = build_configuration_network(&dist, n, 1).unwrap();
    let cap = degree_cap(&dist, n) as usize;
    assert!(cap < n - 1);
    assert!(net.degrees().iter().all(|&d| d <= cap));
}

#[test]
fn regular_network_matches_closed_form() {
    let cfg = SimConfig::from_context(DegreeDistribution::degenerate(12), 0.05, 0.045, 0.04, 0.3, 16, 100_000, 50_000, 8);
    let est = estimate_referral_rate(&cfg).unwrap();
    let exact = 1.0 - (1.0 - cfg.info_probability()).powi(12);
    assert!((est.mean_field - exact).abs() < 1e-14);
    assert!(est.agrees_within(3.0), "{est:?}");
}

#[test]
fn baseline_poisson_matches_mean_field() {
    let p = ModelParams::default();
    let dist = DegreeDistribution::poisson(22.47).unwrap();
    let cfg = referral_experiment(&p, dist, 200_000, 50_000, 1, &SolverConfig::default()).unwrap();
    let est = estimate_referral_rate(&cfg).unwrap();
    assert!((est.mean_field - 0.391).abs() < 0.002);
    assert!(est.agrees_within(3.0), "{est:?}");
}

#[test]
fn mean_field_matches_model_referral_arrival() {
    let dist = DegreeDistribution::zipf(2.3).unwrap();
    let cfg = SimConfig::from_context(dist, 0.06, 0.05, 0.04, 0.1, 16, 1000, 10, 0);
    let est = estimate_referral_rate(&cfg).unwrap();
    assert_eq!(est.mean_field, referral_arrival(&dist, cfg.info_probability()).unwrap());
}

#[test]
fn same_seed_same_estimate() {
    let cfg = SimConfig::from_context(DegreeDistribution::poisson(5.0).unwrap(), 0.05, 0.05, 0.04, 0.2, 16, 20_000, 5_000, 77);
    let a = estimate_referral_rate(&cfg).unwrap();
    let b = estimate_referral_rate(&cfg).unwrap();
    assert_eq!(a, b);
    let c = estimate_referral_rate(&SimConfig { seed: 78, ..cfg }).unwrap();
    assert_ne!(a.successes, c.successes);
}

#[test]
fn unemployment_falls_with_degree() {
    let net = build_configuration_network(&DegreeDistribution::poisson(8.0).unwrap(), 20_000, 3).unwrap();
    let cfg = DynamicsConfig { delta: 0.036, p_market: 0.2, info_given_employed: 0.02, burn_in: 200, periods: 2000, seed: 4 };
    let u = simulate_unemployment(&net, &cfg).unwrap();
    let profile: Vec<_> = degree_unemployment_profile(&net, &u).into_iter().filter(|&(_, n, _)| n >= 100).collect();
    assert!(profile.len() >= 8);
    let degree: Vec<f64> = profile.iter().map(|&(d, _, _)| d as f64).collect();
    let rate: Vec<f64> = profile.iter().map(|&(_, _, r)| r).collect();
    let rho = spearman(&degree, &rate);
    assert!(rho < -0.9, "rank correlation {rho}, profile {profile:?}");
}
