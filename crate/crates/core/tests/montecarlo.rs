use memspin_core::evolution::{evolve_analytic, unitary_imprint, EvolutionSpec};
use memspin_core::montecarlo::{combine_batches, evolve_montecarlo, run_batch, MonteCarloConfig};
use memspin_core::noise::{Channel, NoiseModel};
use memspin_core::spin::{trace_distance, SpinOperators, SpinSystem};
use memspin_core::states::{make_css, make_noon};
use memspin_core::tensor::TensorBasis;

#[test]
fn z_noise_average_matches_analytic_entrywise() {
    let s = SpinSystem::new(3).unwrap();
    let b = TensorBasis::new(s);
    let noise = NoiseModel::longitudinal(Channel::ornstein_uhlenbeck(1.0, 1.0).unwrap());
    let spec = EvolutionSpec::new(s, make_css(s), noise, 1.0, 1.0).unwrap();
    let mc = evolve_montecarlo(&spec, &MonteCarloConfig::new(3000, 0.01, 11)).unwrap();
    let exact = evolve_analytic(&spec, &b).unwrap();
    for r in 0..4 {
        for c in 0..4 {
            let d = mc.rho[(r, c)] - exact[(r, c)];
            assert!(d.re.abs() <= 4.0 * mc.stderr_re[(r, c)] + 1e-12, "({r},{c}) re");
            assert!(d.im.abs() <= 4.0 * mc.stderr_im[(r, c)] + 1e-12, "({r},{c}) im");
        }
    }
}

#[test]
fn noise_induced_phase_has_the_analytic_sign() {
    // The transverse phase shift is small but resolved: flipping its sign
    // moves the analytic state far outside the Monte-Carlo error.
    let s = SpinSystem::new(2).unwrap();
    let b = TensorBasis::new(s);
    let noise = NoiseModel::transverse(Channel::ornstein_uhlenbeck(0.3, 1.0).unwrap());
    let spec = EvolutionSpec::new(s, make_css(s), noise, 2.0, 2.0).unwrap();
    let mc = evolve_montecarlo(&spec, &MonteCarloConfig::new(4000, 0.01, 5)).unwrap();
    let exact = evolve_analytic(&spec, &b).unwrap();
    let shift = spec.rates().unwrap().gamma_minus;
    let flipped = unitary_imprint(s, &exact, -2.0 * shift);
    let good = trace_distance(&mc.rho, &exact);
    let bad = trace_distance(&mc.rho, &flipped);
    assert!(good < 0.01, "{good}");
    assert!(bad > 3.0 * good, "{bad} vs {good}");
}

#[test]
fn batch_evaluation_order_does_not_matter() {
    let s = SpinSystem::new(2).unwrap();
    let noise = NoiseModel::isotropic(Channel::ornstein_uhlenbeck(1.0, 1.0).unwrap());
    let spec = EvolutionSpec::new(s, make_noon(s), noise, 1.0, 0.5).unwrap();
    let cfg = MonteCarloConfig::new(200, 0.02, 42).with_batches(20);
    let a = evolve_montecarlo(&spec, &cfg).unwrap();
    let ops = SpinOperators::new(s);
    let mut sums: Vec<_> = (0..20).rev().map(|i| (i, run_batch(&spec, &ops, &cfg, i).unwrap())).collect();
    sums.sort_by_key(|(i, _)| *i);
    let sums: Vec<_> = sums.into_iter().map(|(_, m)| m).collect();
    let b = combine_batches(&cfg, &sums);
    assert_eq!(a.rho, b.rho);
    assert_eq!(a.stderr_re, b.stderr_re);
    let again = evolve_montecarlo(&spec, &cfg).unwrap();
    assert_eq!(a.rho, again.rho);
    let other = evolve_montecarlo(&spec, &MonteCarloConfig::new(200, 0.02, 43).with_batches(20)).unwrap();
    assert_ne!(a.rho, other.rho);
}
