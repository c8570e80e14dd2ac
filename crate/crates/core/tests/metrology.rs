use memspin_core::evolution::{derivative_from_rates, evolve_analytic, evolve_with_derivative, EvolutionSpec};
use memspin_core::metrology::{
    cfi_from_distribution, cfi_imbalance, ftilde_density, ftilde_density_oracle, imbalance_distribution, qfi_exact,
    qfi_from_state, qfi_noon_approx, qfi_whitenoise, snl_bound, symmetry_bound, ModeFunctions, Pulse,
};
use memspin_core::noise::{Channel, NoiseModel};
use memspin_core::spin::{CMatrix, SpinSystem};
use memspin_core::states::{default_gamma_grid, make_bh_ground, make_css, make_noon};
use memspin_core::tensor::TensorBasis;
use num_complex::Complex64;
use proptest::prelude::*;

fn setup(n: usize) -> (SpinSystem, TensorBasis) {
    let s = SpinSystem::new(n).unwrap();
    (s, TensorBasis::new(s))
}

fn ou() -> Channel {
    Channel::ornstein_uhlenbeck(1.0, 1.0).unwrap()
}

fn spec(s: SpinSystem, rho: CMatrix, noise: NoiseModel, omega: f64, tau: f64) -> EvolutionSpec {
    EvolutionSpec::new(s, rho, noise, omega, tau).unwrap()
}

#[test]
fn pulsed_readout_saturates_qfi_for_path_symmetric_states() {
    let (s, b) = setup(10);
    for g in default_gamma_grid(11) {
        for omega in [0.02, 2.0, 10.0] {
            let sp = spec(s, make_bh_ground(s, g).unwrap(), NoiseModel::noiseless(), omega, 0.5);
            let q = qfi_exact(&sp, &b).unwrap();
            let f = cfi_imbalance(&sp, &b, Pulse::HalfPiX).unwrap();
            assert!((f - q).abs() <= 1e-6 * q, "γ={g} Ω={omega}: {f} vs {q}");
            assert!(cfi_imbalance(&sp, &b, Pulse::None).unwrap().abs() < 1e-10);
        }
    }
}

#[test]
fn cfi_derivative_matches_finite_difference() {
    let (s, b) = setup(6);
    let sp = spec(s, make_bh_ground(s, -0.7).unwrap(), NoiseModel::isotropic(ou()), 4.0, 0.6);
    let ev = evolve_with_derivative(&sp, &b).unwrap();
    let (p, dp) = imbalance_distribution(s, &ev.rho, &ev.d_rho, Pulse::HalfPiX).unwrap();
    let h = 1e-5;
    let plus = evolve_analytic(&sp.with_omega(4.0 + h), &b).unwrap();
    let minus = evolve_analytic(&sp.with_omega(4.0 - h), &b).unwrap();
    let (pp, _) = imbalance_distribution(s, &plus, &plus, Pulse::HalfPiX).unwrap();
    let (pm, _) = imbalance_distribution(s, &minus, &minus, Pulse::HalfPiX).unwrap();
    for i in 0..p.len() {
        assert!(((pp[i] - pm[i]) / (2.0 * h) - dp[i]).abs() < 1e-8);
    }
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(cfi_from_distribution(&p, &dp) > 0.0);
}

#[test]
fn separable_state_obeys_shot_noise_limit() {
    let (s, b) = setup(12);
    for tau in [0.1, 0.5, 2.0] {
        let sp = spec(s, make_css(s), NoiseModel::noiseless(), 3.0, tau);
        assert!(qfi_exact(&sp, &b).unwrap() <= snl_bound(12, tau) + 1e-8);
    }
}

#[test]
fn symmetry_bound_is_tight_for_pure_and_loose_for_mixed() {
    let (s, b) = setup(8);
    let tau = 0.7;
    for g in [0.0, -0.5, -2.0] {
        let rho = make_bh_ground(s, g).unwrap();
        let q = qfi_exact(&spec(s, rho.clone(), NoiseModel::noiseless(), 1.0, tau), &b).unwrap();
        let bound = symmetry_bound(&b, &rho, tau).unwrap();
        assert!((q - bound).abs() < 1e-9 * bound, "γ={g}: {q} vs {bound}");
    }
    let mix = (make_noon(s) + make_css(s)) * Complex64::new(0.5, 0.0);
    let q = qfi_exact(&spec(s, mix.clone(), NoiseModel::noiseless(), 1.0, tau), &b).unwrap();
    assert!(q <= symmetry_bound(&b, &mix, tau).unwrap() + 1e-8);
    let flat = s.identity() * Complex64::new(1.0 / 9.0, 0.0);
    assert!(symmetry_bound(&b, &flat, tau).unwrap() >= 0.0);
    assert!(qfi_exact(&spec(s, flat, NoiseModel::noiseless(), 1.0, tau), &b).unwrap().abs() < 1e-10);
}

#[test]
fn white_noise_qfi_and_population_leakage() {
    // Exact NOON QFI under isotropic white noise is the closed form divided
    // by 2 p, where p is the weight left on |j, j⟩.
    let (s, b) = setup(4);
    for (tau, t_white) in [(0.01, 1.0), (0.1, 1.0), (0.5, 10.0)] {
        let sp = spec(s, make_noon(s), NoiseModel::isotropic(Channel::white(1.0 / t_white).unwrap()), 1.0, tau);
        let exact = qfi_exact(&sp, &b).unwrap();
        let p = evolve_analytic(&sp, &b).unwrap()[(0, 0)].re;
        let closed = qfi_whitenoise(4, tau, t_white).unwrap();
        assert!((exact * 2.0 * p - closed).abs() < 1e-10 * closed);
    }
    assert!((qfi_whitenoise(10, 1e-9, 1.0).unwrap() / (100.0 * 1e-18) - 1.0).abs() < 1e-6);
}

#[test]
fn noon_expansion_in_its_validity_regime() {
    for n in [4usize, 10] {
        let (s, b) = setup(n);
        for omega in [0.0, 10.0] {
            for tau in [0.05, 0.1, 0.15, 0.2, 0.25] {
                for noise in [NoiseModel::transverse(ou()), NoiseModel::isotropic(ou())] {
                    let sp = spec(s, make_noon(s), noise, omega, tau);
                    let r = sp.rates().unwrap();
                    if n as f64 * r.gamma_plus > 0.1 {
                        continue;
                    }
                    let exact = qfi_exact(&sp, &b).unwrap();
                    let approx = qfi_noon_approx(&sp).unwrap();
                    assert!((approx - exact).abs() <= 0.05 * exact, "N={n} Ω={omega} τ={tau}");
                }
            }
        }
    }
}

#[test]
fn noon_qfi_per_tau_squared_decays() {
    // Decoherence lowers F_Q/τ². Where the full value rises, the rise must
    // come from the Ω-dependence of the decay rates (information carried by
    // the decay itself): the imprint-phase-only part still decays.
    let (s, b) = setup(6);
    let base = spec(s, make_noon(s), NoiseModel::isotropic(ou()), 2.5, 0.0);
    let (mut last, mut last_phase) = (f64::INFINITY, f64::INFINITY);
    for i in 1..=30 {
        let tau = 0.1 * i as f64;
        let sp = base.with_tau(tau);
        let f = qfi_exact(&sp, &b).unwrap() / (tau * tau);
        let mut rates = sp.rates().unwrap();
        rates.d_gamma_plus = 0.0;
        rates.d_gamma_minus = 0.0;
        let rho = evolve_analytic(&sp, &b).unwrap();
        let d_phase = derivative_from_rates(&sp, &b, &rates).unwrap();
        let f_phase = qfi_from_state(&rho, &d_phase) / (tau * tau);
        assert!(f_phase <= last_phase * (1.0 + 1e-12), "τ={tau}: {f_phase} > {last_phase}");
        if f > last * (1.0 + 1e-12) {
            println!("τ/τ_c={tau:.1}: F_Q/τ² rises {last:.6} -> {f:.6} through the decay-rate term");
            assert!(f > f_phase);
        }
        last = f;
        last_phase = f_phase;
    }
}

#[test]
fn gyroscopic_benefit() {
    let (s, b) = setup(10);
    let slow = spec(s, make_noon(s), NoiseModel::transverse(ou()), 0.0, 0.5);
    let fast = slow.with_omega(10.0);
    assert!(qfi_exact(&fast, &b).unwrap() >= qfi_exact(&slow, &b).unwrap());
}

#[test]
fn density_sensitivity_reference_values() {
    for n in [2usize, 10, 40] {
        let (s, _) = setup(n);
        let css = spec(s, make_css(s), NoiseModel::noiseless(), 2.0, 0.8);
        let f = ftilde_density(&css).unwrap();
        assert!((f - snl_bound(n, 0.8)).abs() < 1e-8 * f);
        let noon = spec(s, make_noon(s), NoiseModel::noiseless(), 2.0, 0.8);
        assert_eq!(ftilde_density(&noon).unwrap(), 0.0);
    }
}

#[test]
fn noiseless_density_sensitivity_below_qfi() {
    let (s, b) = setup(10);
    for g in default_gamma_grid(11) {
        let sp = spec(s, make_bh_ground(s, g).unwrap(), NoiseModel::noiseless(), 10.0, 0.5);
        let f = ftilde_density(&sp).unwrap();
        let q = qfi_exact(&sp, &b).unwrap();
        assert!(f <= q + 1e-8, "γ={g}: {f} > {q}");
    }
}

#[test]
fn quadrature_oracle() {
    let (s, b) = setup(10);
    let modes = ModeFunctions::new(40.0, 1.0).unwrap();
    let css = spec(s, make_css(s), NoiseModel::noiseless(), 10.0, 0.5);
    let o = ftilde_density_oracle(&css, &b, modes).unwrap();
    assert!((o.sensitivity / snl_bound(10, 0.5) - 1.0).abs() < 0.02);
    let noon = spec(s, make_noon(s), NoiseModel::noiseless(), 10.0, 0.5);
    let o = ftilde_density_oracle(&noon, &b, modes).unwrap();
    assert!(o.sensitivity.abs() < 1e-10);
    let bh = spec(s, make_bh_ground(s, -0.5).unwrap(), NoiseModel::noiseless(), 10.0, 0.5);
    let o = ftilde_density_oracle(&bh, &b, modes).unwrap();
    let f = ftilde_density(&bh).unwrap();
    assert!((o.sensitivity - f).abs() <= 0.05 * f, "{} vs {f}", o.sensitivity);
    // converged: a finer envelope sampling does not move it
    let wide = ftilde_density_oracle(&bh, &b, ModeFunctions::new(80.0, 1.0).unwrap()).unwrap();
    assert!((wide.sensitivity / o.sensitivity - 1.0).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn classical_never_exceeds_quantum(
        n in 1usize..9,
        g in -5.0f64..0.0,
        w0 in 0.0f64..1.5,
        omega in 0.0f64..12.0,
        tau in 0.05f64..2.0,
        isotropic in any::<bool>(),
    ) {
        let (s, b) = setup(n);
        let ch = Channel::ornstein_uhlenbeck(w0, 1.0).unwrap();
        let noise = if isotropic { NoiseModel::isotropic(ch) } else { NoiseModel::transverse(ch) };
        let sp = spec(s, make_bh_ground(s, g).unwrap(), noise, omega, tau);
        let q = qfi_exact(&sp, &b).unwrap();
        prop_assert!(q >= 0.0);
        for pulse in [Pulse::None, Pulse::HalfPiX] {
            let f = cfi_imbalance(&sp, &b, pulse).unwrap();
            prop_assert!(f >= 0.0 && f <= q + 1e-8, "{:?}: {} > {}", pulse, f, q);
        }
    }
}
