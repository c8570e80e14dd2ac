//! Averaged state `ρ_S(τ)` from the second-order cumulant solution, and its
//! analytic derivative with respect to the imprint frequency `Ω`.
//!
//! In the tensor basis every coefficient evolves independently:
//!
//! ```text
//! c^(k)_m(τ) = exp(-m² Γ₀ - (k(k+1) - m²) Γ₊) · exp(-i m (Ω τ + Γ₋)) · c^(k)_m(0)
//! ```
//!
//! with `c = Tr(T† ρ)`. The `Ωτ` phase is fixed by the noiseless limit
//! `ρ(τ) = e^{-iΩτJz} ρ(0) e^{iΩτJz}`; the noise-induced shift `Γ₋` adds to it
//! (precession about `Ω ẑ + ω⊥` is faster than `Ω`). The map is a rotation
//! composed with a dephasing semigroup, so it preserves positivity whenever
//! `Γ₀, Γ₊ ≥ 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::noise::{decay_rates, DecayRates, NoiseModel};
use crate::spin::{self, CMatrix, SpinSystem};
use crate::tensor::{TensorBasis, TensorCoefficients};
use crate::tolerance;

/// Initial state, noise, imprint frequency and imprint duration.
#[derive(Clone, Debug)]
pub struct EvolutionSpec {
    pub system: SpinSystem,
    pub rho0: CMatrix,
    pub noise: NoiseModel,
    pub omega: f64,
    pub tau: f64,
}

impl EvolutionSpec {
    pub fn new(system: SpinSystem, rho0: CMatrix, noise: NoiseModel, omega: f64, tau: f64) -> Result<Self> {
        spin::check_density(system, &rho0)?;
        if tau < 0.0 || !tau.is_finite() {
            return Err(Error::NegativeTime(tau));
        }
        if !omega.is_finite() {
            return Err(Error::OutOfDomain("imprint frequency must be finite"));
        }
        Ok(Self { system, rho0, noise, omega, tau })
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Self { omega, ..self.clone() }
    }

    pub fn with_noise(&self, noise: NoiseModel) -> Self {
        Self { noise, ..self.clone() }
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self { tau, ..self.clone() }
    }

    pub fn rates(&self) -> Result<DecayRates> {
        decay_rates(&self.noise, self.tau, self.omega)
    }
}

/// `ρ_S(τ)`, `∂_Ω ρ_S(τ)` and the rates they were computed with.
#[derive(Clone, Debug)]
pub struct AnalyticEvolution {
    pub rho: CMatrix,
    pub d_rho: CMatrix,
    pub rates: DecayRates,
}

fn damping(k: usize, m: i64, rates: &DecayRates, omega: f64) -> Complex64 {
    let mf = m as f64;
    let m2 = mf * mf;
    let kk = (k * (k + 1)) as f64;
    let decay = -m2 * rates.gamma0 - (kk - m2) * rates.gamma_plus;
    let phase = -mf * (omega * rates.t + rates.gamma_minus);
    Complex64::from_polar(crate::math::exp(decay), phase)
}

fn evolved_coefficients(spec: &EvolutionSpec, basis: &TensorBasis, rates: &DecayRates) -> Result<TensorCoefficients> {
    if basis.system() != spec.system {
        return Err(Error::DimensionMismatch {
            expected: spec.system.dim(),
            got: basis.system().dim(),
        });
    }
    let mut coeffs = basis.decompose(&spec.rho0)?;
    coeffs.map_in_place(|k, m, c| c * damping(k, m, rates, spec.omega));
    Ok(coeffs)
}

/// Clips round-off negativity; larger negative eigenvalues are an error.
fn enforce_positivity(rho: CMatrix) -> Result<CMatrix> {
    let eig = spin::eigh_unchecked(&rho);
    let lowest = eig.values[0];
    if lowest < -tolerance::EVOLVED_EIGEN {
        return Err(Error::CumulantBreakdown(lowest));
    }
    if lowest >= -tolerance::ROUNDOFF {
        return Ok(rho);
    }
    let mut clipped = eig.clone();
    for v in clipped.values.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = clipped.values.iter().sum();
    for v in clipped.values.iter_mut() {
        *v /= total;
    }
    Ok(clipped.reconstruct())
}

pub fn evolve_analytic(spec: &EvolutionSpec, basis: &TensorBasis) -> Result<CMatrix> {
    let rates = spec.rates()?;
    let coeffs = evolved_coefficients(spec, basis, &rates)?;
    let rho = basis.reconstruct(&coeffs)?;
    enforce_positivity(hermitize(rho))
}

/// `∂_Ω ρ_S(τ)` by differentiating each coefficient's damping factor.
pub fn evolve_analytic_derivative(spec: &EvolutionSpec, basis: &TensorBasis) -> Result<CMatrix> {
    let rates = spec.rates()?;
    derivative_from_rates(spec, basis, &rates)
}

/// `∂_Ω ρ_S(τ)` for caller-supplied rates, e.g. with the rate derivatives zeroed
/// to isolate the imprint phase.
pub fn derivative_from_rates(spec: &EvolutionSpec, basis: &TensorBasis, rates: &DecayRates) -> Result<CMatrix> {
    let mut coeffs = evolved_coefficients(spec, basis, rates)?;
    coeffs.map_in_place(|k, m, c| {
        let mf = m as f64;
        let kk = (k * (k + 1)) as f64;
        let factor = Complex64::new(
            -(kk - mf * mf) * rates.d_gamma_plus,
            -mf * (rates.t + rates.d_gamma_minus),
        );
        c * factor
    });
    Ok(hermitize(basis.reconstruct(&coeffs)?))
}

/// Both the state and its derivative, sharing one set of rates.
pub fn evolve_with_derivative(spec: &EvolutionSpec, basis: &TensorBasis) -> Result<AnalyticEvolution> {
    let rates = spec.rates()?;
    let coeffs = evolved_coefficients(spec, basis, &rates)?;
    let rho = enforce_positivity(hermitize(basis.reconstruct(&coeffs)?))?;
    let d_rho = derivative_from_rates(spec, basis, &rates)?;
    Ok(AnalyticEvolution { rho, d_rho, rates })
}

/// Noiseless reference `e^{-iΩτJz} ρ₀ e^{iΩτJz}`, computed entrywise.
pub fn unitary_imprint(system: SpinSystem, rho0: &CMatrix, theta: f64) -> CMatrix {
    let mut out = rho0.clone();
    for r in 0..system.dim() {
        for c in 0..system.dim() {
            let dm = system.magnetic(r) - system.magnetic(c);
            out[(r, c)] *= Complex64::from_polar(1.0, -theta * dm);
        }
    }
    out
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}
