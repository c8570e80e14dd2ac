//! Fisher information for estimating `Ω`: quantum Fisher information of the
//! averaged state, classical Fisher information of population-imbalance
//! readout, the one-body density sensitivity `F̃`, and reference bounds.
//!
//! All values are per experiment, in units of `1/Ω²` (time²).

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{evolve_with_derivative, EvolutionSpec};
use crate::math;
use crate::spin::{self, CMatrix, SpinOperators, SpinSystem};
use crate::states::{initial_moments, ProbeKind};
use crate::tensor::TensorBasis;
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Protocol {
    QfiExact,
    QfiNoonApprox,
    QfiWhiteNoise,
    CfiImbalance,
    CfiImbalancePulsed,
    FtildeDensity,
    Snl,
    SymmetryBound,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::QfiExact => "qfi_exact",
            Protocol::QfiNoonApprox => "qfi_noon_approx",
            Protocol::QfiWhiteNoise => "qfi_whitenoise",
            Protocol::CfiImbalance => "cfi_imbalance",
            Protocol::CfiImbalancePulsed => "cfi_imbalance_pulsed",
            Protocol::FtildeDensity => "ftilde_density",
            Protocol::Snl => "snl",
            Protocol::SymmetryBound => "symmetry_bound",
        }
    }
}

/// Where a report came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportContext {
    pub n: usize,
    pub omega: f64,
    pub tau: f64,
    pub state: Option<ProbeKind>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimationReport {
    pub protocol: Protocol,
    pub value: f64,
    pub context: ReportContext,
}

impl EstimationReport {
    pub fn new(protocol: Protocol, value: f64, spec: &EvolutionSpec, state: Option<ProbeKind>) -> Self {
        Self {
            protocol,
            value,
            context: ReportContext {
                n: spec.system.n(),
                omega: spec.omega,
                tau: spec.tau,
                state,
            },
        }
    }
}

/// `F_Q = 2 Σ_ij |⟨i|∂ρ|j⟩|² / (p_i + p_j)` in the eigenbasis of `rho`.
pub fn qfi_from_state(rho: &CMatrix, d_rho: &CMatrix) -> f64 {
    let eig = spin::eigh_unchecked(rho);
    let v = &eig.vectors;
    let d = v.adjoint() * d_rho * v;
    let dim = eig.values.len();
    let mut total = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let s = eig.values[i].max(0.0) + eig.values[j].max(0.0);
            if s < tolerance::FISHER_PROB {
                continue;
            }
            total += 2.0 * d[(i, j)].norm_sqr() / s;
        }
    }
    total
}

pub fn qfi_exact(spec: &EvolutionSpec, basis: &TensorBasis) -> Result<f64> {
    let ev = evolve_with_derivative(spec, basis)?;
    Ok(qfi_from_state(&ev.rho, &ev.d_rho))
}

/// Closed-form NOON value under white noise of rate `1/T` on every axis.
pub fn qfi_whitenoise(n: usize, tau: f64, t_white: f64) -> Result<f64> {
    if !(t_white > 0.0) {
        return Err(Error::OutOfDomain("white-noise time must be positive"));
    }
    let nf = n as f64;
    Ok(nf * nf * tau * tau * math::exp(-2.0 * nf * (nf + 1.0) * tau / t_white))
}

/// Small-`NΓ₊` expansion of the NOON QFI. Errors outside `NΓ₊ < 0.5`.
pub fn qfi_noon_approx(spec: &EvolutionSpec) -> Result<f64> {
    let r = spec.rates()?;
    let nf = spec.system.n() as f64;
    let ng = nf * r.gamma_plus;
    if ng >= 0.5 {
        return Err(Error::OutOfDomain("noon expansion requires N Γ₊ < 0.5"));
    }
    let phase_rate = r.t + r.d_gamma_minus;
    let first = nf * nf * phase_rate * phase_rate / (1.0 - ng)
        * math::exp(-2.0 * nf * nf * r.gamma0 - 2.0 * ng);
    let second = if r.gamma_plus > 0.0 {
        nf * r.d_gamma_plus * r.d_gamma_plus / r.gamma_plus
    } else {
        0.0
    };
    Ok(first + second)
}

pub fn snl_bound(n: usize, tau: f64) -> f64 {
    n as f64 * tau * tau
}

/// `4 τ² Σ_α p_α Σ_m m² K_m(ψ_α)` over the eigen-ensemble of `rho0`.
pub fn symmetry_bound(basis: &TensorBasis, rho0: &CMatrix, tau: f64) -> Result<f64> {
    let system = basis.system();
    spin::check_density(system, rho0)?;
    let eig = spin::eigh_unchecked(rho0);
    let mut total = 0.0;
    for (a, &p) in eig.values.iter().enumerate() {
        if p <= tolerance::ROUNDOFF {
            continue;
        }
        let psi = eig.vectors.column(a).into_owned();
        let km = basis.km_distribution(&spin::projector(&psi))?;
        let weighted: f64 = km.iter().enumerate().map(|(m, k)| (m * m) as f64 * k).sum();
        total += p * weighted;
    }
    Ok(4.0 * tau * tau * total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pulse {
    None,
    /// Instantaneous `e^{-i(π/2)Jx}` before counting.
    HalfPiX,
}

/// Outcome probabilities of `Jz` and their `Ω` derivatives.
pub fn imbalance_distribution(system: SpinSystem, rho: &CMatrix, d_rho: &CMatrix, pulse: Pulse) -> Result<(Vec<f64>, Vec<f64>)> {
    let (rho, d_rho) = match pulse {
        Pulse::None => (rho.clone(), d_rho.clone()),
        Pulse::HalfPiX => {
            let u = half_pi_x(system)?;
            (spin::conjugate(&u, rho), spin::conjugate(&u, d_rho))
        }
    };
    let p = rho.diagonal().iter().map(|z| z.re).collect();
    let dp = d_rho.diagonal().iter().map(|z| z.re).collect();
    Ok((p, dp))
}

fn half_pi_x(system: SpinSystem) -> Result<CMatrix> {
    spin::unitary_from_generator(&spin::build_jx(system), core::f64::consts::FRAC_PI_2)
}

pub fn cfi_from_distribution(p: &[f64], dp: &[f64]) -> f64 {
    p.iter()
        .zip(dp)
        .filter(|(p, _)| **p > tolerance::FISHER_PROB)
        .map(|(p, d)| d * d / p)
        .sum()
}

pub fn cfi_imbalance(spec: &EvolutionSpec, basis: &TensorBasis, pulse: Pulse) -> Result<f64> {
    let ev = evolve_with_derivative(spec, basis)?;
    let (p, dp) = imbalance_distribution(spec.system, &ev.rho, &ev.d_rho, pulse)?;
    Ok(cfi_from_distribution(&p, &dp))
}

/// `μ²` at or below this is round-off on `1 - 2⟨Jx⟩/N` and treated as `μ = 0`.
const MU_SQ_FLOOR: f64 = 1e-12;

/// Moment-based sensitivity of a least-squares fit to the one-body density.
///
/// Rates are taken per unit imprinted phase `θ = Ωτ`: `α = 1 + ∂Γ₋/τ`,
/// `d = ∂Γ₊/τ`, `β = d/μ`, `μ = sqrt(1 - 2⟨Jx⟩/N)`, with initial-state moments:
///
/// ```text
/// F̃_θ = ⟨Jx⟩² (α + d)² / [ (N/4)(αμ + d) + α² Var Jy − αβ ⟨{Jx,Jy}⟩ + β² Var Jx ]
/// ```
///
/// and `F̃ = τ² F̃_θ`. At `μ → 0` the `β`-weighted moment terms are dropped.
pub fn ftilde_density(spec: &EvolutionSpec) -> Result<f64> {
    let m = initial_moments(spec.system, &spec.rho0)?;
    if spec.tau == 0.0 {
        return Ok(0.0);
    }
    let r = spec.rates()?;
    let nf = spec.system.n() as f64;
    let alpha = 1.0 + r.d_gamma_minus / r.t;
    let d = r.d_gamma_plus / r.t;
    let mu2 = 1.0 - 2.0 * m.jx / nf;
    let mu = if mu2 > MU_SQ_FLOOR { math::sqrt(mu2) } else { 0.0 };
    let numerator = m.jx * m.jx * (alpha + d) * (alpha + d);
    // ⟨(αJy − βJx)²⟩ − α²⟨Jy⟩² − β²⟨Jx⟩² expanded into variances.
    let cross = 2.0 * m.jxy;
    let mut denominator = 0.25 * nf * (alpha * mu + d) + alpha * alpha * m.var_jy();
    if mu > 0.0 && d != 0.0 {
        let beta = d / mu;
        denominator += -alpha * beta * cross + beta * beta * m.var_jx();
    }
    if numerator == 0.0 {
        return Ok(0.0);
    }
    if !(denominator > 0.0) {
        return Err(Error::OutOfDomain("density sensitivity is undefined at this order"));
    }
    Ok(spec.tau * spec.tau * numerator / denominator)
}

/// Overlapping mode functions `ψ_{a,b}(x) = f(x) e^{±ikx/2}` with a Gaussian
/// envelope `f²` of unit norm and standard deviation `width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeFunctions {
    pub k: f64,
    pub width: f64,
}

impl ModeFunctions {
    pub fn new(k: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !(k * width >= 20.0) {
            return Err(Error::OutOfDomain("mode functions need k·width ≥ 20"));
        }
        Ok(Self { k, width })
    }

    fn envelope_sq(&self, x: f64) -> f64 {
        let s = self.width;
        math::exp(-0.5 * x * x / (s * s)) / (s * math::sqrt(2.0 * core::f64::consts::PI))
    }
}

/// Components of the quadrature evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityFisher {
    /// `∫ (∂ρ)²/ρ`.
    pub f1: f64,
    /// `(1/F₁) ∫∫ ∂ρ(x) ∂ρ(y) g⁽²⁾(x, y)`.
    pub f2: f64,
    /// Inverse variance of the least-squares estimator, `F₁ / (1 + F₂)`.
    pub sensitivity: f64,
    /// Grid points used on the final level.
    pub points: usize,
}

/// Relative change allowed between successive step halvings.
const ORACLE_CONVERGENCE: f64 = 1e-3;
const ORACLE_MAX_LEVEL: u32 = 14;

/// Direct quadrature of the one- and two-body density integrals for the
/// state evolved by `spec`.
///
/// The two-body correlation of the two-mode field separates into a finite
/// sum of products of fringe harmonics, so on a uniform grid the double
/// integral is evaluated as a quadratic form in the single integrals
/// `V_s = ∫ w(x) f²(x) e^{-iskx}`, `w = ∂ρ/ρ`. This is the same number as the
/// trapezoid double sum, in `O(points)` work.
pub fn ftilde_density_oracle(spec: &EvolutionSpec, basis: &TensorBasis, modes: ModeFunctions) -> Result<DensityFisher> {
    let ev = evolve_with_derivative(spec, basis)?;
    let system = spec.system;
    let ops = SpinOperators::new(system);
    let jp = spin::build_jplus(system);
    let jm = spin::build_jminus(system);
    let nf = system.n() as f64;
    let tr = |a: &CMatrix, r: &CMatrix| spin::trace_product(a, r);
    let jp_t = tr(&jp, &ev.rho);
    let jp_d = tr(&jp, &ev.d_rho);
    let na = nf / 2.0 + spin::expectation(&ops.jz, &ev.rho);
    let nb = nf - na;
    // ⟨A_s A_s'⟩ with A_0 = N, A_1 = J₊, A_{-1} = J₋.
    let a_ops = [jm.clone(), system.identity() * Complex64::new(nf, 0.0), jp.clone()];
    let mut aa = [[Complex64::new(0.0, 0.0); 3]; 3];
    for s in 0..3 {
        for t in 0..3 {
            aa[s][t] = tr(&(&a_ops[s] * &a_ops[t]), &ev.rho);
        }
    }

    let half_span = 8.0 * modes.width;
    let k = modes.k;
    let evaluate = |points: usize| -> (f64, f64) {
        let h = 2.0 * half_span / points as f64;
        let mut f1 = 0.0;
        // v[s] for harmonic index s-1
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for i in 0..points {
            let x = -half_span + (i as f64 + 0.5) * h;
            let env = modes.envelope_sq(x);
            let phase = Complex64::from_polar(1.0, -k * x);
            let rho = env * (nf + 2.0 * (phase * jp_t).re);
            let drho = env * 2.0 * (phase * jp_d).re;
            if rho <= 0.0 {
                continue;
            }
            let w = drho / rho;
            f1 += h * drho * w;
            let base = h * w * env;
            v[0] += phase.conj() * base;
            v[1] += Complex64::new(base, 0.0);
            v[2] += phase * base;
        }
        // ∫∫ w w ⟨n(x) n(y)⟩ = Σ V_s V_s' ⟨A_s A_s'⟩ where n(x) = f² Σ e^{-iskx} A_s.
        let mut g = Complex64::new(0.0, 0.0);
        for s in 0..3 {
            for t in 0..3 {
                g += v[s] * v[t] * aa[s][t];
            }
        }
        // Commutator term K(x,y) ⟨Ψ†(x)Ψ(y)⟩.
        let jm_t = jp_t.conj();
        let commut = (v[1] * v[1] + v[2] * v[0]) * na
            + (v[0] * v[2] + v[1] * v[1]) * nb
            + (v[1] * v[2] + v[2] * v[1]) * jp_t
            + (v[0] * v[1] + v[1] * v[0]) * jm_t;
        let double = (g - commut).re;
        let f2 = if f1 > 0.0 { double / f1 } else { 0.0 };
        (f1, f2)
    };

    let fringes = k * 2.0 * half_span / (2.0 * core::f64::consts::PI);
    let mut points = libm::ceil(fringes * 16.0) as usize;
    let mut prev = evaluate(points);
    for _ in 0..ORACLE_MAX_LEVEL {
        points *= 2;
        let cur = evaluate(points);
        let settled = |a: f64, b: f64| (a - b).abs() <= ORACLE_CONVERGENCE * a.abs().max(tolerance::ROUNDOFF);
        if settled(cur.0, prev.0) && settled(combine(cur), combine(prev)) {
            return Ok(DensityFisher {
                f1: cur.0,
                f2: cur.1,
                sensitivity: combine(cur),
                points,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged(combine(prev)))
}

fn combine((f1, f2): (f64, f64)) -> f64 {
    if f1 <= 0.0 {
        0.0
    } else {
        f1 / (1.0 + f2)
    }
}
