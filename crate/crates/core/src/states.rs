//! Probe states: NOON, coherent spin state and two-mode Bose-Hubbard ground
//! states `H = -E_J Jx + U Jz²` with `E_J = 1` and `U = γ / N`, so the
//! crossover from coherent-like to cat-like ground states sits near `γ = -1`
//! for every `N`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::spin::{self, CMatrix, SpinOperators, SpinSystem};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeKind {
    Noon,
    /// Maximal-`Jx` eigenstate, the `γ = 0` Bose-Hubbard ground state.
    Coherent,
    BoseHubbard { gamma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeStateSpec {
    pub kind: ProbeKind,
    pub system: SpinSystem,
}

impl ProbeStateSpec {
    pub fn build(&self) -> Result<CMatrix> {
        match self.kind {
            ProbeKind::Noon => Ok(make_noon(self.system)),
            ProbeKind::Coherent => Ok(make_css(self.system)),
            ProbeKind::BoseHubbard { gamma } => make_bh_ground(self.system, gamma),
        }
    }
}

/// `(|j, j⟩ + |j, -j⟩) / √2`.
pub fn noon_vector(system: SpinSystem) -> DVector<Complex64> {
    let mut v = DVector::zeros(system.dim());
    let a = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = a;
    v[system.n()] = a;
    v
}

pub fn make_noon(system: SpinSystem) -> CMatrix {
    spin::projector(&noon_vector(system))
}

/// Coherent spin state along `+x`: binomial amplitudes `sqrt(C(N, i)) / 2^{N/2}`.
pub fn css_vector(system: SpinSystem) -> DVector<Complex64> {
    let n = system.n();
    let log_norm = -(n as f64) * core::f64::consts::LN_2 / 2.0;
    DVector::from_iterator(
        system.dim(),
        (0..=n).map(|i| Complex64::new(math::exp(0.5 * ln_binomial(n, i) + log_norm), 0.0)),
    )
}

pub fn make_css(system: SpinSystem) -> CMatrix {
    spin::projector(&css_vector(system))
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| math::ln((n - i) as f64) - math::ln((i + 1) as f64)).sum()
}

/// Ground state of `-Jx + (γ/N) Jz²` restricted to the sector that is even
/// under `m → -m`, as a real unit vector with non-negative overlap on `m = j`.
pub fn bh_ground_vector(system: SpinSystem, gamma: f64) -> Result<DVector<f64>> {
    if !gamma.is_finite() {
        return Err(Error::OutOfDomain("interaction ratio must be finite"));
    }
    if gamma > 0.0 {
        return Err(Error::RepulsiveInteraction(gamma));
    }
    let n = system.n();
    let dim = system.dim();
    let u = gamma / n as f64;
    // Real tridiagonal Hamiltonian in the Dicke basis.
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let m = system.magnetic(i);
        h[(i, i)] = u * m * m;
        if i >= 1 {
            let jx = -0.5 * system.raising_element(i);
            h[(i - 1, i)] = jx;
            h[(i, i - 1)] = jx;
        }
    }
    // Orthonormal basis of the even sector: (e_i + e_{N-i})/√2 and e_{N/2}.
    let half = dim / 2;
    let even_dim = dim - half;
    let mut p = DMatrix::<f64>::zeros(dim, even_dim);
    for a in 0..even_dim {
        let b = n - a;
        if a == b {
            p[(a, a)] = 1.0;
        } else {
            p[(a, a)] = core::f64::consts::FRAC_1_SQRT_2;
            p[(b, a)] = core::f64::consts::FRAC_1_SQRT_2;
        }
    }
    let reduced = p.transpose() * &h * &p;
    let eig = reduced.symmetric_eigen();
    let lowest = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(core::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v = &p * eig.eigenvectors.column(lowest);
    let norm = v.norm();
    v /= norm;
    // Fix the sign: the ground state of a matrix with non-positive
    // off-diagonal elements has non-negative components.
    let total: f64 = v.iter().sum();
    if total < 0.0 {
        v = -v;
    }
    Ok(v)
}

pub fn make_bh_ground(system: SpinSystem, gamma: f64) -> Result<CMatrix> {
    let v = bh_ground_vector(system, gamma)?;
    let psi = DVector::from_iterator(system.dim(), v.iter().map(|&x| Complex64::new(x, 0.0)));
    Ok(spin::projector(&psi))
}

/// `⟨ψ|H_BH|ψ⟩` with `E_J = 1`.
pub fn bh_energy(system: SpinSystem, gamma: f64, rho: &CMatrix) -> f64 {
    let ops = SpinOperators::new(system);
    let jz2 = &ops.jz * &ops.jz;
    -spin::expectation(&ops.jx, rho) + gamma / system.n() as f64 * spin::expectation(&jz2, rho)
}

/// First and second moments of the collective spin in a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub jx2: f64,
    pub jy2: f64,
    pub jz2: f64,
    /// `⟨JxJy + JyJx⟩ / 2`.
    pub jxy: f64,
}

impl Moments {
    pub fn var_jx(&self) -> f64 {
        self.jx2 - self.jx * self.jx
    }

    pub fn var_jy(&self) -> f64 {
        self.jy2 - self.jy * self.jy
    }

    pub fn var_jz(&self) -> f64 {
        self.jz2 - self.jz * self.jz
    }
}

pub fn initial_moments(system: SpinSystem, rho: &CMatrix) -> Result<Moments> {
    spin::check_density(system, rho)?;
    let ops = SpinOperators::new(system);
    let sq = |a: &CMatrix| spin::expectation(&(a * a), rho);
    let xy = &ops.jx * &ops.jy;
    let sym = (&xy + xy.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(Moments {
        jx: spin::expectation(&ops.jx, rho),
        jy: spin::expectation(&ops.jy, rho),
        jz: spin::expectation(&ops.jz, rho),
        jx2: sq(&ops.jx),
        jy2: sq(&ops.jy),
        jz2: sq(&ops.jz),
        jxy: spin::expectation(&sym, rho),
    })
}

/// Log-spaced `γ ∈ [-100, -0.01]` (`points` values, most negative first)
/// followed by `γ = 0`.
pub fn default_gamma_grid(points: usize) -> Vec<f64> {
    let points = points.max(2);
    let mut grid: Vec<f64> = (0..points)
        .map(|i| {
            let exponent = 2.0 - 4.0 * i as f64 / (points - 1) as f64;
            -libm::pow(10.0, exponent)
        })
        .collect();
    grid.push(0.0);
    grid
}
