//! Stationary Gaussian noise: correlation functions, the decay-rate integral
//! `Γ(t, Ω)`, its Ω-derivative and exact Ornstein-Uhlenbeck sampling.
//!
//! The noise field has two independent channels: the `z` component and the
//! two i.i.d. components perpendicular to the imprint axis.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::math;

/// Statistics of one noise channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Channel {
    Silent,
    /// `κ(s) = variance · exp(-|s| / tau_c)`.
    OrnsteinUhlenbeck { variance: f64, tau_c: f64 },
    /// `κ(s) = (2/T) δ(s)` with `rate = 1/T = ∫₀^∞ κ`.
    White { rate: f64 },
}

impl Channel {
    /// OU channel from its standard deviation `ω₀` and correlation time.
    pub fn ornstein_uhlenbeck(omega0: f64, tau_c: f64) -> Result<Self> {
        if !omega0.is_finite() || omega0 < 0.0 {
            return Err(Error::InvalidNoise("noise strength must be finite and non-negative"));
        }
        if !tau_c.is_finite() || tau_c <= 0.0 {
            return Err(Error::InvalidNoise("correlation time must be positive"));
        }
        Ok(Channel::OrnsteinUhlenbeck { variance: omega0 * omega0, tau_c })
    }

    pub fn white(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidNoise("white-noise rate must be finite and non-negative"));
        }
        Ok(Channel::White { rate })
    }

    /// White channel with the same `∫₀^∞ κ = ω₀² τ_c`.
    pub fn white_limit(&self) -> Channel {
        match *self {
            Channel::OrnsteinUhlenbeck { variance, tau_c } => Channel::White { rate: variance * tau_c },
            other => other,
        }
    }

    pub fn is_silent(&self) -> bool {
        match *self {
            Channel::Silent => true,
            Channel::OrnsteinUhlenbeck { variance, .. } => variance == 0.0,
            Channel::White { rate } => rate == 0.0,
        }
    }

    pub fn kappa(&self, dt: f64) -> Result<f64> {
        match *self {
            Channel::Silent => Ok(0.0),
            Channel::OrnsteinUhlenbeck { variance, tau_c } => Ok(variance * math::exp(-dt.abs() / tau_c)),
            Channel::White { .. } => Err(Error::WhiteNoiseKappa),
        }
    }

    /// `Γ(t, Ω)`.
    pub fn gamma(&self, t: f64, omega: f64) -> Result<Complex64> {
        check_time(t)?;
        Ok(match *self {
            Channel::Silent => Complex64::new(0.0, 0.0),
            Channel::White { rate } => Complex64::new(rate * t, 0.0),
            Channel::OrnsteinUhlenbeck { variance, tau_c } => {
                let z = Complex64::new(1.0 / tau_c, -omega) * t;
                g(z) * (variance * t * t)
            }
        })
    }

    /// `∂Γ(t, Ω)/∂Ω`.
    pub fn gamma_derivative(&self, t: f64, omega: f64) -> Result<Complex64> {
        check_time(t)?;
        Ok(match *self {
            Channel::Silent | Channel::White { .. } => Complex64::new(0.0, 0.0),
            Channel::OrnsteinUhlenbeck { variance, tau_c } => {
                // Γ = ω₀² t² g(a t) with a = 1/τ_c - iΩ, so ∂_Ω = -i t ∂_z.
                let z = Complex64::new(1.0 / tau_c, -omega) * t;
                g_prime(z) * Complex64::new(0.0, -variance * t * t * t)
            }
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 30;

/// `g(z) = (z - 1 + e^{-z}) / z²`, series near zero to avoid cancellation.
fn g(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        // Σ (-z)^n / (n+2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for n in 1..SERIES_TERMS {
            term *= -z / (n as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (z - 1.0 + (-z).exp()) / (z * z)
    }
}

/// `g'(z) = [(1 - e^{-z}) z - 2(z - 1 + e^{-z})] / z³`.
fn g_prime(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        // Σ_{n≥1} n (-1)^n z^{n-1} / (n+2)!
        let mut power = Complex64::new(1.0, 0.0); // (-z)^{n-1}
        let mut fact = 6.0; // (n+2)!
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 1..SERIES_TERMS {
            sum -= power * (n as f64 / fact);
            power *= -z;
            fact *= n as f64 + 3.0;
        }
        sum
    } else {
        let e = (-z).exp();
        ((-e + 1.0) * z - (z - 1.0 + e) * 2.0) / (z * z * z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Perpendicular,
    Z,
}

/// Independent `z` and perpendicular channels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub perp: Channel,
    pub z: Channel,
}

impl NoiseModel {
    pub fn new(perp: Channel, z: Channel) -> Self {
        Self { perp, z }
    }

    pub fn noiseless() -> Self {
        Self::new(Channel::Silent, Channel::Silent)
    }

    /// All three components with the same statistics.
    pub fn isotropic(channel: Channel) -> Self {
        Self::new(channel, channel)
    }

    /// Perpendicular noise only (`ω_z = 0`).
    pub fn transverse(channel: Channel) -> Self {
        Self::new(channel, Channel::Silent)
    }

    pub fn longitudinal(channel: Channel) -> Self {
        Self::new(Channel::Silent, channel)
    }

    pub fn channel(&self, axis: Axis) -> &Channel {
        match axis {
            Axis::Perpendicular => &self.perp,
            Axis::Z => &self.z,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.perp.is_silent() && self.z.is_silent()
    }

    /// Same model with every OU channel replaced by its white-noise limit.
    pub fn white_limit(&self) -> Self {
        Self::new(self.perp.white_limit(), self.z.white_limit())
    }
}

pub fn kappa(model: &NoiseModel, axis: Axis, dt: f64) -> Result<f64> {
    model.channel(axis).kappa(dt)
}

pub fn gamma(model: &NoiseModel, axis: Axis, t: f64, omega: f64) -> Result<Complex64> {
    model.channel(axis).gamma(t, omega)
}

/// Decay exponents at `(t, Ω)`: `Γ₀` from the `z` channel at `Ω = 0`,
/// `Γ± ` from the perpendicular channel at `Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRates {
    pub t: f64,
    pub omega: f64,
    pub gamma0: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub d_gamma_plus: f64,
    pub d_gamma_minus: f64,
}

pub fn decay_rates(model: &NoiseModel, t: f64, omega: f64) -> Result<DecayRates> {
    let gamma0 = model.z.gamma(t, 0.0)?.re;
    let perp = model.perp.gamma(t, omega)?;
    let d_perp = model.perp.gamma_derivative(t, omega)?;
    Ok(DecayRates {
        t,
        omega,
        gamma0,
        gamma_plus: perp.re,
        gamma_minus: perp.im,
        d_gamma_plus: d_perp.re,
        d_gamma_minus: d_perp.im,
    })
}

/// Random stream for trajectory `index` under `seed`. Streams are disjoint
/// ChaCha sequences, so the draw of one trajectory never depends on how
/// many others were generated before it or on which thread.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Exact OU update on an ascending grid, stationary start.
pub fn sample_ou_with<R: RngCore>(channel: &Channel, grid: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    for (i, w) in grid.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NonAscendingGrid(i + 1));
        }
    }
    match *channel {
        Channel::Silent => Ok(alloc::vec![0.0; grid.len()]),
        Channel::White { .. } => Err(Error::InvalidNoise("white noise cannot be sampled on a grid")),
        Channel::OrnsteinUhlenbeck { variance, tau_c } => {
            let sigma = math::sqrt(variance);
            let mut out = Vec::with_capacity(grid.len());
            let mut prev_t = match grid.first() {
                Some(&t0) => t0,
                None => return Ok(out),
            };
            let draw = |rng: &mut R| -> f64 { StandardNormal.sample(rng) };
            let mut w = sigma * draw(rng);
            out.push(w);
            for &t in &grid[1..] {
                let decay = math::exp(-(t - prev_t) / tau_c);
                w = w * decay + sigma * math::sqrt(1.0 - decay * decay) * draw(rng);
                out.push(w);
                prev_t = t;
            }
            Ok(out)
        }
    }
}

pub fn sample_ou_trajectory(model: &NoiseModel, axis: Axis, grid: &[f64], seed: u64) -> Result<Vec<f64>> {
    let mut rng = trajectory_rng(seed, 0);
    sample_ou_with(model.channel(axis), grid, &mut rng)
}
