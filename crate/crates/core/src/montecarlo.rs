//! Monte-Carlo reference engine: average of `U ρ₀ U†` over sampled noise
//! trajectories, each propagated with piecewise-constant generators sampled
//! at step midpoints.
//!
//! Trajectories are grouped into a fixed number of contiguous batches. A
//! batch sum depends only on `(seed, batch index)`, and batch sums are
//! combined in batch order, so a parallel driver that evaluates batches on
//! any number of threads reproduces [`evolve_montecarlo`] bit for bit.

use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::EvolutionSpec;
use crate::math;
use crate::noise::{sample_ou_with, trajectory_rng, Channel};
use crate::spin::{self, CMatrix, SpinOperators};

pub const MIN_BATCHES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloConfig {
    pub n_traj: usize,
    pub dt: f64,
    pub seed: u64,
    pub n_batches: usize,
}

impl MonteCarloConfig {
    pub fn new(n_traj: usize, dt: f64, seed: u64) -> Self {
        Self {
            n_traj,
            dt,
            seed,
            n_batches: n_traj.clamp(1, 100),
        }
    }

    pub fn with_batches(mut self, n_batches: usize) -> Self {
        self.n_batches = n_batches;
        self
    }

    /// Rejects step sizes that do not resolve the noise or the rotation.
    pub fn validate(&self, spec: &EvolutionSpec) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::InvalidMonteCarlo("at least one trajectory is required"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidMonteCarlo("time step must be positive"));
        }
        if self.n_batches == 0 || self.n_batches > self.n_traj {
            return Err(Error::InvalidMonteCarlo("batch count must be in 1..=n_traj"));
        }
        let mut strongest: f64 = 0.0;
        for ch in [&spec.noise.perp, &spec.noise.z] {
            match *ch {
                Channel::Silent => {}
                Channel::White { rate: 0.0 } => {}
                Channel::White { .. } => {
                    return Err(Error::InvalidMonteCarlo("white noise has no trajectory sampler"));
                }
                Channel::OrnsteinUhlenbeck { variance, tau_c } => {
                    if variance > 0.0 && self.dt > tau_c / 20.0 {
                        return Err(Error::InvalidMonteCarlo("time step exceeds tau_c / 20"));
                    }
                    strongest = strongest.max(math::sqrt(variance));
                }
            }
        }
        if self.dt * (spec.omega.abs() + 3.0 * strongest) > 0.1 {
            return Err(Error::InvalidMonteCarlo("time step does not resolve the rotation"));
        }
        Ok(())
    }

    /// Steps and effective step so that an integer number of steps spans `tau`.
    pub fn steps(&self, tau: f64) -> (usize, f64) {
        if tau == 0.0 {
            return (0, 0.0);
        }
        let n = libm::ceil(tau / self.dt - 1e-9).max(1.0) as usize;
        (n, tau / n as f64)
    }

    pub fn batch_range(&self, batch: usize) -> Range<u64> {
        let n = self.n_traj as u64;
        let b = self.n_batches as u64;
        let batch = batch as u64;
        (batch * n / b)..((batch + 1) * n / b)
    }
}

/// Unitary of one trajectory.
pub fn trajectory_unitary(spec: &EvolutionSpec, ops: &SpinOperators, cfg: &MonteCarloConfig, index: u64) -> Result<CMatrix> {
    let (steps, dt) = cfg.steps(spec.tau);
    let mut u = spec.system.identity();
    if steps == 0 {
        return Ok(u);
    }
    let grid: Vec<f64> = (0..steps).map(|k| (k as f64 + 0.5) * dt).collect();
    let mut rng = trajectory_rng(cfg.seed, index);
    let wx = sample_ou_with(&spec.noise.perp, &grid, &mut rng)?;
    let wy = sample_ou_with(&spec.noise.perp, &grid, &mut rng)?;
    let wz = sample_ou_with(&spec.noise.z, &grid, &mut rng)?;
    if spec.noise.perp.is_silent() {
        // Commuting generators: the product of steps is one diagonal phase.
        let angle: f64 = wz.iter().map(|w| (spec.omega + w) * dt).sum();
        for i in 0..spec.system.dim() {
            u[(i, i)] = Complex64::from_polar(1.0, -angle * spec.system.magnetic(i));
        }
        return Ok(u);
    }
    for k in 0..steps {
        let h = &ops.jz * Complex64::new(spec.omega + wz[k], 0.0)
            + &ops.jx * Complex64::new(wx[k], 0.0)
            + &ops.jy * Complex64::new(wy[k], 0.0);
        let step = spin::unitary_from_generator(&h, dt)?;
        u = step * u;
    }
    Ok(u)
}

/// Sum of `U ρ₀ U†` over the trajectories of one batch.
pub fn run_batch(spec: &EvolutionSpec, ops: &SpinOperators, cfg: &MonteCarloConfig, batch: usize) -> Result<CMatrix> {
    let mut sum = spec.system.zeros();
    for index in cfg.batch_range(batch) {
        let u = trajectory_unitary(spec, ops, cfg, index)?;
        sum += spin::conjugate(&u, &spec.rho0);
    }
    Ok(sum)
}

#[derive(Clone, Debug)]
pub struct MonteCarloResult {
    pub rho: CMatrix,
    /// Standard error of the real part of each entry, from batch means.
    pub stderr_re: DMatrix<f64>,
    pub stderr_im: DMatrix<f64>,
    /// Largest entrywise standard error.
    pub stderr_scale: f64,
    pub n_traj: usize,
}

/// Combines batch sums in order.
pub fn combine_batches(cfg: &MonteCarloConfig, sums: &[CMatrix]) -> MonteCarloResult {
    let dim = sums[0].nrows();
    let mut total = CMatrix::zeros(dim, dim);
    for s in sums {
        total += s;
    }
    let rho = total / Complex64::new(cfg.n_traj as f64, 0.0);
    let b = sums.len();
    let mut var_re = DMatrix::<f64>::zeros(dim, dim);
    let mut var_im = DMatrix::<f64>::zeros(dim, dim);
    if b > 1 {
        for (i, s) in sums.iter().enumerate() {
            let count = cfg.batch_range(i).count() as f64;
            for r in 0..dim {
                for c in 0..dim {
                    let d = s[(r, c)] / count - rho[(r, c)];
                    var_re[(r, c)] += d.re * d.re;
                    var_im[(r, c)] += d.im * d.im;
                }
            }
        }
    }
    let denom = (b * b.saturating_sub(1)).max(1) as f64;
    let stderr_re = var_re.map(|v| math::sqrt(v / denom));
    let stderr_im = var_im.map(|v| math::sqrt(v / denom));
    let stderr_scale = stderr_re.iter().chain(stderr_im.iter()).fold(0.0f64, |a, &v| a.max(v));
    MonteCarloResult {
        rho,
        stderr_re,
        stderr_im,
        stderr_scale,
        n_traj: cfg.n_traj,
    }
}

/// Sequential Monte-Carlo average.
pub fn evolve_montecarlo(spec: &EvolutionSpec, cfg: &MonteCarloConfig) -> Result<MonteCarloResult> {
    cfg.validate(spec)?;
    let ops = SpinOperators::new(spec.system);
    let sums = (0..cfg.n_batches)
        .map(|b| run_batch(spec, &ops, cfg, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_batches(cfg, &sums))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::unitary_imprint;
    use crate::noise::NoiseModel;
    use crate::spin::{max_abs, SpinSystem};
    use crate::states::make_noon;

    fn spec(noise: NoiseModel) -> EvolutionSpec {
        let s = SpinSystem::new(3).unwrap();
        EvolutionSpec::new(s, make_noon(s), noise, 0.8, 1.0).unwrap()
    }

    #[test]
    fn noiseless_single_trajectory_is_exact() {
        let sp = spec(NoiseModel::noiseless());
        let cfg = MonteCarloConfig::new(1, 0.01, 3);
        let out = evolve_montecarlo(&sp, &cfg).unwrap();
        let expect = unitary_imprint(sp.system, &sp.rho0, 0.8);
        assert!(max_abs(&(out.rho - expect)) < 1e-12);
        assert_eq!(out.stderr_scale, 0.0);
    }

    #[test]
    fn config_validation() {
        let ou = NoiseModel::isotropic(Channel::ornstein_uhlenbeck(1.0, 1.0).unwrap());
        let sp = spec(ou);
        assert!(MonteCarloConfig::new(100, 0.1, 1).validate(&sp).is_err());
        assert!(MonteCarloConfig::new(100, 0.02, 1).validate(&sp).is_ok());
        assert!(MonteCarloConfig::new(0, 0.02, 1).validate(&sp).is_err());
        let fast = sp.with_omega(10.0);
        assert!(MonteCarloConfig::new(100, 0.02, 1).validate(&fast).is_err());
        let white = spec(NoiseModel::isotropic(Channel::white(1.0).unwrap()));
        assert!(MonteCarloConfig::new(100, 0.01, 1).validate(&white).is_err());
    }

    #[test]
    fn batches_partition_trajectories() {
        let cfg = MonteCarloConfig::new(1003, 0.01, 0).with_batches(20);
        let mut next = 0;
        for b in 0..20 {
            let r = cfg.batch_range(b);
            assert_eq!(r.start, next);
            next = r.end;
        }
        assert_eq!(next, 1003);
    }

    #[test]
    fn trajectories_are_unitary() {
        let sp = spec(NoiseModel::isotropic(Channel::ornstein_uhlenbeck(1.0, 1.0).unwrap()));
        let cfg = MonteCarloConfig::new(20, 0.02, 9);
        let ops = SpinOperators::new(sp.system);
        for i in 0..5 {
            let u = trajectory_unitary(&sp, &ops, &cfg, i).unwrap();
            let id = &u * u.adjoint();
            assert!(max_abs(&(id - sp.system.identity())) < 1e-12);
        }
    }
}
