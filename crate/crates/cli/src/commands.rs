//! The figure and validation commands. Each returns a [`Table`] whose rows
//! are in parameter order regardless of how the sweep was scheduled.

use memspin_core::evolution::{evolve_analytic, EvolutionSpec};
use memspin_core::metrology::{cfi_imbalance, ftilde_density, qfi_exact, Pulse};
use memspin_core::montecarlo::MonteCarloConfig;
use memspin_core::noise::{Channel, NoiseModel};
use memspin_core::spin::{trace_distance, CMatrix, SpinSystem};
use memspin_core::states::{make_bh_ground, make_css, make_noon};
use memspin_core::tensor::TensorBasis;
use memspin_core::Error as CoreError;
use rayon::prelude::*;

use crate::config::{CommandKind, RunConfig, StateKind};
use crate::error::{CliError, Result};
use crate::montecarlo::evolve_montecarlo_parallel;
use crate::output::{Cell, Table};

pub fn run(config: &RunConfig) -> Result<Table> {
    match config.command {
        CommandKind::Damping => damping(config),
        CommandKind::QfiSweep => qfi_sweep(config),
        CommandKind::KmMap => km_map(config),
        CommandKind::CfiImbalance => cfi_sweep(config),
        CommandKind::Ftilde => ftilde(config),
        CommandKind::McValidate => mc_validate(config),
    }
}

/// Evaluates `f` on every point in parallel, keeping input order.
fn sweep<P: Sync, F>(points: &[P], f: F) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(&P) -> Result<Vec<Vec<Cell>>> + Sync + Send,
{
    let chunks = points.par_iter().map(f).collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn fill(table: &mut Table, rows: Vec<Vec<Cell>>) {
    for r in rows {
        table.push(r);
    }
}

fn single_tau(config: &RunConfig) -> Result<f64> {
    let tau = config.taus[0];
    if !(tau > 0.0) {
        return Err(CliError::Config(format!("{} needs --tau-over-tc > 0", config.command.name())));
    }
    Ok(tau)
}

fn system(config: &RunConfig) -> Result<SpinSystem> {
    Ok(SpinSystem::new(config.n)?)
}

fn damping(config: &RunConfig) -> Result<Table> {
    let mut table = Table::new("damping", &["t/τ_c", "Ωτ_c", "exp(−Γ₊)", "exp(−t/T)"]);
    let perp = config.noise_model()?.perp;
    // ∫₀^∞ κ = ω₀² τ_c with τ_c = 1
    let white_rate = config.w0 * config.w0;
    let t_max = config.taus[0];
    let times: Vec<f64> = (0..config.points).map(|i| t_max * i as f64 / (config.points - 1) as f64).collect();
    let pairs: Vec<(f64, f64)> = config.omegas.iter().flat_map(|&o| times.iter().map(move |&t| (o, t))).collect();
    let rows = sweep(&pairs, |&(omega, t)| {
        let g = perp.gamma(t, omega)?.re;
        Ok(vec![vec![Cell::Num(t), Cell::Num(omega), Cell::Num((-g).exp()), Cell::Num((-white_rate * t).exp())]])
    })?;
    fill(&mut table, rows);
    Ok(table)
}

fn qfi_sweep(config: &RunConfig) -> Result<Table> {
    let mut table = Table::new("qfi-sweep", &["γ", "F_Q/τ² noiseless", "F_Q/τ² colored", "F_Q/τ² white"]);
    let s = system(config)?;
    let basis = TensorBasis::new(s);
    let tau = single_tau(config)?;
    let omega = config.omegas[0];
    let colored = config.noise_model()?;
    let white = colored.white_limit();
    let rows = sweep(&config.gammas, |&g| {
        let rho = make_bh_ground(s, g)?;
        let q = |noise: NoiseModel| -> Result<f64> {
            let spec = EvolutionSpec::new(s, rho.clone(), noise, omega, tau)?;
            Ok(qfi_exact(&spec, &basis)? / (tau * tau))
        };
        Ok(vec![vec![
            Cell::Num(g),
            Cell::Num(q(NoiseModel::noiseless())?),
            Cell::Num(q(colored)?),
            Cell::Num(q(white)?),
        ]])
    })?;
    fill(&mut table, rows);
    Ok(table)
}

fn km_map(config: &RunConfig) -> Result<Table> {
    let mut table = Table::new("km-map", &["γ", "m", "K_m"]);
    let s = system(config)?;
    let basis = TensorBasis::new(s);
    let rows = sweep(&config.gammas, |&g| {
        let km = basis.km_distribution(&make_bh_ground(s, g)?)?;
        Ok(km.iter().enumerate().map(|(m, &k)| vec![Cell::Num(g), Cell::Int(m as i64), Cell::Num(k)]).collect())
    })?;
    fill(&mut table, rows);
    Ok(table)
}

fn cfi_sweep(config: &RunConfig) -> Result<Table> {
    let mut table = Table::new("cfi-imbalance", &["γ", "Ωτ_c", "F_Q/τ²", "F/τ²"]);
    let s = system(config)?;
    let basis = TensorBasis::new(s);
    let tau = single_tau(config)?;
    let noise = config.noise_model()?;
    let pairs: Vec<(f64, f64)> = config.omegas.iter().flat_map(|&o| config.gammas.iter().map(move |&g| (o, g))).collect();
    let rows = sweep(&pairs, |&(omega, g)| {
        let spec = EvolutionSpec::new(s, make_bh_ground(s, g)?, noise, omega, tau)?;
        let q = qfi_exact(&spec, &basis)?;
        let f = cfi_imbalance(&spec, &basis, Pulse::HalfPiX)?;
        Ok(vec![vec![Cell::Num(g), Cell::Num(omega), Cell::Num(q / (tau * tau)), Cell::Num(f / (tau * tau))]])
    })?;
    fill(&mut table, rows);
    Ok(table)
}

/// `F̃` or NaN where the moment expansion leaves it undefined.
fn ftilde_or_nan(spec: &EvolutionSpec) -> Result<f64> {
    match ftilde_density(spec) {
        Ok(v) => Ok(v),
        Err(CoreError::OutOfDomain(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

fn ftilde(config: &RunConfig) -> Result<Table> {
    let mut table = Table::new("ftilde", &["γ", "F̃/τ² noisy", "F̃/τ² noiseless max", "F_Q/τ²"]);
    let s = system(config)?;
    let basis = TensorBasis::new(s);
    let tau = single_tau(config)?;
    let omega = config.omegas[0];
    let noise = config.noise_model()?;
    let rows = sweep(&config.gammas, |&g| {
        let noisy = EvolutionSpec::new(s, make_bh_ground(s, g)?, noise, omega, tau)?;
        let clean = EvolutionSpec::new(s, noisy.rho0.clone(), NoiseModel::noiseless(), omega, tau)?;
        let t2 = tau * tau;
        Ok(vec![vec![
            Cell::Num(g),
            Cell::Num(ftilde_or_nan(&noisy)? / t2),
            Cell::Num(ftilde_or_nan(&clean)? / t2),
            Cell::Num(qfi_exact(&noisy, &basis)? / t2),
        ]])
    })?;
    fill(&mut table, rows);
    Ok(table)
}

fn probe(config: &RunConfig, s: SpinSystem) -> Result<CMatrix> {
    Ok(match config.state {
        StateKind::Noon => make_noon(s),
        StateKind::Css => make_css(s),
        StateKind::Bh => make_bh_ground(s, config.gammas[0])?,
    })
}

/// Largest step the Monte-Carlo validator accepts for this noise, capped at 0.01 τ_c.
fn default_dt(noise: &NoiseModel, omega: f64) -> f64 {
    let mut dt: f64 = 0.01;
    let mut strongest: f64 = 0.0;
    for ch in [noise.perp, noise.z] {
        if let Channel::OrnsteinUhlenbeck { variance, tau_c } = ch {
            if variance > 0.0 {
                dt = dt.min(tau_c / 20.0);
            }
            strongest = strongest.max(variance.sqrt());
        }
    }
    dt.min(0.099 / (omega.abs() + 3.0 * strongest).max(1e-300))
}

fn mc_validate(config: &RunConfig) -> Result<Table> {
    let mut table = Table::new(
        "mc-validate",
        &["t/τ_c", "trace distance", "max |Δρ|/stderr", "stderr", "criterion", "pass"],
    );
    let s = system(config)?;
    let basis = TensorBasis::new(s);
    let noise = config.noise_model()?;
    let omega = config.omegas[0];
    let rho0 = probe(config, s)?;
    let dt = config.mc.dt.unwrap_or_else(|| default_dt(&noise, omega));
    let mc_cfg = MonteCarloConfig::new(config.mc.ntraj, dt, config.mc.seed).with_batches(config.mc.batches);
    // Commuting generators: the cumulant result is exact and every entry is
    // held to its own standard error.
    let exact_case = noise.perp.is_silent();
    for &tau in &config.taus {
        let spec = EvolutionSpec::new(s, rho0.clone(), noise, omega, tau)?;
        let analytic = evolve_analytic(&spec, &basis)?;
        let mc = evolve_montecarlo_parallel(&spec, &mc_cfg)?;
        let distance = trace_distance(&mc.rho, &analytic);
        let mut worst: f64 = 0.0;
        let mut within = true;
        for r in 0..s.dim() {
            for c in 0..s.dim() {
                let d = mc.rho[(r, c)] - analytic[(r, c)];
                for (dev, se) in [(d.re.abs(), mc.stderr_re[(r, c)]), (d.im.abs(), mc.stderr_im[(r, c)])] {
                    within &= dev <= 3.0 * se + 1e-12;
                    if dev > 1e-12 {
                        worst = worst.max(if se > 0.0 { dev / se } else { f64::INFINITY });
                    }
                }
            }
        }
        let (criterion, pass) = if exact_case {
            ("entrywise 3 stderr", within)
        } else {
            ("trace distance", distance <= config.mc.max_distance)
        };
        table.push(vec![
            Cell::Num(tau),
            Cell::Num(distance),
            Cell::Num(worst),
            Cell::Num(mc.stderr_scale),
            Cell::Text(criterion.into()),
            Cell::Text(pass.to_string()),
        ]);
    }
    Ok(table)
}
