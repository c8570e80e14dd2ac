//! Command-line flags, the flat `key=value` config file and their resolution
//! into a [`RunConfig`]. Every dimensionful quantity is expressed in units of
//! the perpendicular correlation time, so `τ_c = 1` internally.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use memspin_core::noise::{Channel, NoiseModel};
use memspin_core::states::default_gamma_grid;

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "memspin", version, about = "Collective-spin phase estimation under colored noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transverse damping factor exp(-Γ₊) against time, with the white-noise reference.
    Damping(Flags),
    /// QFI per τ² across Bose-Hubbard ground states: noiseless, colored and white noise.
    QfiSweep(Flags),
    /// Tensor-rank weights K_m of the Bose-Hubbard ground states.
    KmMap(Flags),
    /// QFI and pulsed population-imbalance CFI across the γ grid.
    CfiImbalance(Flags),
    /// Density-fringe sensitivity F̃ across the γ grid.
    Ftilde(Flags),
    /// Monte-Carlo trajectories against the analytic engine.
    McValidate(Flags),
}

impl Command {
    pub fn flags(&self) -> &Flags {
        match self {
            Command::Damping(f)
            | Command::QfiSweep(f)
            | Command::KmMap(f)
            | Command::CfiImbalance(f)
            | Command::Ftilde(f)
            | Command::McValidate(f) => f,
        }
    }

    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Damping(_) => CommandKind::Damping,
            Command::QfiSweep(_) => CommandKind::QfiSweep,
            Command::KmMap(_) => CommandKind::KmMap,
            Command::CfiImbalance(_) => CommandKind::CfiImbalance,
            Command::Ftilde(_) => CommandKind::Ftilde,
            Command::McValidate(_) => CommandKind::McValidate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    Ou,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ZSpec {
    #[value(name = "0")]
    Off,
    Isotropic,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Noon,
    Css,
    Bh,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Args)]
#[command(args_override_self = true)]
pub struct Flags {
    /// Particle number N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Single interaction ratio γ ≤ 0.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_grid")]
    pub gamma: Option<f64>,
    /// γ grid: a point count for the default log grid, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_grid: Option<String>,
    /// Ωτ_c, one value or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub omega_tc: Option<String>,
    /// Perpendicular noise strength ω₀τ_c.
    #[arg(long)]
    pub w0_tc: Option<f64>,
    /// Imprint time τ/τ_c (damping: end of the time grid), one value or a list.
    #[arg(long)]
    pub tau_over_tc: Option<String>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseKind>,
    /// z channel: none, same as the perpendicular one, or set by --wz-w0-tc / --wz-tc.
    #[arg(long, value_enum)]
    pub wz: Option<ZSpec>,
    /// z-channel strength ω_z τ_c for --wz custom.
    #[arg(long)]
    pub wz_w0_tc: Option<f64>,
    /// z-channel correlation time in units of τ_c for --wz custom.
    #[arg(long)]
    pub wz_tc: Option<f64>,
    /// Probe state for mc-validate.
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Time-grid points for damping.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub ntraj: Option<usize>,
    /// Monte-Carlo step in units of τ_c.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo batches (fixes the standard-error estimate and the work split).
    #[arg(long)]
    pub batches: Option<usize>,
    /// Trace-distance threshold for mc-validate in the non-commuting case.
    #[arg(long)]
    pub max_distance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat key=value file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Damping,
    QfiSweep,
    KmMap,
    CfiImbalance,
    Ftilde,
    McValidate,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Damping => "damping",
            CommandKind::QfiSweep => "qfi-sweep",
            CommandKind::KmMap => "km-map",
            CommandKind::CfiImbalance => "cfi-imbalance",
            CommandKind::Ftilde => "ftilde",
            CommandKind::McValidate => "mc-validate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloSettings {
    pub ntraj: usize,
    /// `None` picks the largest step the validator accepts, capped at 0.01.
    pub dt: Option<f64>,
    pub seed: u64,
    pub batches: usize,
    pub max_distance: f64,
}

/// Fully resolved run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: usize,
    pub gammas: Vec<f64>,
    pub omegas: Vec<f64>,
    pub taus: Vec<f64>,
    pub w0: f64,
    pub noise: NoiseKind,
    pub wz: ZSpec,
    pub wz_w0: f64,
    pub wz_tc: f64,
    pub state: StateKind,
    pub points: usize,
    pub mc: MonteCarloSettings,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Defaults reproduce the corresponding figure.
    pub fn defaults(command: CommandKind) -> Self {
        let (n, omegas, taus, wz) = match command {
            CommandKind::Damping => (1, vec![0.0, 2.5, 10.0], vec![3.0], ZSpec::Off),
            CommandKind::CfiImbalance => (100, vec![2.5, 5.0, 10.0], vec![0.5], ZSpec::Off),
            CommandKind::McValidate => (4, vec![1.0], vec![0.25], ZSpec::Isotropic),
            _ => (100, vec![10.0], vec![0.5], ZSpec::Off),
        };
        Self {
            command,
            n,
            gammas: default_gamma_grid(21),
            omegas,
            taus,
            w0: 1.0,
            noise: NoiseKind::Ou,
            wz,
            wz_w0: 1.0,
            wz_tc: 1.0,
            state: StateKind::Css,
            points: 61,
            mc: MonteCarloSettings {
                ntraj: 10_000,
                dt: None,
                seed: 1,
                batches: 100,
                max_distance: 0.02,
            },
            out: None,
            format: Format::Csv,
        }
    }

    pub fn resolve(command: CommandKind, f: &Flags) -> Result<Self> {
        let mut c = Self::defaults(command);
        if let Some(n) = f.n {
            c.n = n;
        }
        if let Some(g) = f.gamma {
            c.gammas = vec![g];
        }
        if let Some(grid) = &f.gamma_grid {
            c.gammas = parse_gamma_grid(grid)?;
        }
        if let Some(s) = &f.omega_tc {
            c.omegas = parse_list("omega-tc", s)?;
        }
        if let Some(s) = &f.tau_over_tc {
            c.taus = parse_list("tau-over-tc", s)?;
        }
        set(&mut c.w0, f.w0_tc);
        set(&mut c.noise, f.noise);
        set(&mut c.wz, f.wz);
        set(&mut c.wz_w0, f.wz_w0_tc);
        set(&mut c.wz_tc, f.wz_tc);
        set(&mut c.state, f.state);
        set(&mut c.points, f.points);
        set(&mut c.mc.ntraj, f.ntraj);
        set(&mut c.mc.seed, f.seed);
        set(&mut c.mc.max_distance, f.max_distance);
        if f.dt.is_some() {
            c.mc.dt = f.dt;
        }
        match f.batches {
            Some(b) => c.mc.batches = b,
            None => c.mc.batches = c.mc.batches.min(c.mc.ntraj.max(1)),
        }
        c.out = f.out.clone();
        set(&mut c.format, f.format);
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(config("--n must be at least 1"));
        }
        let finite = |name: &str, xs: &[f64]| -> Result<()> {
            match xs.iter().find(|x| !x.is_finite()) {
                Some(x) => Err(config(format!("--{name} value {x} is not finite"))),
                None => Ok(()),
            }
        };
        finite("gamma", &self.gammas)?;
        finite("omega-tc", &self.omegas)?;
        finite("tau-over-tc", &self.taus)?;
        finite("w0-tc", &[self.w0, self.wz_w0, self.wz_tc, self.mc.max_distance])?;
        if self.gammas.iter().any(|&g| g > 0.0) {
            return Err(config("γ must be non-positive"));
        }
        if self.taus.iter().any(|&t| t < 0.0) {
            return Err(config("--tau-over-tc must be non-negative"));
        }
        if self.w0 < 0.0 || self.wz_w0 < 0.0 || self.wz_tc <= 0.0 {
            return Err(config("noise strengths must be non-negative and --wz-tc positive"));
        }
        if self.command == CommandKind::Damping && self.points < 2 {
            return Err(config("--points must be at least 2"));
        }
        if let Some(dt) = self.mc.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(config("--dt must be positive"));
            }
        }
        let single = |name: &str, xs: &[f64]| -> Result<()> {
            if xs.len() == 1 {
                Ok(())
            } else {
                Err(config(format!("{} takes a single --{name}", self.command.name())))
            }
        };
        match self.command {
            CommandKind::Damping => single("tau-over-tc", &self.taus)?,
            CommandKind::QfiSweep | CommandKind::Ftilde => {
                single("omega-tc", &self.omegas)?;
                single("tau-over-tc", &self.taus)?;
            }
            CommandKind::CfiImbalance => single("tau-over-tc", &self.taus)?,
            CommandKind::McValidate => single("omega-tc", &self.omegas)?,
            CommandKind::KmMap => {}
        }
        if self.command == CommandKind::McValidate {
            if self.state == StateKind::Bh && self.gammas.len() != 1 {
                return Err(config("mc-validate with --state bh needs a single --gamma"));
            }
            if self.mc.ntraj == 0 || self.mc.batches == 0 || self.mc.batches > self.mc.ntraj {
                return Err(config("need --ntraj ≥ 1 and 1 ≤ --batches ≤ --ntraj"));
            }
        }
        Ok(())
    }

    /// Perpendicular and z channels as requested (`--noise white` replaces
    /// each OU channel by its white limit).
    pub fn noise_model(&self) -> Result<NoiseModel> {
        let perp = Channel::ornstein_uhlenbeck(self.w0, 1.0)?;
        let z = match self.wz {
            ZSpec::Off => Channel::Silent,
            ZSpec::Isotropic => perp,
            ZSpec::Custom => Channel::ornstein_uhlenbeck(self.wz_w0, self.wz_tc)?,
        };
        let model = NoiseModel::new(perp, z);
        Ok(match self.noise {
            NoiseKind::Ou => model,
            NoiseKind::White => model.white_limit(),
        })
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_list(name: &str, s: &str) -> Result<Vec<f64>> {
    let out = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| config(format!("--{name}: cannot parse '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(config(format!("--{name} is empty")));
    }
    Ok(out)
}

fn parse_gamma_grid(s: &str) -> Result<Vec<f64>> {
    if !s.contains(',') {
        if let Ok(points) = s.trim().parse::<usize>() {
            if points < 2 {
                return Err(config("--gamma-grid point count must be at least 2"));
            }
            return Ok(default_gamma_grid(points));
        }
    }
    parse_list("gamma-grid", s)
}

/// Reads a flat `key=value` file into `--key=value` arguments. Blank lines
/// and lines starting with `#` are skipped; keys may carry a leading `--`.
pub fn read_config_file(path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key == "config" {
            return Err(config("config files cannot include other config files"));
        }
        args.push(OsString::from(format!("--{key}={}", value.trim())));
    }
    Ok(args)
}

/// Splices config-file entries in front of the command-line flags so that
/// later (command-line) occurrences win.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut iter = args.iter().skip(2);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = iter.next().map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let extra = read_config_file(&path)?;
    let mut out = args[..2].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[2..]);
    Ok(out)
}

/// Parses a full argument vector (program name first) into a run.
pub fn parse_args(args: Vec<OsString>) -> std::result::Result<RunConfig, ParseOutcome> {
    let args = expand_args(args).map_err(ParseOutcome::Invalid)?;
    let cli = Cli::try_parse_from(args).map_err(ParseOutcome::Clap)?;
    RunConfig::resolve(cli.command.kind(), cli.command.flags()).map_err(ParseOutcome::Invalid)
}

#[derive(Debug)]
pub enum ParseOutcome {
    /// Usage errors, `--help` and `--version`, rendered by clap.
    Clap(clap::Error),
    Invalid(CliError),
}
