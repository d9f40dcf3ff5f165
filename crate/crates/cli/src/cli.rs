use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ucp_core::analysis::Method;

use crate::config::{Format, RunConfig, UsageError};

#[derive(Debug, Parser)]
#[command(name = "ucp", version, about = "Transmission through unified Cantor potentials (hbar=1, 2m=1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec against the construction constraints.
    Validate(Common),
    /// Leaf segments as index,start,end,width.
    Layout(Common),
    /// T and R at one wavenumber.
    Transmit(TransmitArgs),
    /// T(k) over a uniform k grid.
    Sweep(SweepArgs),
    /// T over a ρ–k grid.
    Grid(GridArgs),
    /// Sup-norm |log10 T| distances between stages.
    Saturate(SaturateArgs),
    /// Log-log slope of R at large k under area-preserved heights.
    Scaling(ScalingArgs),
    /// Transmission peaks above a threshold.
    Resonances(ResonanceArgs),
    /// Fractal dimension and lacunarity descriptors.
    Descriptors(Common),
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long = "S")]
    pub stages: Option<usize>,
    #[arg(long = "L", allow_negative_numbers = true)]
    pub length: Option<f64>,
    #[arg(long = "V", allow_negative_numbers = true)]
    pub height: Option<f64>,
    /// Flat `key = value` file, or a JSON output of an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct TransmitArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub method: Option<Method>,
}

#[derive(Debug, Args, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub method: Option<Method>,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub rho_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub n_rho: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub n_k: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct SaturateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated stage list, e.g. 6,12.
    #[arg(long = "stages", value_delimiter = ',')]
    pub stage_list: Option<Vec<usize>>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "V0", allow_negative_numbers = true)]
    pub v0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_hi: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub coarse: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Layout(_) => "layout",
            Command::Transmit(_) => "transmit",
            Command::Sweep(_) => "sweep",
            Command::Grid(_) => "grid",
            Command::Saturate(_) => "saturate",
            Command::Scaling(_) => "scaling",
            Command::Resonances(_) => "resonances",
            Command::Descriptors(_) => "descriptors",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Validate(c) | Command::Layout(c) | Command::Descriptors(c) => c,
            Command::Transmit(a) => &a.common,
            Command::Sweep(a) => &a.common,
            Command::Grid(a) => &a.common,
            Command::Saturate(a) => &a.common,
            Command::Scaling(a) => &a.common,
            Command::Resonances(a) => &a.common,
        }
    }

    /// Settings given as flags, as a sparse config.
    fn flags(&self) -> RunConfig {
        let c = self.common();
        let mut flags = RunConfig {
            command: self.name().to_string(),
            n: c.n,
            rho: c.rho,
            mu: c.mu,
            nu: c.nu,
            stages: c.stages,
            length: c.length,
            height: c.height,
            out: c.out.as_ref().map(|p| p.display().to_string()),
            ..Default::default()
        };
        match self {
            Command::Transmit(a) => {
                flags.k = a.k;
                flags.method = a.method;
            }
            Command::Sweep(a) => {
                flags.k_min = a.k_min;
                flags.k_max = a.k_max;
                flags.points = a.points;
                flags.method = a.method;
            }
            Command::Grid(a) => {
                flags.rho_min = a.rho_min;
                flags.rho_max = a.rho_max;
                flags.n_rho = a.n_rho;
                flags.k_min = a.k_min;
                flags.k_max = a.k_max;
                flags.n_k = a.n_k;
            }
            Command::Saturate(a) => {
                flags.stage_list = a.stage_list.clone();
                flags.k_min = a.k_min;
                flags.k_max = a.k_max;
                flags.points = a.points;
                flags.delta = a.delta;
            }
            Command::Scaling(a) => {
                flags.v0 = a.v0;
                flags.k_lo = a.k_lo;
                flags.k_hi = a.k_hi;
                flags.points = a.points;
            }
            Command::Resonances(a) => {
                flags.k_min = a.k_min;
                flags.k_max = a.k_max;
                flags.coarse = a.coarse;
                flags.threshold = a.threshold;
            }
            Command::Validate(_) | Command::Layout(_) | Command::Descriptors(_) => {}
        }
        flags
    }

    /// Config file values overlaid by explicit flags.
    pub fn resolve(&self) -> Result<RunConfig, UsageError> {
        let common = self.common();
        let mut config = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
                RunConfig::from_file_text(self.name(), &text)?
            }
            None => RunConfig { command: self.name().to_string(), ..Default::default() },
        };
        config.overlay(&self.flags());
        if let Some(format) = common.format {
            config.format = format;
        }
        if let Some(workers) = common.workers {
            config.workers = workers;
        }
        Ok(config)
    }
}
