use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "bispec", version, about = "Quaternion spectral analysis of bivariate signals")]
pub struct Cli {
    /// Worker threads for parallel stages. Defaults to the available
    /// parallelism. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a signal from a spec file and write it as t,u,v CSV.
    Simulate(SimulateArgs),
    /// Estimate the spectral density of a signal CSV.
    Estimate(EstimateArgs),
    /// Average spectrum CSVs bin by bin and re-derive the polarization.
    Average(AverageArgs),
    /// Bias of the averaged degree-of-polarization estimate.
    BiasStudy(BiasStudyArgs),
    /// Tone in partially polarized noise: theory, averaged periodogram and
    /// averaged multitaper estimate.
    Section5(Section5Args),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Key-value signal spec file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Number of samples; overrides `n` in the spec file.
    #[arg(long)]
    pub n: Option<usize>,
    /// Master seed; overrides `seed` in the spec file. Default 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replicate index, selecting an independent noise stream under the
    /// same seed.
    #[arg(long, default_value_t = 0)]
    pub replicate: u32,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Periodogram,
    Multitaper,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Signal CSV with columns t,u,v.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Periodogram)]
    pub method: Method,
    /// Number of Slepian tapers (multitaper only, default 5).
    #[arg(long)]
    pub k: Option<usize>,
    /// Time-bandwidth product NW (multitaper only, default 4).
    #[arg(long)]
    pub nw: Option<f64>,
    /// Use the single rectangular taper 1/sqrt(N) instead of Slepian
    /// tapers (multitaper only).
    #[arg(long)]
    pub rectangular: bool,
    /// Write all N bins instead of the non-negative frequencies 0..=N/2.
    #[arg(long)]
    pub full_spectrum: bool,
    /// Also write Poincaré coordinates (nu, phi, two_theta, two_chi).
    #[arg(long)]
    pub poincare: Option<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AverageArgs {
    /// Spectrum CSVs written by `estimate`, all on the same frequency grid.
    #[arg(required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BiasStudyArgs {
    /// Key-value config (phi_grid, m_values, n, replicates, seed, theta).
    /// Missing keys use the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Section5Args {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of averaged realizations.
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 4.0)]
    pub nw: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
