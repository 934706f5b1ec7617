use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gdf", version, about = "Finite-size de Finetti bounds for CV QKD and their numerical checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Master seed for every stochastic computation.
    #[arg(long, env = "GDF_SEED", default_value_t = 0, global = true)]
    pub seed: u64,

    /// Worker thread cap; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Derived security parameters for one protocol configuration.
    Params(ParamsArgs),
    /// Run a numerical verification suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Simulate the energy test and its failure event.
    Simulate(SimulateArgs),
}

/// Parse a count written as an integer or in scientific notation (`1e6`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if !(v >= 0.0) || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
        return Err(format!("`{s}` is not a nonnegative integer count"));
    }
    Ok(v as u64)
}

fn parse_positive_count(s: &str) -> Result<u64, String> {
    match parse_count(s)? {
        0 => Err("count must be at least 1".into()),
        v => Ok(v),
    }
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[arg(long, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, value_parser = parse_count)]
    pub k: u64,
    #[arg(long)]
    pub da: f64,
    #[arg(long)]
    pub db: f64,
    #[arg(long)]
    pub eps_coll: f64,
    #[arg(long)]
    pub eps_test: f64,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Extremal eigenvalues of P_eta on V_{<=K} against the closed-form epsilon.
    Definetti(DefinettiArgs),
    /// Closed-form Gram matrix against the Fock-space oracle.
    Gram(GramArgs),
    /// Tail bounds against exact tails on a grid.
    Tails(TailsArgs),
    /// The scalar reduction of U <= 2T on a grid.
    Lgrc(LgrcArgs),
    /// W_u invariance of monomial vectors, with a negative control.
    Invariance(InvarianceArgs),
}

#[derive(Args, Debug)]
pub struct DefinettiArgs {
    #[arg(long, value_parser = parse_count)]
    pub n: u64,
    #[arg(long = "K", visible_alias = "cutoff")]
    pub cutoff: u32,
    #[arg(long)]
    pub eta: f64,
    #[arg(long, value_parser = parse_positive_count, default_value = "1e6")]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct GramArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "K", visible_alias = "cutoff")]
    pub cutoff: u32,
}

#[derive(Args, Debug)]
pub struct TailsArgs {
    #[arg(long, default_value_t = 50)]
    pub k_max: u64,
    #[arg(long, default_value_t = 500)]
    pub n_max: u64,
    /// Interior points of the eta and p grids.
    #[arg(long, default_value_t = 19)]
    pub grid: usize,
    /// Points per axis of the Pinsker grid.
    #[arg(long, default_value_t = 100)]
    pub pinsker_grid: usize,
}

#[derive(Args, Debug)]
pub struct LgrcArgs {
    #[arg(long, default_value_t = 50)]
    pub n_max: u64,
    #[arg(long, default_value_t = 20.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d_step: f64,
    /// Check photon numbers up to `n d + extra`.
    #[arg(long, default_value_t = 500)]
    pub extra: u64,
}

#[derive(Args, Debug)]
pub struct InvarianceArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Check every monomial up to this degree.
    #[arg(long, default_value_t = 1)]
    pub degree: u32,
    #[arg(long, value_parser = parse_positive_count, default_value = "20")]
    pub trials: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Thermal,
    Concentrated,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, value_parser = parse_count)]
    pub k: u64,
    #[arg(long)]
    pub da: f64,
    #[arg(long)]
    pub db: f64,
    /// Mean photon number per mode on Alice's side (and Bob's unless given).
    #[arg(long)]
    pub mean_photons: f64,
    #[arg(long)]
    pub mean_photons_b: Option<f64>,
    #[arg(long, value_enum, default_value_t = Model::Thermal)]
    pub model: Model,
    #[arg(long)]
    pub eps_test: f64,
    #[arg(long, value_parser = parse_positive_count)]
    pub trials: u64,
}
