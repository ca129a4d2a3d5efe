//! `bogoscatter`: parameter sweeps, figure tables, physical-unit conversion
//! and oracle verification on top of `bogoscatter-core`.

mod cache;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bogoscatter", version, about = "Effective scattering lengths of Bogoliubov quasi-particles")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Cache directory (default: $BOGOSCATTER_CACHE_DIR or the user cache dir).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Upper truncation of energy integrals, in k_B T.
    #[arg(long, global = true)]
    pub e_max: Option<f64>,
    #[arg(long, global = true)]
    pub max_subdivisions: Option<usize>,
    #[arg(long, global = true)]
    pub kernel_form: Option<KernelFormArg>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Effective NN scattering length curves.
    AlphaT(CurveArgs),
    /// Effective NC scattering length curves.
    AlphaS(AlphaSArgs),
    /// Low-energy fraction, its mean scattering length and population means.
    Populations(PopulationArgs),
    /// Convert laboratory parameters to the scaled condensate density.
    Params(ParamsArgs),
    /// Global constant kernel fitted to the NN curve.
    Sigma0(Sigma0Args),
    /// Condensate growth rate for a scaled equilibrium distribution.
    GrowthRate(GrowthArgs),
    /// Monte Carlo cross-checks of the analytic angular reductions.
    Verify(VerifyArgs),
    /// Scaled densities of the tabulated species.
    Table1,
}

#[derive(Args, Debug, Default)]
pub struct GridArgs {
    /// Lowest grid energy as a fraction of nbar.
    #[arg(long)]
    pub emin_frac: Option<f64>,
    #[arg(long)]
    pub emax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Comma-separated condensate densities.
    #[arg(long)]
    pub nbar: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct AlphaSArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long)]
    pub mode: Option<ModeArg>,
}

#[derive(Args, Debug)]
pub struct PopulationArgs {
    /// Comma-separated condensate densities.
    #[arg(long, conflicts_with = "nbar_log")]
    pub nbar: Option<String>,
    /// Log-spaced densities `lo:hi:count`.
    #[arg(long)]
    pub nbar_log: Option<String>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub dos: Option<DosArg>,
    #[arg(long)]
    pub mode: Option<ModeArg>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub gas: GasArgs,
}

#[derive(Args, Debug, Default)]
pub struct GasArgs {
    /// o-Ps, 87Rb or 23Na.
    #[arg(long)]
    pub species: Option<String>,
    /// Number density, e.g. `1e-3nm-3` or `1e24m-3` (bare numbers are nm^-3).
    #[arg(long)]
    pub density: Option<String>,
    /// Condensed fraction n_c/n fixing the temperature.
    #[arg(long, conflicts_with_all = ["temperature_ratio", "temperature"])]
    pub fraction: Option<f64>,
    /// T / T_c.
    #[arg(long, conflicts_with = "temperature")]
    pub temperature_ratio: Option<f64>,
    /// Absolute temperature, K.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Custom mass, kg (overrides the species value).
    #[arg(long)]
    pub mass_kg: Option<f64>,
    /// Custom bare scattering length, nm.
    #[arg(long)]
    pub a0_nm: Option<f64>,
}

#[derive(Args, Debug)]
pub struct Sigma0Args {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long)]
    pub dos: Option<DosArg>,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    /// Comma-separated condensate densities.
    #[arg(long)]
    pub nbar: Option<String>,
    /// Comma-separated factors multiplying the equilibrium occupation.
    #[arg(long)]
    pub scale: Option<String>,
    /// Take nbar from a physical gas and report absolute prefactors.
    #[command(flatten)]
    pub gas: GasArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Break the momentum window of the quadrature to show the oracle notices.
    #[arg(long, hide = true)]
    pub mutate_zeta: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFormArg {
    AsPrinted,
    SymmetrizedLiterature,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DosArg {
    Derived,
    AsPrinted,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Consistent,
    #[value(alias = "as-printed-eq15")]
    AsPrinted,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bogoscatter: {e}");
            e.exit_code()
        }
    }
}
