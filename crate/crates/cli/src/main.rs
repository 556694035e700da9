//! `qunt`: moving-grid heat conduction benchmark, wall simulations and
//! insulation optimisation from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "qunt",
    version,
    about = "Adaptive moving-grid heat conduction and insulation sizing"
)]
struct Cli {
    /// Scenario file (TOML). Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files [default: .]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps and convergence studies [default: 1]
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nonlinear benchmark: convergence table, runtime table and mesh
    /// trajectory. Writes errors_field.csv, errors_flux.csv, runtime.csv
    /// and trajectory.csv.
    Benchmark(BenchmarkArgs),
    /// One wall over the climate period. Writes flux.csv, loads_daily.csv
    /// and loads_monthly.csv.
    Simulate(SimulateArgs),
    /// Annual loads against insulation thickness. Writes sweep.csv.
    Sweep(SweepArgs),
    /// Cheapest insulation thickness. Writes costs.csv (and sweep.csv when
    /// the sweep is run here).
    Optimize(OptimizeArgs),
    /// Writes a synthetic hourly climate year.
    SynthClimate(SynthArgs),
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Fourier number [default: 1]
    #[arg(long)]
    pub fo: Option<f64>,
    /// Final dimensionless time [default: 48]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Scheme of the convergence table, repeatable: imex, qunt, cn [default: qunt, imex]
    #[arg(long = "scheme")]
    pub schemes: Vec<String>,
    /// Node count, repeatable; the first one also sets the trajectory run [default: 51]
    #[arg(long)]
    pub nx: Vec<usize>,
    /// Time step, repeatable; the first one also sets the trajectory run [default: 0.005]
    #[arg(long)]
    pub dt: Vec<f64>,
    /// Nodes of the Crank-Nicolson reference [default: 2001]
    #[arg(long)]
    pub ref_nx: Option<usize>,
    /// Time step of the reference [default: 0.005]
    #[arg(long)]
    pub ref_dt: Option<f64>,
    /// Interval between compared time levels [default: 0.05]
    #[arg(long)]
    pub save_every: Option<f64>,
    /// Timed configuration as scheme:nodes, repeatable [default: cn:1001, qunt:51, imex:501]
    #[arg(long = "runtime-config")]
    pub runtime_configs: Vec<String>,
    /// Time step of the timed runs [default: 0.01]
    #[arg(long)]
    pub runtime_dt: Option<f64>,
    /// Horizon of the timed runs, repeatable [default: the final time]
    #[arg(long = "runtime-horizon")]
    pub runtime_horizons: Vec<f64>,
    /// Timed repetitions, best kept [default: 1]
    #[arg(long)]
    pub runtime_repeats: Option<usize>,
}

/// Climate, indoor schedule, assembly and solver settings.
#[derive(Debug, Args)]
pub struct WallArgs {
    /// Hourly climate CSV [default: synthetic year of --city]
    #[arg(long)]
    pub climate: Option<PathBuf>,
    /// City profile of the synthetic climate: curitiba, rio-de-janeiro, sao-paulo, salvador [default: curitiba]
    #[arg(long)]
    pub city: Option<String>,
    /// Seed of the synthetic climate [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Wall configuration: wall1, wall2, wall3, roof-inside, roof-outside [default: wall2]
    #[arg(long)]
    pub configuration: Option<String>,
    /// Orientation: north, south, east, west, roof [default: south]
    #[arg(long)]
    pub orientation: Option<String>,
    /// Insulation thickness, m [default: 0.1]
    #[arg(long)]
    pub insulation: Option<f64>,
    /// Winter indoor set point, °C [default: 20]
    #[arg(long)]
    pub winter_setpoint: Option<f64>,
    /// Summer indoor set point, °C [default: 25]
    #[arg(long)]
    pub summer_setpoint: Option<f64>,
    /// Scheme: qunt, imex, cn [default: qunt]
    #[arg(long)]
    pub scheme: Option<String>,
    /// Nodes across the wall [default: 41]
    #[arg(long)]
    pub nx: Option<usize>,
    /// Time step, hours [default: 0.1]
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub wall: WallArgs,
    /// Simulated hours from the start of the climate [default: the whole file]
    #[arg(long)]
    pub hours: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Thinnest insulation, m [default: 0.01]
    #[arg(long)]
    pub first: Option<f64>,
    /// Thickest insulation, m [default: 0.3]
    #[arg(long)]
    pub last: Option<f64>,
    /// Thickness step, m [default: 0.01]
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub wall: WallArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Existing sweep.csv to cost instead of running a sweep
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    #[command(flatten)]
    pub wall: WallArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Insulation price, $/m³ [default: 100]
    #[arg(long)]
    pub insulation_price: Option<f64>,
    /// Heating/cooling system efficiency [default: 0.8]
    #[arg(long)]
    pub system_efficiency: Option<f64>,
    /// Energy price, $/kWh [default: 0.218]
    #[arg(long)]
    pub energy_price: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// City profile: curitiba, rio-de-janeiro, sao-paulo, salvador [default: curitiba]
    #[arg(long)]
    pub city: Option<String>,
    /// Noise seed [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Calendar year [default: 2023]
    #[arg(long)]
    pub year: Option<i32>,
    /// Output file name inside the output directory [default: climate.csv]
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Exit status: 1 for bad input, 2 when the numerics fail.
fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<qunt::Error>())
        .map_or(1, |e| if e.is_validation() { 1 } else { 2 })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = RunConfig::load(cli.config.as_deref())?;
    let ctx = commands::Context::new(&config, cli.out_dir, cli.workers)?;
    match cli.command {
        Command::Benchmark(a) => commands::benchmark(&ctx, &a),
        Command::Simulate(a) => commands::simulate(&ctx, &a),
        Command::Sweep(a) => commands::sweep(&ctx, &a),
        Command::Optimize(a) => commands::optimize(&ctx, &a),
        Command::SynthClimate(a) => commands::synth_climate(&ctx, &a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
