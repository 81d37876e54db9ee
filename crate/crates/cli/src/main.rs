mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spherical_ot::Error;

/// Spherical sliced-Wasserstein discrepancies, benchmarks and experiments.
#[derive(Parser, Debug)]
#[command(name = "spherical-ot", version)]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "SPHERICAL_OT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate SSW_p^p between two clouds (files or generator specs).
    Compute(ComputeArgs),
    /// Time the estimators over a grid of sizes and projection counts.
    BenchRuntime(BenchArgs),
    /// Run one of the named experiments and emit its records.
    Experiment(ExperimentArgs),
    /// Draw a cloud from a generator spec and write it as a cloud file.
    Sample(SampleArgs),
    /// Run a particle flow, a GLA chain or the SSWVI loop, saving snapshots.
    Flow(FlowArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SolverArg {
    BinarySearch,
    LevelMedian,
    UniformClosedForm,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    /// Cloud file path or spec such as `vmf:d=3,mu=0,0,1,kappa=10,n=500`.
    mu: String,
    /// Second cloud; with `uniform_closed_form` this must be a `uniform:` spec.
    nu: String,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long = "L", default_value_t = 100)]
    l: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::BinarySearch)]
    solver: SolverArg,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file receiving one run record.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100, 1000, 10_000])]
    n_grid: Vec<usize>,
    #[arg(long = "L-grid", value_delimiter = ',', default_values_t = [200])]
    l_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [3])]
    d_grid: Vec<usize>,
    /// Any of ssw_bs, ssw1_levmed, ssw2_unif, sw, w_bruteforce.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Largest n for the exact assignment baseline.
    #[arg(long, default_value_t = spherical_ot::bench::assignment::ASSIGNMENT_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ScaleArg {
    Quick,
    Full,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    id: String,
    #[arg(long, value_enum, default_value_t = ScaleArg::Full)]
    scale: ScaleArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cloud file destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Algorithm {
    Ssw,
    Gla,
    Sswvi,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum PotentialArg {
    Vmf,
    SixModes,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModeArg {
    Exp,
    Projected,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long, value_enum, default_value_t = Algorithm::Ssw)]
    algorithm: Algorithm,
    /// Initial particles (file or spec).
    #[arg(long)]
    init: String,
    /// Target of the `ssw` flow: file, spec, or `uniform`.
    #[arg(long)]
    target: Option<String>,
    /// Potential of `gla` and `sswvi`.
    #[arg(long, value_enum, default_value_t = PotentialArg::Vmf)]
    potential: PotentialArg,
    /// Mean direction of the vMF potential.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Flow step size (`ssw`, `sswvi`).
    #[arg(long, default_value_t = 1e-3)]
    step_size: f64,
    /// GLA step size (`gla`, `sswvi`); 0.1 for `six_modes`, 0.001 otherwise.
    #[arg(long)]
    gla_step: Option<f64>,
    /// GLA steps per outer iteration of `sswvi`.
    #[arg(long, default_value_t = 20)]
    inner_steps: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exp)]
    mode: ModeArg,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long = "L", default_value_t = 100)]
    l: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::BinarySearch)]
    solver: SolverArg,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 100)]
    snapshot_every: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving `step_XXXXXX.cloud` snapshots and `objective.csv`.
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SolverIncompatible(_) => 3,
        Error::Malformed(_)
        | Error::Parameter(_)
        | Error::DimensionMismatch { .. }
        | Error::Unsupported(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: could not configure {k} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let res = match cli.command {
        Command::Compute(a) => commands::compute(a),
        Command::BenchRuntime(a) => commands::bench_runtime(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Sample(a) => commands::sample(a),
        Command::Flow(a) => commands::flow(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
