use blackstock_cli::config::reference_toml;
use blackstock_cli::{run, CliError, ExperimentConfig, Overrides, Subcommand};
use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Roots,
    Kernels,
    Decay,
    Profiles,
    Optimality,
    KuznetsovGap,
    SingularLimit,
    SecondOrder,
    EnergyCert,
    ViscousLimit,
    Nonlinear,
    All,
    /// Print the documented default configuration.
    Config,
}

/// Spectral studies of the general Blackstock model.
///
/// Tables go to <out>/<subcommand>/ together with summary.csv. Exit status is
/// 0 when every hard check passes, 1 when one fails and 2 on usage or
/// configuration errors. BLACKSTOCK_THREADS caps the worker threads.
#[derive(Debug, Parser)]
#[command(name = "blackstock", version)]
struct Args {
    command: Command,
    /// TOML configuration; defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root, overriding `out_dir`.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Seed of the random parameter sets in the root check.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a gnuplot script next to each table.
    #[arg(long)]
    gnuplot: bool,
}

fn subcommand(c: Command) -> Option<Subcommand> {
    Subcommand::ALL
        .iter()
        .copied()
        .find(|s| c.to_possible_value().is_some_and(|v| v.get_name() == s.name()))
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BLACKSTOCK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("BLACKSTOCK_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let Some(sub) = subcommand(args.command) else {
        print!("{}", reference_toml());
        return Ok(0);
    };
    init_threads()?;
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        kappa: args.kappa,
        n: args.n,
        t_max: args.t_max,
        seed: args.seed,
        out_dir: args.out.clone(),
    });
    for w in cfg.params()?.warnings() {
        eprintln!("warning: {w:?}");
    }
    let result = run(sub, &cfg, None, args.gnuplot)?;
    print!("{}", result.summary.table());
    Ok(result.summary.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
