use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tailsum::config::Format;
use tailsum::{cmd_approx, cmd_mc, cmd_table, cmd_verify, workers_from_env, CliError, RunConfig};
use tailsum_core::{Estimator, Variant};

#[derive(Parser)]
#[command(
    name = "tailsum",
    version,
    about = "Tail probabilities of sums of log-elliptical risks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file, or one of the bundled names table1..table4.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Thresholds, comma separated; replaces the config's u_list.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    u: Option<Vec<f64>>,

    /// Monte Carlo sample size.
    #[arg(long, global = true)]
    n: Option<u64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    estimator: Option<EstimatorArg>,

    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,

    /// Constant c of the epsilon measure and the independence probe.
    #[arg(long, global = true)]
    epsilon_c: Option<f64>,

    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Skip the Monte Carlo column of `table`.
    #[arg(long, global = true)]
    no_mc: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Diagnostics table: approximations, Monte Carlo, ratios, epsilon, rho-hat.
    Table,
    /// First- and second-order approximations with per-pair terms.
    Approx {
        /// Print both variants.
        #[arg(long)]
        both: bool,
    },
    /// Monte Carlo estimate at each threshold.
    Mc,
    /// Report on the conditions behind the approximations.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Crude,
    Conditional,
    ConditionalMax,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Limit,
    Density,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) {
    if let Some(u) = &cli.u {
        cfg.u_list = u.clone();
    }
    if let Some(n) = cli.n {
        cfg.mc.n = n;
    }
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    if let Some(e) = cli.estimator {
        cfg.mc.estimator = match e {
            EstimatorArg::Crude => Estimator::Crude,
            EstimatorArg::Conditional => Estimator::ConditionalRadial,
            EstimatorArg::ConditionalMax => Estimator::ConditionalMax,
        };
    }
    if let Some(v) = cli.variant {
        cfg.variant = match v {
            VariantArg::Limit => Variant::LimitForm,
            VariantArg::Density => Variant::DensityForm,
        };
    }
    if let Some(c) = cli.epsilon_c {
        cfg.epsilon_c = c;
    }
    if let Some(p) = &cli.out {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
        };
    }
    if cli.no_mc {
        cfg.mc.enabled = false;
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let name = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required (a file or table1..table4)".into()))?;
    let mut cfg = RunConfig::load(name)?;
    apply_overrides(cli, &mut cfg);
    let workers = workers_from_env()?;
    match cli.command {
        Command::Table => cmd_table(&cfg, workers),
        Command::Approx { both } => cmd_approx(&cfg, both),
        Command::Mc => cmd_mc(&cfg, workers),
        Command::Verify => cmd_verify(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tailsum: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
