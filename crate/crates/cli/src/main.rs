use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convention_core::io::{
    load_config, run_command, CommandError, Experiment, OutputFormat, Overrides, SimConfig,
};

/// Simulations of multimodal convention formation between an Instructor and
/// a Builder.
#[derive(Debug, Parser)]
#[command(name = "convsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Program length across repetitions as chunk conventions form.
    SimAbstraction(CommonArgs),
    /// Redundant, language-only and complementary message proportions across repetitions.
    SimModality(CommonArgs),
    /// Fit cost weights and semantics to observed modality proportions.
    Fit(CommonArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent runs per condition.
    #[arg(long)]
    runs: Option<usize>,
    /// Utterance cost weight; comma-separated values give one condition each.
    #[arg(long, value_delimiter = ',')]
    beta_u: Option<Vec<f64>>,
    /// Gesture cost weight.
    #[arg(long)]
    beta_h: Option<f64>,
    /// Informativeness weight.
    #[arg(long)]
    beta_i: Option<f64>,
    /// Weight on "here" versus bare pointing in the Builder's speaker model.
    #[arg(long)]
    gamma: Option<f64>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            runs: self.runs,
            beta_u: self.beta_u.clone(),
            beta_h: self.beta_h,
            beta_i: self.beta_i,
            gamma: self.gamma,
            out: self.out.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            }),
        }
    }
}

fn build_config(experiment: Experiment, args: &CommonArgs) -> Result<SimConfig, CommandError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let (cfg, warnings) = load_config(path)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            if cfg.experiment != experiment {
                return Err(convention_core::io::ConfigError::Validation {
                    field: "experiment".into(),
                    reason: format!(
                        "{} names {}, but the command is {}",
                        path.display(),
                        cfg.experiment,
                        experiment
                    ),
                }
                .into());
            }
            cfg
        }
        None => SimConfig::default_for(experiment),
    };
    cfg.apply(&args.overrides())?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(experiment: Experiment, args: &CommonArgs) -> Result<(), CommandError> {
    let cfg = build_config(experiment, args)?;
    log::info!(
        "running {} with seed {} and {} runs",
        cfg.experiment,
        cfg.seed,
        cfg.n_runs
    );
    let report = match args.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool");
            pool.install(|| run_command(&cfg))?
        }
        None => run_command(&cfg)?,
    };
    for line in &report.summary {
        println!("{line}");
    }
    println!(
        "wrote {} rows to {}",
        report.rows.len(),
        report.output_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (experiment, args) = match &cli.command {
        Command::SimAbstraction(a) => (Experiment::SimAbstraction, a),
        Command::SimModality(a) => (Experiment::SimModality, a),
        Command::Fit(a) => (Experiment::Fit, a),
    };
    match run(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
