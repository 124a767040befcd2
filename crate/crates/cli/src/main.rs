//! Experiment runner: reads a system + protocol config, executes the
//! setpoint-sweep linearization analysis and emits machine-readable results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blalocus::config::ExperimentConfig;
use blalocus::pipeline::{self, RunOptions};
use blalocus::Error;

#[derive(Parser)]
#[command(
    name = "blalocus",
    version,
    about = "Setpoint-sweep linearization analysis of block-oriented nonlinear systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (.toml, or .json with the same shape)
    config: PathBuf,
    /// Override the config's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json / loci.csv / frf.csv / rank.json
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Override the excitation amplitude
    #[arg(long)]
    eps_override: Option<f64>,
    /// Concurrent setpoint workers
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Stdout format for the summary
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: simulate, estimate, fit, classify, judge
    Run(CommonArgs),
    /// Analytic loci from the linearization engine only (no simulation)
    Oracle(CommonArgs),
    /// Branch-count rank probes on the estimated FRFs
    Rank(CommonArgs),
    /// Config lint: parse, validate, report problems
    Validate { config: PathBuf },
}

/// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 indeterminate.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Graph(_) | Error::Io(_) => 2,
        Error::Indeterminate(_) => 4,
        Error::AtSetpoint { source, .. } => exit_code_for(source),
        _ => 3,
    }
}

fn opts_of(args: &CommonArgs) -> RunOptions {
    RunOptions {
        out_dir: args.out_dir.clone(),
        jobs: args.jobs.max(1),
        seed_override: args.seed,
        eps_override: args.eps_override,
    }
}

fn json_out<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run_command(cmd: &Command) -> Result<(), Error> {
    match cmd {
        Command::Run(args) => {
            let cfg = ExperimentConfig::load(&args.config)?;
            let report = pipeline::run(&cfg, &opts_of(args))?;
            match args.format {
                OutputFormat::Json => json_out(&report.verdict),
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    pipeline::write_loci_csv(
                        &mut buf,
                        &report.classification,
                        &cfg.setpoint_values(),
                    )?;
                    print!("{}", String::from_utf8_lossy(&buf));
                }
                OutputFormat::Text => {
                    println!(
                        "classified poles={:?} zeros={:?} (cell: {})",
                        report.classification.pole_class,
                        report.classification.zero_class,
                        report.verdict.table_cell
                    );
                    let compat: Vec<String> = report
                        .verdict
                        .compatible
                        .iter()
                        .map(|c| c.family.to_string())
                        .collect();
                    println!("compatible: {}", compat.join(", "));
                    let excl: Vec<String> =
                        report.verdict.excluded.iter().map(|e| e.family.to_string()).collect();
                    println!("excluded:   {}", excl.join(", "));
                    if let Some(oracle) = &report.oracle {
                        if let Some(err) = oracle.max_root_error {
                            println!("max fitted-vs-analytic root error: {err:.3e}");
                        }
                    }
                    println!("note: {}", report.verdict.disclaimer);
                    println!("outputs in {}", args.out_dir.display());
                }
            }
        }
        Command::Oracle(args) => {
            let cfg = ExperimentConfig::load(&args.config)?;
            let section = pipeline::oracle(&cfg, &opts_of(args))?;
            match args.format {
                OutputFormat::Json => json_out(&section),
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    pipeline::write_loci_csv(
                        &mut buf,
                        &section.classification,
                        &cfg.setpoint_values(),
                    )?;
                    print!("{}", String::from_utf8_lossy(&buf));
                }
                OutputFormat::Text => {
                    println!(
                        "analytic loci: poles={:?} zeros={:?} (cell: {})",
                        section.classification.pole_class,
                        section.classification.zero_class,
                        section.verdict.table_cell
                    );
                    println!("outputs in {}", args.out_dir.display());
                }
            }
        }
        Command::Rank(args) => {
            let cfg = ExperimentConfig::load(&args.config)?;
            let out = pipeline::rank(&cfg, &opts_of(args))?;
            match args.format {
                OutputFormat::Json => json_out(&out),
                OutputFormat::Csv => {
                    println!("test,index,singular_value");
                    for (i, s) in out.branch.singular_values.iter().enumerate() {
                        println!("branch,{i},{s:.16e}");
                    }
                    if let Some(fb) = &out.feedback {
                        for (i, s) in fb.singular_values.iter().enumerate() {
                            println!("feedback,{i},{s:.16e}");
                        }
                    }
                }
                OutputFormat::Text => {
                    println!("branch-count rank: {}", out.branch.rank);
                    println!("  singular values: {:?}", out.branch.singular_values);
                    match (&out.feedback, &out.feedback_error) {
                        (Some(fb), _) => {
                            println!("inverse (feedback) rank: {} => n_fb = {}", fb.rank, fb.rank.saturating_sub(1));
                            println!("  singular values: {:?}", fb.singular_values);
                        }
                        (None, Some(err)) => println!("inverse rank unavailable: {err}"),
                        (None, None) => {}
                    }
                }
            }
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(config)?;
            println!(
                "ok: {} setpoints, {} samples x {} records, fit nb={} na={} delay={}",
                cfg.setpoint_values().len(),
                cfg.excitation.samples,
                cfg.excitation.records,
                cfg.fit.nb,
                cfg.fit.na,
                cfg.fit.delay
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
