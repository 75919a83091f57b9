//! Command-line front end for the evaluation stack.
//!
//! Exit codes: 0 success, 2 completed with partial failures, 1 fatal.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use segeval::harness::{
    run_augment, run_evaluate, run_leaderboard, run_meshqc, run_sensitivity, EvaluationConfig,
};

#[derive(Parser)]
#[command(
    name = "segeval",
    about = "Segmentation challenge evaluation: augmentation, metrics, Sobol' robustness, leaderboards, mesh quality",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (`key = value` lines); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base cases (augment) or ground-truth masks (evaluate).
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    /// Directory with one subdirectory per team.
    #[arg(long)]
    submissions: Option<PathBuf>,
    /// Output directory for generated data and reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed driving the sampling design and noise streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Saltelli base sample count N (the design has N·(M+2) rows).
    #[arg(long)]
    n_base: Option<usize>,
    /// Worker thread count (default: automatic).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the augmented test set for every base case.
    Augment(CommonArgs),
    /// Score team predictions against ground-truth masks.
    Evaluate(CommonArgs),
    /// Estimate Sobol' indices and robustness scores from an evaluation.
    Sensitivity(CommonArgs),
    /// Aggregate reports into the final leaderboard and summary plots.
    Leaderboard(CommonArgs),
    /// Score tetrahedral meshes by scaled-Jacobian statistics.
    Meshqc(CommonArgs),
}

fn build_config(args: &CommonArgs) -> segeval::Result<EvaluationConfig> {
    let mut config = match &args.config {
        Some(path) => EvaluationConfig::from_file(path)?,
        None => EvaluationConfig::default(),
    };
    if let Some(dir) = &args.ground_truth {
        config.ground_truth_dir = dir.clone();
    }
    if let Some(dir) = &args.submissions {
        config.submissions_dir = dir.clone();
    }
    if let Some(dir) = &args.out {
        config.output_dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n_base) = args.n_base {
        config.n_base = n_base;
    }
    if let Some(threads) = args.threads {
        config.thread_count = Some(threads);
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> segeval::Result<ExitCode> {
    match cli.command {
        Command::Augment(args) => {
            let config = build_config(&args)?;
            let summary = run_augment(&config)?;
            for (case, error) in &summary.failures {
                eprintln!("case {case} failed: {error}");
            }
            println!(
                "augmented {} case(s) x {} design rows into {}",
                summary.cases_done.len(),
                summary.rows_per_case,
                config.output_dir.display()
            );
            Ok(exit_for(summary.cases_done.len(), summary.failures.len()))
        }
        Command::Evaluate(args) => {
            let config = build_config(&args)?;
            let summary = run_evaluate(&config)?;
            println!(
                "evaluated {} team(s) on {} case(s); {} failure(s); reports in {}",
                summary.teams.len(),
                summary.cases.len(),
                summary.failures,
                config.output_dir.display()
            );
            Ok(exit_for(
                summary.teams.len() * summary.cases.len() - summary.failures,
                summary.failures,
            ))
        }
        Command::Sensitivity(args) => {
            let config = build_config(&args)?;
            let summary = run_sensitivity(&config)?;
            for (team, reason) in &summary.excluded {
                eprintln!("team {team} excluded: {reason}");
            }
            println!(
                "sensitivity report for {} team(s) written to {}",
                summary.report.teams.len(),
                config.output_dir.join("sensitivity.json").display()
            );
            Ok(exit_for(summary.report.teams.len(), summary.excluded.len()))
        }
        Command::Leaderboard(args) => {
            let config = build_config(&args)?;
            let summary = run_leaderboard(&config)?;
            for entry in &summary.report.entries {
                let score = entry
                    .p_fin
                    .map(|p| format!("{p:.4}"))
                    .unwrap_or_else(|| "NR".into());
                println!("{:>3}  {:<24} {}", entry.r_fin, entry.team, score);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Meshqc(args) => {
            let config = build_config(&args)?;
            let summary = run_meshqc(&config)?;
            for team in &summary.report.teams {
                let score = team
                    .p_j
                    .map(|p| format!("{p:.4}"))
                    .unwrap_or_else(|| "NR".into());
                let rank = team
                    .r_j
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "NR".into());
                println!("{rank:>3}  {:<24} {score}", team.team);
            }
            Ok(exit_for(
                summary.report.teams.len() - summary.failures,
                summary.failures,
            ))
        }
    }
}

fn exit_for(successes: usize, failures: usize) -> ExitCode {
    match (successes, failures) {
        (_, 0) => ExitCode::SUCCESS,
        (0, _) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}
