//! `dtfsel`: chunk → featurize → profile → select → fewshot, plus report and
//! evaluation statistics.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{
    ChunkArgs, EvaluateCommand, FeaturizeArgs, FewshotArgs, ProfileArgs, ReportArgs,
    Run, SelectArgs,
};
use config::RunConfig;
use manifest::{FileRecord, RunRecord, MANIFEST_NAME};

#[derive(Debug, Parser)]
#[command(name = "dtfsel", version, about = "Reference-matched selection of rubric-graded training data")]
struct Cli {
    /// Seed for every random draw. Required by chunk, profile, fewshot and resampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, env = "DTFSEL_THREADS")]
    threads: Option<usize>,
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Manifest path [default: run.json beside the first output].
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split documents into sentences and group them into random-length chunks.
    Chunk(ChunkArgs),
    /// Compute the 18-component feature table of a corpus.
    Featurize(FeaturizeArgs),
    /// Summarize a reference feature table into a shareable profile.
    Profile(ProfileArgs),
    /// Score candidates against a profile and keep the closest fraction.
    Select(SelectArgs),
    /// Sample few-shot examples per domain from a selection.
    Fewshot(FewshotArgs),
    /// Table of absolute feature-mean differences against a reference.
    Report(ReportArgs),
    /// Evaluation statistics.
    Evaluate {
        #[command(subcommand)]
        which: EvaluateCommand,
    },
}

fn dispatch(cfg: &mut RunConfig, command: &Command) -> Result<Run> {
    match command {
        Command::Chunk(a) => commands::chunk(cfg, a),
        Command::Featurize(a) => commands::featurize_cmd(cfg, a),
        Command::Profile(a) => commands::profile(cfg, a),
        Command::Select(a) => commands::select_cmd(cfg, a),
        Command::Fewshot(a) => commands::fewshot(cfg, a),
        Command::Report(a) => commands::report(cfg, a),
        Command::Evaluate { which } => match which {
            EvaluateCommand::Wilcoxon(a) => commands::wilcoxon(cfg, a),
            EvaluateCommand::Qwk(a) => commands::qwk(cfg, a),
            EvaluateCommand::BalancedAcc(a) => commands::balanced(cfg, a),
        },
    }
}

fn manifest_path(cli: &Cli, run: &Run) -> PathBuf {
    if let Some(p) = &cli.manifest {
        return p.clone();
    }
    match run.outputs.first().and_then(|(_, p)| p.parent()) {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join(MANIFEST_NAME),
        _ => PathBuf::from(MANIFEST_NAME),
    }
}

fn record_key(run: &Run) -> String {
    match run.outputs.first() {
        Some((_, p)) => format!(
            "{} {}",
            run.command,
            p.file_name().unwrap_or_default().to_string_lossy()
        ),
        None => run.command.clone(),
    }
}

fn files(list: &[(String, PathBuf)]) -> Result<Vec<FileRecord>> {
    list.iter().map(|(role, p)| FileRecord::of(role, p)).collect()
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    config::set(&mut cfg.seed, cli.seed.map(Some));

    let run = dispatch(&mut cfg, &cli.command)?;
    for (role, p) in run.inputs.iter().chain(&run.outputs) {
        cfg.paths.insert(role.clone(), p.display().to_string());
    }
    let record = RunRecord {
        command: run.command.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg,
        seeds: run.seeds.clone(),
        inputs: files(&run.inputs)?,
        outputs: files(&run.outputs)?,
    };
    let path = manifest_path(cli, &run);
    manifest::record(&path, &record_key(&run), record)?;
    log::info!("manifest updated: {}", path.display());
    if let Some(text) = &run.stdout {
        print!("{text}");
    }
    Ok(())
}

fn error_line(err: &anyhow::Error) -> String {
    let chain: Vec<String> = err.chain().map(|e| e.to_string()).collect();
    serde_json::json!({ "error": chain.join(": ") }).to_string()
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
