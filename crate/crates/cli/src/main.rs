mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::RunConfig;
use output::Sink;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] dynsif::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            _ => 1,
        }
    }
}

/// Dynamic stress intensity factors and weight functions for a crack
/// running under a free surface.
#[derive(Parser, Debug)]
#[command(name = "dynsif", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV tables and manifest.json; tables go to stdout without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["time", "speed", "depth"])]
    axis: Option<String>,
    /// A:B:STEP, inclusive.
    #[arg(long, global = true)]
    range: Option<String>,
    #[arg(long, global = true)]
    collocation: Option<usize>,
    #[arg(long = "circle-nodes", global = true)]
    circle_nodes: Option<usize>,
    #[arg(long = "inv-terms", global = true)]
    inv_terms: Option<usize>,
    /// Override any configuration key, e.g. --set depth=2.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Wave speeds, Rayleigh function and reflection timing.
    Material,
    /// Whole-plane weight functions.
    PlaneWeights,
    /// The four half-plane weight functions.
    HalfplaneWeights,
    /// Stop-and-negate crack growth under a speed schedule.
    CrackGrowth,
    /// Built-in numerical self-checks.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Material => "material",
            Command::PlaneWeights => "plane-weights",
            Command::HalfplaneWeights => "halfplane-weights",
            Command::CrackGrowth => "crack-growth",
            Command::Validate => "validate",
        }
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    for item in &cli.set {
        let (k, v) = item.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{item}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(a) = &cli.axis {
        cfg.set("axis", a)?;
    }
    if let Some(r) = &cli.range {
        cfg.set("range", r)?;
    }
    if let Some(n) = cli.collocation {
        cfg.set("collocation", &n.to_string())?;
    }
    if let Some(n) = cli.circle_nodes {
        cfg.set("circle_nodes", &n.to_string())?;
    }
    if let Some(n) = cli.inv_terms {
        cfg.set("inv_terms", &n.to_string())?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let cfg = build_config(cli)?;
    let outcome = match cli.command {
        Command::Material => commands::material(&cfg)?,
        Command::PlaneWeights => commands::plane_weights(&cfg)?,
        Command::HalfplaneWeights => commands::halfplane_weights(&cfg)?,
        Command::CrackGrowth => commands::crack_growth(&cfg)?,
        Command::Validate => commands::validate(&cfg)?,
    };
    let mut sink = Sink::new(cli.out.as_deref())?;
    if sink.enabled() {
        for (name, t) in &outcome.tables {
            sink.table(name, t)?;
        }
        let wall = start.elapsed().as_secs_f64();
        let mut files = sink.files.clone();
        files.push("manifest.json".into());
        let m = output::manifest(cli.command.name(), &cfg, outcome.knobs.clone(), outcome.results.clone(), wall, &files);
        let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Io(e.to_string()))?;
        sink.write("manifest.json", &text)?;
        eprintln!("{}: wrote {} files in {wall:.2} s", cli.command.name(), files.len());
    } else if let Some((_, t)) = outcome.tables.first() {
        print!("{}", t.render());
    }
    for name in &outcome.failed_checks {
        eprintln!("check failed: {name}");
    }
    Ok(outcome.failed_checks.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
