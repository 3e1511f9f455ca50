use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use cyclestab::cli::{self, Command, ExperimentConfig, SeedPolicy};

/// Optimal delayed-feedback control of period-2 cycles.
#[derive(Debug, Parser)]
#[command(name = "cyclestab", version)]
struct Args {
    /// Command to run; may instead come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Flat key = value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of closed-loop weights (for verify: largest N checked).
    #[arg(long = "N", visible_alias = "n")]
    n: Option<usize>,
    /// Logistic parameter.
    #[arg(long)]
    h: Option<f64>,
    /// Comma-separated feedback strengths; overrides --N. Empty means no control.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    /// CSV output path; without it the table is written to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Explicit comma-separated seed history (2N-1 states).
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "t-min", allow_hyphen_values = true)]
    t_min: Option<f64>,
    #[arg(long = "t-max", allow_hyphen_values = true)]
    t_max: Option<f64>,
}

fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad number {x:?}")))
        .collect()
}

fn build_config(args: Args) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(c) = args.command {
        cfg.command = Some(c);
    }
    if let Some(n) = args.n {
        cfg.n = n;
        cfg.eps = None;
    }
    if let Some(eps) = &args.eps {
        let eps = parse_list(eps)?;
        cfg.n = eps.len() + 1;
        cfg.eps = Some(eps);
    }
    if let Some(h) = args.h {
        cfg.h = h;
    }
    if let Some(x0) = args.x0 {
        cfg.x0 = x0;
    }
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    if let Some(b) = args.burn_in {
        cfg.burn_in = b;
    }
    if let Some(r) = args.resolution {
        cfg.resolution = r;
    }
    if let Some(out) = args.out {
        cfg.output_path = Some(out);
    }
    if let Some(seed) = &args.seed {
        cfg.seed_policy = SeedPolicy::Explicit(parse_list(seed)?);
    }
    if let Some(t) = args.t_min {
        cfg.t_min = t;
    }
    if let Some(t) = args.t_max {
        cfg.t_max = t;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    cyclestab::configure_threads_from_env();
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match cli::run(&cfg, &mut stdout) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
