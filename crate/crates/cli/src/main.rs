use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use recollement_cli::commands::{run, AppError};
use recollement_cli::config::{Command, Format, HarbaterOp, RunConfig};

#[derive(Parser)]
#[command(name = "recollement", version, about = "Exact cohomology of glued curves, section rings, periodic pipelines and Harbater checks")]
struct Cli {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand)]
enum Sub {
    /// H⁰ and H¹ of O(n) with graded pieces and bases.
    Cohomology(CohomologyArgs),
    /// Hilbert function, degree-one generation and relations.
    SectionRing(SectionRingArgs),
    /// Bott inversion, completion and degree-zero extraction on k[[ξ]]/ξ^M.
    Pipeline(PipelineArgs),
    /// Local completion at a point, pipeline, and the glued curve against the direct one.
    Dream(DreamArgs),
    /// Radius, membership, evaluation, division and local expansion of an element.
    Harbater(HarbaterArgs),
}

#[derive(Args)]
struct CohomologyArgs {
    /// p1, twistor, or a presentation file.
    #[arg(long)]
    curve: Option<String>,
    /// Degree or inclusive range a..b.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long)]
    cutoff: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    window_bottom: Option<i64>,
    /// Accept cutoffs below the default; results are marked uncertified.
    #[arg(long)]
    uncertified_ok: bool,
}

#[derive(Args)]
struct SectionRingArgs {
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    max_degree: Option<u32>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Bott factor f as a polynomial in xi, e.g. "xi*(1+xi)".
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long = "M")]
    m: Option<usize>,
    /// Use the trivial-action model instead of f.
    #[arg(long)]
    trivial_action: bool,
}

#[derive(Args)]
struct DreamArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// Bott factor as an element of the Harbater ring (default 1).
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// twistor (default), p1, both, or a presentation file.
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    cutoff: Option<u32>,
    #[arg(long)]
    uncertified_ok: bool,
}

#[derive(Args)]
struct HarbaterArgs {
    #[arg(value_enum)]
    op: Option<HarbaterOp>,
    /// "num / den" in T, or "pole ; head ; bound C s".
    #[arg(long, allow_hyphen_values = true)]
    element: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long = "M")]
    m: Option<usize>,
}

impl Sub {
    fn into_config(self) -> RunConfig {
        let base = RunConfig::default();
        match self {
            Sub::Cohomology(a) => RunConfig {
                command: Some(Command::Cohomology),
                curve: a.curve,
                n: a.n,
                cutoff: a.cutoff,
                window_bottom: a.window_bottom,
                uncertified_ok: a.uncertified_ok,
                ..base
            },
            Sub::SectionRing(a) => RunConfig { command: Some(Command::SectionRing), curve: a.curve, max_degree: a.max_degree, ..base },
            Sub::Pipeline(a) => RunConfig { command: Some(Command::Pipeline), f: a.f, m: a.m, trivial_action: a.trivial_action, ..base },
            Sub::Dream(a) => RunConfig {
                command: Some(Command::Dream),
                x: a.x,
                r: a.r,
                m: a.m,
                n: a.n,
                f: a.f,
                curve: a.curve,
                cutoff: a.cutoff,
                uncertified_ok: a.uncertified_ok,
                ..base
            },
            Sub::Harbater(a) => RunConfig { command: Some(Command::Harbater), op: a.op, element: a.element, x: a.x, r: a.r, m: a.m, ..base },
        }
    }
}

fn load(cli: Cli) -> Result<RunConfig, AppError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| AppError::Config(format!("config {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    let flags = RunConfig { format: cli.format, output: cli.output, ..cli.command.map(Sub::into_config).unwrap_or_default() };
    Ok(file.overlay(flags))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = load(cli).and_then(|cfg| run(&cfg).map(|rep| (cfg, rep)));
    match outcome {
        Ok((cfg, rep)) => {
            let text = rep.render(cfg.format());
            match &cfg.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if rep.success {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: a reported check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
