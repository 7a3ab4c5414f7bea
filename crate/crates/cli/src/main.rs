//! `relu-morse`: build, classify, match and draw the canonical complex of a
//! ReLU network from the command line.
//!
//! Exit codes: 0 on success, 1 for usage and I/O problems (including weight
//! files that do not match the schema), 2 for domain errors, which are also
//! reported as `{"error": kind, "message": text}` on standard error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "relu-morse", version, about = "Discrete Morse theory on ReLU network complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a weight file: a named fixture or a seeded random network.
    Gen(GenArgs),
    /// Enumerate the canonical polyhedral complex.
    Build(PipelineArgs),
    /// Classify every vertex as PL-regular or PL-critical.
    Classify(PipelineArgs),
    /// Build the gradient vector field and verify it against homology.
    Dgvf(DgvfArgs),
    /// Draw a planar complex as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Built-in fixture (net-b, net-b-negated).
    #[arg(long, conflicts_with_all = ["arch", "seed"])]
    fixture: Option<String>,
    /// Layer widths, input first, e.g. 2,3,1.
    #[arg(long, requires = "seed")]
    arch: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Standard deviation of the sampled weights.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Weight file.
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Built-in fixture instead of a weight file.
    #[arg(long)]
    fixture: Option<String>,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Zero threshold for normalised node-map values.
    #[arg(long, default_value_t = 1e-9)]
    sign_tol: f64,
    /// Feasibility tolerance of the simplex solver.
    #[arg(long, default_value_t = 1e-7)]
    lp_tol: f64,
    /// Pivot tolerance of the simplex solver.
    #[arg(long, default_value_t = 1e-9)]
    lp_pivot: f64,
}

#[derive(Debug, Args)]
struct DgvfArgs {
    #[command(flatten)]
    common: PipelineArgs,
    /// Cross-check every cell against the LP-driven local pairing.
    #[arg(long)]
    local_check: bool,
    /// Dissolve the pair with this index before verifying.
    #[arg(long, hide = true)]
    corrupt_pair: Option<usize>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    common: PipelineArgs,
    /// Drawing box as xmin,ymin,xmax,ymax.
    #[arg(long, allow_hyphen_values = true)]
    render_box: Option<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => commands::gen(a.fixture.as_deref(), a.arch.as_deref(), a.seed, a.scale, a.output.as_deref()),
        Command::Build(a) => commands::build(&a.config()?),
        Command::Classify(a) => commands::classify(&a.config()?),
        Command::Dgvf(a) => commands::dgvf(&a.common.config()?, a.local_check, a.corrupt_pair),
        Command::Render(a) => commands::render(&a.common.config()?, a.render_box.as_deref()),
    }
}

impl PipelineArgs {
    fn config(&self) -> Result<commands::RunConfig, CliError> {
        commands::RunConfig::new(
            self.input.clone(),
            self.fixture.clone(),
            self.output.clone(),
            self.sign_tol,
            self.lp_tol,
            self.lp_pivot,
        )
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.exit_code())
        }
    }
}
