use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "geosubdiv", version, about = "Manifold-valued subdivision: analysis, refinement, verification and rendering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derived-scheme convergence analysis of a mask.
    Analyze(AnalyzeArgs),
    /// Refine a polygon or cylinder path and write the trace as JSON.
    Refine(RefineArgs),
    /// Draw hyperbolic trace levels in the Poincaré disk as SVG.
    Render(RenderArgs),
    /// Re-check the inequalities of a stored trace.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Built-in scheme (chaikin, fourpoint:<p/q>, blend-example1) or a mask JSON file.
    #[arg(long)]
    pub scheme: String,
    /// Largest iterate examined.
    #[arg(long, default_value_t = geosubdiv::mask::DEFAULT_M_MAX)]
    pub m_max: u32,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    #[arg(long)]
    pub scheme: String,
    /// Polygon or cylinder path JSON.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub levels: u32,
    /// Solver tolerance; defaults to the geometry's default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Treat the input polygon as closed regardless of the data file.
    #[arg(long)]
    pub closed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Trace JSON written by `refine`.
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated levels to draw; all when omitted, none when empty.
    #[arg(long, alias = "select")]
    pub levels: Option<String>,
    #[arg(long)]
    pub geodesic_arcs: bool,
    /// Disk radius in pixels.
    #[arg(long, default_value_t = 200.0)]
    pub radius: f64,
    #[arg(long)]
    pub no_markers: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Trace JSON written by `refine`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    geosubdiv::parallel::init_from_env();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Refine(a) => commands::refine(&a),
        Command::Render(a) => commands::render(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
