use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use loopcoh_cli::{emit_report, parse_problem, run_command, AlgebroidKind, CliError, Command, Mode, Options};

#[derive(Parser)]
#[command(name = "loopcoh", version, about = "Loop space Poisson cohomology, block by block")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Problem document
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "human")]
    mode: ModeArg,
    /// Overrides the document's algebroid
    #[arg(long, global = true, value_enum)]
    algebroid: Option<AlgebroidArg>,
    #[arg(long, global = true, value_enum, default_value = "on")]
    reduce: Switch,
    /// Worker threads for block computations (0: all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Jacobi identity and the cotangent algebroid axioms
    CheckPoisson,
    /// Jet ring generators and the δ-Leibniz rule
    JetInfo,
    /// λ-bracket of two elements of the jet ring
    LambdaBracket { f: String, g: String },
    /// PVA axioms and the closed form on generators
    PvaCheck,
    /// Blockwise cohomology of the loop complex
    LoopCohomology,
    /// Blockwise de Rham cohomology of the base
    Derham,
    /// Transport of loop forms onto Lie conformal cochains
    LcCrosscheck,
    /// Reduced cotangent loop cohomology against de Rham cohomology
    CompareTheorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebroidArg {
    Cotangent,
    Tangent,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let path = cli.input.ok_or_else(|| CliError::Input("--input is required".into()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec = parse_problem(&text)?;
    let command = match cli.command {
        Cmd::CheckPoisson => Command::CheckPoisson,
        Cmd::JetInfo => Command::JetInfo,
        Cmd::LambdaBracket { f, g } => Command::LambdaBracket(f, g),
        Cmd::PvaCheck => Command::PvaCheck,
        Cmd::LoopCohomology => Command::LoopCohomology,
        Cmd::Derham => Command::Derham,
        Cmd::LcCrosscheck => Command::LcCrosscheck,
        Cmd::CompareTheorem => Command::CompareTheorem,
    };
    let opts = Options {
        algebroid: cli.algebroid.map(|a| match a {
            AlgebroidArg::Cotangent => AlgebroidKind::Cotangent,
            AlgebroidArg::Tangent => AlgebroidKind::Tangent,
        }),
        reduce: matches!(cli.reduce, Switch::On),
    };
    let mode = match cli.mode {
        ModeArg::Human => Mode::Human,
        ModeArg::Machine => Mode::Machine,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("--jobs: {e}")))?;
    let report = pool.install(|| run_command(&spec, &command, &opts))?;
    print!("{}", emit_report(&report, mode));
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
