use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use recollement_workbench::{load_scenario, run, Command, Flags, WorkbenchError};

#[derive(Parser)]
#[command(
    name = "recollement",
    version,
    about = "Check, build and verify recollements of derived categories of DG algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Degree window `a..b`, overriding the scenario.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// Search depth for finite-build certificates.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Testset seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replay the condition certificates in a saved JSON report instead of searching.
    #[arg(long, global = true, value_name = "EVIDENCE")]
    replay: Option<PathBuf>,
    /// Proceed past uncertified conditions; results only hold inside the window.
    #[arg(long, global = true)]
    window_limited: bool,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide the four recollement conditions.
    Check { scenario: String },
    /// Construct E, F and the six functors; verify the recovery maps.
    Build { scenario: String },
    /// Run the axiom checks on a seeded testset.
    Verify { scenario: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let (command, name) = match &cli.command {
        Cmd::Check { scenario } => (Command::Check, scenario),
        Cmd::Build { scenario } => (Command::Build, scenario),
        Cmd::Verify { scenario } => (Command::Verify, scenario),
    };
    let flags = Flags {
        window: cli.window.clone(),
        depth: cli.depth,
        seed: cli.seed,
        replay: cli.replay.clone(),
        window_limited: cli.window_limited,
    };
    let result: Result<_, WorkbenchError> = load_scenario(name).and_then(|s| run(command, &s, &flags));
    match result {
        Ok(report) => {
            print!("{}", if cli.json { report.to_json() } else { report.to_text() });
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
