use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rackcode::cli::{cmd_example1, cmd_run, cmd_table, cmd_verify, Outcome, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "rackcode", version, about = "Rack-aware Reed-Solomon repair simulator")]
struct Args {
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the message ledger to this file.
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,
    /// Write table output to this file instead of stdout.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Include intra-rack messages in reports and ledgers.
    #[arg(long, global = true)]
    show_intra: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build, fail, repair and verify one scenario.
    Run { scenario: PathBuf },
    /// Reproduce the GF(16) example with its download table.
    Example1,
    /// Evaluate a bandwidth formula over a parameter grid, e.g. `cor3 eps=1:4 dbar=10 t=30 kp=5`.
    Table {
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
    },
    /// Randomized property campaign over a scenario's code.
    Verify {
        scenario: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn read(path: &PathBuf) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome {
        report: format!("error CONFIG: cannot read {}: {e}\n", path.display()),
        ledger: None,
        code: EXIT_CONFIG,
    })
}

fn finish(out: Outcome, ledger_path: Option<&PathBuf>) -> ExitCode {
    print!("{}", out.report);
    if let (Some(path), Some(ledger)) = (ledger_path, &out.ledger) {
        if let Err(e) = fs::write(path, ledger) {
            eprintln!("cannot write ledger {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    ExitCode::from(out.code as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out = match &args.cmd {
        Cmd::Run { scenario } => match read(scenario) {
            Ok(text) => cmd_run(&text, args.seed, args.show_intra),
            Err(o) => o,
        },
        Cmd::Example1 => cmd_example1(args.show_intra),
        Cmd::Table { spec } => match cmd_table(spec) {
            Ok(csv) => match &args.csv {
                Some(path) => match fs::write(path, &csv) {
                    Ok(()) => Outcome { report: String::new(), ledger: None, code: 0 },
                    Err(e) => Outcome {
                        report: format!("error CONFIG: cannot write {}: {e}\n", path.display()),
                        ledger: None,
                        code: EXIT_CONFIG,
                    },
                },
                None => Outcome { report: csv, ledger: None, code: 0 },
            },
            Err(e) => Outcome { report: format!("error {}: {e}\n", e.kind()), ledger: None, code: EXIT_CONFIG },
        },
        Cmd::Verify { scenario, trials } => match read(scenario) {
            Ok(text) => cmd_verify(&text, *trials, args.seed),
            Err(o) => o,
        },
    };
    finish(out, args.ledger.as_ref())
}
