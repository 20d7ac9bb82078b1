use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mvsheaf_cli::parse::parse_with_budget;
use mvsheaf_cli::report::{sha256_hex, Input, USAGE_EXIT};
use mvsheaf_cli::run::{run, Command, Flags};

#[derive(Parser)]
#[command(
    name = "mvsheaf",
    version,
    about = "Verification reports for MV-algebras and their sheaf representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Prime, maximal and minimal ideals, O_P and the radical.
    Spectrum(Common),
    /// The Zariski topology on Max A and the MV-topology τ_A.
    Topology(Common),
    /// The sheaf of ℓ-groups 𝔥 and its stalks.
    SheafCheck(Common),
    /// The representation Ψ and the embedding into a product.
    Represent(Common),
    /// Every check above plus the equation suite and the classification chain.
    VerifyAll(Common),
}

#[derive(Args)]
struct Common {
    /// A `.mvalg` document.
    file: PathBuf,
    /// Definition to analyse; defaults to the last one in the document.
    #[arg(long)]
    algebra: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = Flags::default().sample_bound)]
    sample_bound: i64,
    #[arg(long, default_value_t = Flags::default().closure_budget)]
    closure_budget: usize,
    /// Largest topology enumerated by the sheaf checks.
    #[arg(long, default_value_t = Flags::default().open_cap)]
    open_cap: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_EXIT } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Sub::Spectrum(a) => (Command::Spectrum, a),
        Sub::Topology(a) => (Command::Topology, a),
        Sub::SheafCheck(a) => (Command::SheafCheck, a),
        Sub::Represent(a) => (Command::Represent, a),
        Sub::VerifyAll(a) => (Command::VerifyAll, a),
    };
    match execute(command, &args) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("mvsheaf: {message}");
            ExitCode::from(USAGE_EXIT)
        }
    }
}

fn execute(command: Command, args: &Common) -> Result<u8, String> {
    let start = Instant::now();
    let bytes = std::fs::read(&args.file).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| format!("{}: not UTF-8", args.file.display()))?;
    let doc = parse_with_budget(&text, args.closure_budget)
        .map_err(|e| format!("{}: {e}", args.file.display()))?;
    let def = match &args.algebra {
        Some(name) => doc
            .get(name)
            .ok_or_else(|| format!("no definition named '{name}'"))?,
        None => doc
            .definitions
            .last()
            .ok_or("the document defines no algebra")?,
    };
    let input = Input {
        sha256: sha256_hex(&bytes),
        algebra: def.name.clone(),
        expression: def.algebra.to_string(),
    };
    let flags = Flags {
        sample_bound: args.sample_bound,
        closure_budget: args.closure_budget,
        open_cap: args.open_cap,
    };
    let report = run(command, &def.algebra, input, &flags);
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, json).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{json}"),
    }
    eprintln!(
        "{} {}: {:?} in {:.3}s",
        command.name(),
        def.name,
        report.verdict,
        start.elapsed().as_secs_f64()
    );
    Ok(report.verdict.exit_code())
}
