use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qdbench_cli::config::{read_config_file, Primitive, RunConfig};
use qdbench_cli::figures::{figures, FIGURES};
use qdbench_cli::run::run;
use qdbench_cli::selftest::checks;
use qdbench_cli::CliError;

#[derive(Parser)]
#[command(
    name = "qdbench",
    version,
    about = "Security figures of merit for quantum-dot and Poisson photon sources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BB84 key rate without decoy states
    Bb84(RunArgs),
    /// BB84 key rate with infinitely many decoy states
    Decoy(RunArgs),
    /// Twin-field key rate
    Twinfield(RunArgs),
    /// Token noise tolerance
    Tokens(RunArgs),
    /// Balanced strong coin flipping
    Coinflip(RunArgs),
    /// Bounded-storage bit commitment security margin
    Bitcommit(RunArgs),
    /// Reproduce a figure as one CSV per curve plus a plot script
    Figures(FigureArgs),
    /// Check a few closed-form values
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// re, la, tpe (optionally -coherent / -incoherent), pds or fp-pds
    #[arg(long)]
    source: Option<String>,
    /// Quantum-dot collection efficiency
    #[arg(long)]
    eta: Option<f64>,
    /// Mean photon number of a Poisson source; omit to optimize
    #[arg(long)]
    mu: Option<f64>,
    /// Fiber length in km
    #[arg(long)]
    distance: Option<f64>,
    /// Sweep distance, eta or mu over STEPS evenly spaced points
    #[arg(long, num_args = 4, value_names = ["VAR", "MIN", "MAX", "STEPS"])]
    sweep: Option<Vec<String>>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallel workers for sweeps
    #[arg(long)]
    workers: Option<usize>,
    /// File of key = value lines
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(FIGURES))]
    id: String,
    /// Output directory
    #[arg(long, default_value = "figures")]
    out: PathBuf,
    /// Parallel workers
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Channel and protocol overrides as key = value lines
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    /// Settings with precedence flags > file > preset defaults.
    fn settings(&self) -> Result<BTreeMap<String, String>, CliError> {
        let mut s = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        };
        set("source", self.source.clone());
        set("eta", self.eta.map(|x| x.to_string()));
        set("mu", self.mu.map(|x| x.to_string()));
        set("distance", self.distance.map(|x| x.to_string()));
        set("sweep", self.sweep.as_ref().map(|v| v.join(" ")));
        set("out", self.out.as_ref().map(|p| p.display().to_string()));
        set("workers", self.workers.map(|w| w.to_string()));
        Ok(s)
    }
}

fn execute(primitive: Primitive, args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(primitive, args.settings()?)?;
    let result = run(&cfg)?;
    match &cfg.out {
        Some(path) => result.write_atomic(path)?,
        None => std::io::stdout()
            .write_all(result.to_csv()?.as_bytes())
            .map_err(qdbench::Error::from)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bb84(a) => execute(Primitive::Bb84, a),
        Command::Decoy(a) => execute(Primitive::Decoy, a),
        Command::Twinfield(a) => execute(Primitive::Twinfield, a),
        Command::Tokens(a) => execute(Primitive::Tokens, a),
        Command::Coinflip(a) => execute(Primitive::Coinflip, a),
        Command::Bitcommit(a) => execute(Primitive::Bitcommit, a),
        Command::Figures(a) => (|| {
            let base = match &a.config {
                Some(path) => read_config_file(path)?,
                None => BTreeMap::new(),
            };
            for file in figures(&a.id, &a.out, &base, a.workers.max(1))? {
                println!("{}", a.out.join(file).display());
            }
            Ok(())
        })(),
        Command::Selftest => match checks() {
            Ok(list) => {
                let mut failed = 0;
                for c in &list {
                    let tag = if c.passed() { "PASS" } else { "FAIL" };
                    println!(
                        "{tag} {}: {} (expected {} ± {:e})",
                        c.name, c.value, c.expected, c.tol
                    );
                    failed += usize::from(!c.passed());
                }
                if failed > 0 {
                    return ExitCode::from(1);
                }
                Ok(())
            }
            Err(e) => Err(e.into()),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdbench: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
