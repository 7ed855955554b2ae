use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rabi_crwa::report::{parse_backends, run, Command, ConfigLayer, Format, RunConfig};

const AFTER_HELP: &str = "\
Frequencies are in units of 2g and times are reduced, tau = 2 g t (omega = Delta = 1).

Reproductions (alpha^2 = 10 unless noted):
  energy levels, three backends     crwa levels --g 0.1 --n-max 10
  inversion, weak coupling          crwa inversion --g 0.02 --tau-max 40 -o w_002.csv
  inversion, no collapse            crwa inversion --g 0.06 --tau-max 40 -o w_006.csv
  CRWA components                   crwa components --g 0.06 --tau-max 40 -o parts.csv
  intrinsic-oscillation envelopes   crwa envelopes --g 0.06 --tau-max 60 -o env.csv
  power spectra                     crwa power --g 0.06 -o p_006.csv   (also 0.15, 0.2)
  peak table                        crwa peaks --g 0.15 --backends exact,crwa
  acceptance checks                 crwa validate [--quick]
Add --format svg for a quick plot or --format json for machine-readable output.

Exit status: 0 success, 1 usage or configuration error, 2 numerical or validation failure.";

#[derive(Parser)]
#[command(name = "crwa", version, about = "Quantum Rabi model: RWA, CRWA and exact dynamics", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Energy levels E_kn from every backend
    Levels(Opts),
    /// Population inversion W(tau)
    Inversion(Opts),
    /// CRWA inversion split into constant, ground-state, Rabi, same-k and diff-k parts
    Components(Opts),
    /// Intrinsic-oscillation envelopes and their approximants
    Envelopes(Opts),
    /// Power spectrum of W with predicted line positions
    Power(Opts),
    /// Detected spectral peaks matched against predictions
    Peaks(Opts),
    /// Run the acceptance checks
    Validate(Opts),
}

#[derive(Args)]
struct Opts {
    /// JSON configuration file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    g: Option<f64>,
    /// Mean photon number of the initial coherent field
    #[arg(long)]
    alpha_sq: Option<f64>,
    /// Comma-separated subset of rwa,crwa,exact
    #[arg(long)]
    backends: Option<String>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    /// Fock truncation of the exact backend
    #[arg(long)]
    n_cut: Option<usize>,
    /// Coherent-state tail tolerance
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Highest photon number in the levels table
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// csv, json or svg
    #[arg(long)]
    format: Option<String>,
    /// Shorter spectral record for validate
    #[arg(long)]
    quick: bool,
}

fn resolve(command: Command, opts: Opts) -> rabi_crwa::Result<RunConfig> {
    let file = opts.config.as_deref().map(ConfigLayer::from_json_file).transpose()?;
    let flags = ConfigLayer {
        g: opts.g,
        alpha_sq: opts.alpha_sq,
        backends: opts.backends.as_deref().map(parse_backends).transpose()?,
        tau_max: opts.tau_max,
        n_points: opts.n_points,
        n_cut: opts.n_cut,
        tail_tol: opts.tail_tol,
        output: opts.output,
        format: opts.format.as_deref().map(str::parse::<Format>).transpose()?,
        n_max: opts.n_max,
        quick: opts.quick.then_some(true),
    };
    RunConfig::resolve(command, flags, file)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, opts) = match cli.command {
        Cmd::Levels(o) => (Command::Levels, o),
        Cmd::Inversion(o) => (Command::Inversion, o),
        Cmd::Components(o) => (Command::Components, o),
        Cmd::Envelopes(o) => (Command::Envelopes, o),
        Cmd::Power(o) => (Command::Power, o),
        Cmd::Peaks(o) => (Command::Peaks, o),
        Cmd::Validate(o) => (Command::Validate, o),
    };
    let config = match resolve(command, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let code = run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
