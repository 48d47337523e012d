use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lzs_cli::{execute, Command, ConfigSource};

/// Landau-Zener-Stückelberg interference simulator for a driven, flux-modulated qubit.
#[derive(Parser)]
#[command(name = "lzs", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Config file of `key = value` lines (a `.meta` sidecar works too).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Named parameter set: fig4, fig5, fig6a, fig6b.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Override one key, e.g. `--set drive.rabi_mhz=12`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Output file. Without it tables go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Input table for fit-trace, fit-spectrum and calibrate-bessel.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "LZS_WORKERS")]
    workers: Option<usize>,

    /// Solver tolerance (relative and absolute).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Excited-state population versus time.
    Evolve,
    /// Population versus time for each modulation phase.
    SweepPhase,
    /// Steady-state population over detuning and amplitude (or voltage).
    SweepSpectrum,
    /// Closed-form adiabaticity, regime and Rabi-like frequency estimates.
    Formulas,
    /// Fit a damped sine to a `t_us,p1` trace.
    FitTrace,
    /// Calibrate volts to amplitude from Bessel-zero minima.
    CalibrateBessel,
    /// Fit charging and Josephson energies to a flux spectrum.
    FitSpectrum,
    /// Compare rotating-frame and lab-frame evolution.
    ValidateRwa,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Evolve => Command::Evolve,
            Cmd::SweepPhase => Command::SweepPhase,
            Cmd::SweepSpectrum => Command::SweepSpectrum,
            Cmd::Formulas => Command::Formulas,
            Cmd::FitTrace => Command::FitTrace,
            Cmd::CalibrateBessel => Command::CalibrateBessel,
            Cmd::FitSpectrum => Command::FitSpectrum,
            Cmd::ValidateRwa => Command::ValidateRwa,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let source = ConfigSource {
        file: cli.config,
        preset: cli.preset,
        sets: cli.sets,
        out: cli.out,
        input: cli.input,
        workers: cli.workers,
        tol: cli.tol,
    };
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr());
    match execute(cli.command.into(), &source, &mut out, &mut err) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code())
        }
    }
}
