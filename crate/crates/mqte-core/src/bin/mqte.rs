//! Command-line front end: run experiments, sweep a parameter, dump
//! ground truth, or re-analyze a stored signal.
//!
//! Exit codes: 0 success, 1 any error, 2 trajectory budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mqte_core::config::ExperimentConfig;
use mqte_core::runner::{
    analyze_signal_file, run_experiment, run_sweep, write_oracle, SweepAxis,
};
use mqte_core::spectral::PeakReport;
use mqte_core::MqteError;

#[derive(Parser)]
#[command(
    name = "mqte",
    version,
    about = "Spin-system time-series spectroscopy: simulate measured evolution, \
             sample it, and reconstruct energy gaps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config and write all artifacts.
    Run {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output` key.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun a config over a list of values for one parameter.
    Sweep {
        /// Experiment config (TOML); the swept key is overridden per run.
        #[arg(long)]
        config: PathBuf,
        /// Parameter to vary: shots, gamma, or delta.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated numeric values for the axis.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Output directory; overrides the config's `output` key.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write ground-truth eigenvalues and expected spectral lines for a
    /// config, without simulating.
    Oracle {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output` key.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze a stored signal CSV into a spectrum and peak list.
    Spectrum {
        /// Signal CSV written by `run`; its `.json` metadata sidecar must
        /// sit next to it.
        #[arg(long)]
        signal: PathBuf,
        /// Detection threshold in units of the shot-noise sigma.
        #[arg(long, default_value_t = mqte_core::config::DEFAULT_THRESHOLD)]
        threshold: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code().clamp(1, 255) as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), MqteError> {
    match command {
        Command::Run { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let artifacts = run_experiment(&config, out.as_deref())?;
            println!(
                "wrote {} (N = {}, {} configuration series)",
                artifacts.out_dir.display(),
                artifacts.n_points,
                artifacts.signals.len()
            );
            for (label, peaks) in &artifacts.peaks {
                print_peaks(label, peaks);
            }
            Ok(())
        }
        Command::Sweep {
            config,
            axis,
            values,
            out,
        } => {
            let config = ExperimentConfig::load(&config)?;
            let artifacts = run_sweep(&config, axis, &values, out.as_deref())?;
            println!("wrote {}", artifacts.summary_path.display());
            for row in &artifacts.rows {
                println!(
                    "  {axis} = {}: {} peak(s), dominant |2F| = {:.6}, floor rms = {:.3e}",
                    row.value, row.peak_count, row.dominant_magnitude, row.noise_floor_rms
                );
            }
            Ok(())
        }
        Command::Oracle { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let path = write_oracle(&config, out.as_deref())?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Spectrum { signal, threshold } => {
            let analysis = analyze_signal_file(&signal, threshold)?;
            println!(
                "wrote {} and {}",
                analysis.spectrum_path.display(),
                analysis.peaks_path.display()
            );
            print_peaks(&analysis.label, &analysis.peaks);
            Ok(())
        }
    }
}

fn print_peaks(label: &str, peaks: &[PeakReport]) {
    if peaks.is_empty() {
        println!("  {label}: no significant peaks");
        return;
    }
    for peak in peaks {
        match peak.significance {
            Some(sig) => println!(
                "  {label}: gap {:.6} at bin {} (|2F| = {:.6}, {:.1} sigma)",
                peak.gap, peak.bin, peak.magnitude, sig
            ),
            None => println!(
                "  {label}: gap {:.6} at bin {} (|2F| = {:.6})",
                peak.gap, peak.bin, peak.magnitude
            ),
        }
    }
}
