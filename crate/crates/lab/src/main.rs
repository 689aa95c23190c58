use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graded_lab::{export_matrix, list_experiments, load_config, plot, run, workers_from_env, LabError};

#[derive(Parser)]
#[command(name = "graded-lab", version, about = "Run harmonic analysis experiments on graded groups")]
#[command(after_help = "Worker count: set GRADED_LAB_WORKERS (default: available cores).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a JSON config.
    Run { config: PathBuf },
    /// List experiment names.
    List,
    /// Write two-column plot data for the slope tables of a run.
    PlotData { manifest: PathBuf },
    /// Write the operator of a config in Matrix Market format.
    ExportMatrix {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<bool, LabError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            let workers = workers_from_env()?;
            let manifest = run(&cfg, workers)?;
            for e in &manifest.experiments {
                println!("{}: {} ({})", e.name, if e.passed { "pass" } else { "FAIL" }, e.summary);
            }
            for o in &manifest.outputs {
                println!("wrote {}", cfg.output_dir.join(o).display());
            }
            Ok(manifest.passed())
        }
        Command::List => {
            print!("{}", list_experiments());
            Ok(true)
        }
        Command::PlotData { manifest } => {
            for p in plot::emit_plot_data(&manifest)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
        Command::ExportMatrix { config, output } => {
            let text = export_matrix(&load_config(&config)?)?;
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| LabError::Io { path, source: e })?,
                None => print!("{text}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
