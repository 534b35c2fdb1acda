use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use curvphase_cli::scenario::{run_config_str, write_outputs};
use curvphase_cli::sweep::{run_sweep, sweep_csv};
use curvphase_cli::verify;
use curvphase_cli::{CliError, ReportFormat, Result};

#[derive(Parser)]
#[command(name = "curvphase", version, about = "Steered-curvature phase and reduction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config and write its report and data files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the report and any data files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Run the parameter sweep declared in a config and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for sweep rows (default: one per core).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the built-in verification suite and write its artifacts.
    Verify {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run one scenario and write tidy plot data only.
    EmitPlotData {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.to_path_buf(), e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent.to_path_buf(), e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path.to_path_buf(), e))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out, format } => {
            let started = Instant::now();
            let text = read_config(&config)?;
            let bundle = run_config_str(&text)?;
            let written = write_outputs(&bundle, &out, format)?;
            eprintln!(
                "run finished in {:.2} s, wrote {}",
                started.elapsed().as_secs_f64(),
                written
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            Ok(())
        }
        Command::Sweep { config, out, threads } => {
            let started = Instant::now();
            let text = read_config(&config)?;
            let raw: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("invalid config: {e}")))?;
            let result = run_sweep(&raw, threads)?;
            let path = out.join("sweep.csv");
            write_file(&path, &sweep_csv(&result))?;
            let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
            eprintln!(
                "sweep over {} finished in {:.2} s ({} rows, {} failed), wrote {}",
                result.parameter,
                started.elapsed().as_secs_f64(),
                result.rows.len(),
                failed,
                path.display()
            );
            Ok(())
        }
        Command::Verify { out } => {
            let started = Instant::now();
            let summary = verify::run_all();
            let dir = out.join("verify");
            for outcome in &summary.outcomes {
                println!("{}", outcome.line());
                for (name, contents) in &outcome.artifacts {
                    write_file(&dir.join(name), contents)?;
                }
            }
            eprintln!(
                "verification finished in {:.2} s, artifacts under {}",
                started.elapsed().as_secs_f64(),
                dir.display()
            );
            if summary.all_passed {
                Ok(())
            } else {
                let failed: Vec<String> = summary
                    .outcomes
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("criterion {}", c.number))
                    .collect();
                Err(CliError::Numeric {
                    code: "E_VERIFY",
                    message: format!("{} failed", failed.join(", ")),
                })
            }
        }
        Command::EmitPlotData { config, out } => {
            let started = Instant::now();
            let text = read_config(&config)?;
            let bundle = run_config_str(&text)?;
            let name = bundle
                .config
                .outputs
                .as_ref()
                .and_then(|o| o.plot_data.clone())
                .unwrap_or_else(|| "plot_data.csv".to_string());
            let path = out.join(name);
            write_file(&path, &curvphase_cli::scenario::plot_data_csv(&bundle)?)?;
            eprintln!(
                "plot data written to {} in {:.2} s",
                path.display(),
                started.elapsed().as_secs_f64()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
