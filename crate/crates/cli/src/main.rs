use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vfcfc_cli::commands::{
    check_jobs, collect_jobs, export_presets, format_report, run_jobs, Job, Overrides,
};
use vfcfc_core::presets::all_presets;

#[derive(Parser)]
#[command(
    version,
    about = "Vector-field guided constraint-following control simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Selection {
    /// Bundled preset, repeatable; `all` selects the whole catalog
    #[arg(long)]
    preset: Vec<String>,
    /// Scenario file (TOML), repeatable
    #[arg(long)]
    config: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate scenarios and write CSV, metrics and SVG artifacts
    Run {
        #[command(flatten)]
        selection: Selection,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Integration step, overriding the scenario
        #[arg(long)]
        step: Option<f64>,
        /// Simulated time, overriding the scenario
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Grid-check the structural assumptions of scenarios
    CheckAssumptions {
        #[command(flatten)]
        selection: Selection,
    },
    /// Print the preset catalog; with --out-dir also write each as TOML
    ListPresets {
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn jobs(
    selection: &Selection,
    out_dir: Option<&std::path::Path>,
    overrides: Overrides,
    runnable: bool,
) -> Result<Vec<Job>, ExitCode> {
    if selection.preset.is_empty() && selection.config.is_empty() {
        eprintln!("error: pass --preset or --config");
        return Err(ExitCode::from(2));
    }
    collect_jobs(
        &selection.preset,
        &selection.config,
        out_dir,
        overrides,
        runnable,
    )
    .map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            selection,
            out_dir,
            step,
            duration,
        } => {
            let jobs = match jobs(
                &selection,
                out_dir.as_deref(),
                Overrides { step, duration },
                true,
            ) {
                Ok(j) => j,
                Err(code) => return code,
            };
            let mut failed = false;
            for (job, outcome) in jobs.iter().zip(run_jobs(&jobs)) {
                match outcome {
                    Ok(o) => {
                        let m = &o.metrics;
                        println!(
                            "{}: {} rows in {:.2} s, |beta(T)| = {:.3e}, tail max distance {:.4e}",
                            job.spec.id,
                            o.rows,
                            o.elapsed.as_secs_f64(),
                            m.terminal.beta_norm,
                            m.settle.ultimate_bound_est
                        );
                        if let Some(b) = &m.bound {
                            println!(
                                "  dbar = {:.4} (tail inside: {})",
                                b.dbar, b.tail_within_dbar
                            );
                        }
                        println!("  {}", o.csv.display());
                    }
                    Err(e) => {
                        failed = true;
                        eprintln!("error: {}: {e}", job.spec.id);
                    }
                }
            }
            if failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::CheckAssumptions { selection } => {
            let jobs = match jobs(&selection, None, Overrides::default(), false) {
                Ok(j) => j,
                Err(code) => return code,
            };
            let mut failed = false;
            for (job, report) in jobs.iter().zip(check_jobs(&jobs)) {
                match report {
                    Ok(r) => {
                        failed |= !r.all_passed();
                        print!("{}", format_report(&r));
                    }
                    Err(e) => {
                        failed = true;
                        eprintln!("error: {}: {e}", job.spec.id);
                    }
                }
            }
            if failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::ListPresets { out_dir } => {
            for spec in all_presets() {
                println!("{spec}");
            }
            if let Some(dir) = out_dir {
                match export_presets(&dir) {
                    Ok(paths) => {
                        println!("wrote {} scenario files to {}", paths.len(), dir.display())
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
