use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpvsc_harness::{exit, HarnessError, SHIPPED_SPECS};

/// Run Tikhonov-regularization experiments described by TOML files.
///
/// Exit status: 0 pass, 2 acceptance failure, 3 invalid spec, 4 solver stall,
/// 1 any other error.
#[derive(Parser)]
#[command(name = "lpvsc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write report.csv and summary.toml.
    Run {
        /// Spec file, or the name of a bundled spec.
        spec: String,
        /// Base output directory (default: $LPVSC_OUT_DIR, then ./out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a log-log SVG of a rate report.
    Plot {
        /// report.csv or the directory containing it.
        report: PathBuf,
        out: PathBuf,
    },
    /// Run only the calibration stage and print the constants.
    Calibrate { spec: String },
    /// List the bundled specs.
    ListSpecs,
}

fn fail(e: HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(lpvsc_harness::error_exit_code(&e) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, out } => {
            let spec = match lpvsc_harness::load_spec(&spec) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match lpvsc_harness::run_and_write(&spec, out.as_deref()) {
                Ok((outcome, written)) => {
                    for c in &outcome.checks {
                        let tag = if c.passed { "pass" } else { "FAIL" };
                        println!("{tag}  {}: {:.6e} ({:?} {:.6e})", c.name, c.value, c.relation, c.limit);
                    }
                    if let Some(r) = &outcome.report {
                        println!("slope {:.4} (theoretical {:.4})", r.fitted_slope, r.theoretical_exponent);
                    }
                    for p in written {
                        println!("wrote {}", p.display());
                    }
                    let code = lpvsc_harness::exit_code(&outcome);
                    if code == exit::STALL {
                        eprintln!("solver stalled at {:?}", outcome.report.as_ref().map(|r| &r.excluded));
                    }
                    ExitCode::from(code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Plot { report, out } => match lpvsc_harness::plot_report(&report, &out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Command::Calibrate { spec } => {
            match lpvsc_harness::load_spec(&spec).and_then(|s| lpvsc_harness::calibrate(&s)) {
                Ok(constants) => {
                    print!("{}", toml::to_string(&constants).expect("constants serialise"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::ListSpecs => {
            for s in SHIPPED_SPECS {
                println!("{:<16} {}", s.name, s.purpose);
            }
            ExitCode::SUCCESS
        }
    }
}
