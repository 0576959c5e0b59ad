use clap::Parser;
use curvcomp::scene::{emit_report, parse_scene, run_scene};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Run one curvature-comparison scene and write its report.
#[derive(Debug, Parser)]
#[command(name = "curvcomp", version)]
struct Args {
    /// Scene description (JSON).
    #[arg(long)]
    scene: PathBuf,

    /// Output directory; overrides the scene's output.dir.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write per-row CSV files.
    #[arg(long, overrides_with = "no_csv")]
    csv: bool,

    /// Do not write CSV files.
    #[arg(long = "no-csv", overrides_with = "csv")]
    no_csv: bool,

    /// Tolerance; overrides the scene's tol.
    #[arg(long)]
    tol: Option<f64>,

    /// Only print errors.
    #[arg(long)]
    quiet: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("CURVCOMP_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| format!("CURVCOMP_THREADS: not a count: {value:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let mut spec = match parse_scene(&args.scene) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.class());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(tol) = args.tol {
        if let Err(e) = spec.set_tol(tol) {
            eprintln!("error [{}]: {e}", e.class());
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from(&spec.output.dir));
    let csv = if args.no_csv { false } else { args.csv || spec.output.csv };

    let start = Instant::now();
    let report = run_scene(&spec);
    let elapsed = start.elapsed();

    match emit_report(&report, &dir, csv) {
        Ok(paths) => {
            if !args.quiet {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.class());
            return ExitCode::from(2);
        }
    }
    if let Some(err) = &report.error {
        eprintln!("error [{}]: {}", err.class, err.message);
    } else if !args.quiet {
        println!(
            "{} check: {} ({:.3} s)",
            spec.check.name(),
            if report.pass { "pass" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    ExitCode::from(report.exit_code() as u8)
}
