use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use ldp_cli::golden;
use ldp_cli::pipeline::{free_energy_report, Pipeline};
use ldp_cli::scenario::Scenario;
use ldp_core::convex::{lf_transform, GridFunction, Support};
use ldp_core::tilt::closed_grid;

#[derive(Parser)]
#[command(
    name = "ldpkit",
    version,
    about = "Free energies, conjugates and rate-function checks for nets of measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the check tolerance of the scenario.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the main window as `t_max:t_min`.
    #[arg(long, global = true)]
    window: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write report.json and the CSV tables here.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario; exits 0 iff every requested check holds.
    Run { scenario: PathBuf },
    /// Conjugate of a `x,value` CSV on `lo:hi:n`.
    Conjugate {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        dual_grid: String,
        /// Treat the input grid as a window onto a larger domain.
        #[arg(long)]
        truncated: bool,
    },
    /// Only the free energy `L` on `G` and `Λ` over the family.
    FreeEnergy { scenario: PathBuf },
    /// Rerun a canned example and compare with its committed report.
    Reproduce { name: String },
}

fn parse_dual(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        bail!("--dual-grid expects lo:hi:n, got `{spec}`");
    };
    let lo: f64 = lo.parse().context("dual grid lo")?;
    let hi: f64 = hi.parse().context("dual grid hi")?;
    let n: usize = n.parse().context("dual grid n")?;
    if !(lo < hi) || n < 2 {
        bail!("--dual-grid needs lo < hi and n ≥ 2");
    }
    Ok(closed_grid(lo, hi, n))
}

fn apply_overrides(s: &mut Scenario, cli: &Cli) -> Result<()> {
    if let Some(t) = cli.tol {
        s.tolerance.check = t;
    }
    if let Some(w) = &cli.window {
        let (a, b) = w.split_once(':').context("--window expects t_max:t_min")?;
        s.window.t_max = a.parse().context("--window t_max")?;
        s.window.t_min = b.parse().context("--window t_min")?;
    }
    s.validate()
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Run { scenario } => {
            let mut s = Scenario::load(scenario)?;
            apply_overrides(&mut s, cli)?;
            let report = Pipeline::new(s)?.report()?;
            emit(&report, cli)?;
            Ok(report.all_hold())
        }
        Command::FreeEnergy { scenario } => {
            let mut s = Scenario::load(scenario)?;
            apply_overrides(&mut s, cli)?;
            let report = free_energy_report(s)?;
            emit(&report, cli)?;
            Ok(report.all_hold())
        }
        Command::Conjugate {
            input,
            output,
            dual_grid,
            truncated,
        } => {
            let f = GridFunction::read_csv(input)?;
            let f = if *truncated {
                f.with_support(Support::Truncated)
            } else {
                f
            };
            let out = lf_transform(&f, &parse_dual(dual_grid)?)?;
            out.write_csv(output)?;
            Ok(true)
        }
        Command::Reproduce { name } => {
            let r = golden::reproduce(name)?;
            emit(&r.report, cli)?;
            for d in &r.differences {
                eprintln!("golden mismatch: {d}");
            }
            if r.differences.is_empty() {
                eprintln!("{name}: matches golden");
            }
            Ok(r.differences.is_empty())
        }
    }
}

fn emit(report: &ldp_cli::Report, cli: &Cli) -> Result<()> {
    match &cli.out_dir {
        Some(dir) => report.write(dir),
        None => {
            print!("{}", report.to_pretty());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
