use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tricap::config::{Experiment, ExperimentConfig};
use tricap::diagnostics::measure_angles;
use tricap::experiments::RunControl;
use tricap::io::{fmt_f64, read_csv, read_vtk, write_csv_to};
use tricap::run::{eoc_table, run_experiment};
use tricap::sharp::young_angles;
use tricap::Result;

/// Three-phase flow with surfactant: experiments and diagnostics.
#[derive(Parser, Debug)]
#[command(name = "tricap", version)]
struct Cli {
    /// Directory for all artifacts (overrides `output.directory`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Write a VTK snapshot every n time steps.
    #[arg(long, global = true)]
    snapshot_every: Option<usize>,
    /// Stop each stage after n time steps.
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// Worker threads; falls back to TRICAP_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run { config: PathBuf },
    /// Solve the one-dimensional junction reference of a configuration.
    #[command(name = "reference-1d")]
    Reference1d { config: PathBuf },
    /// Equilibrium angles of three surface tensions (1,2), (1,3), (2,3).
    Young { sigma12: f64, sigma13: f64, sigma23: f64 },
    /// Convergence rates from CSV tables with an `epsilon` column.
    Eoc {
        #[arg(required = true)]
        tables: Vec<PathBuf>,
    },
    /// Junction angles of a VTK snapshot.
    Angles {
        snapshot: PathBuf,
        /// Start point `x,y` for locating the junction.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        hint: Option<Vec<f64>>,
    },
}

fn threads(cli: &Cli) -> Option<usize> {
    cli.threads.or_else(|| std::env::var("TRICAP_THREADS").ok()?.trim().parse().ok())
}

fn load(path: &PathBuf) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(&std::fs::read_to_string(path)?)
}

fn execute(cli: &Cli) -> Result<()> {
    let control = RunControl { max_steps: cli.max_steps, snapshot_every: cli.snapshot_every };
    let mut log = |m: &str| eprintln!("{m}");
    match &cli.command {
        Command::Run { config } | Command::Reference1d { config } => {
            let mut cfg = load(config)?;
            if matches!(cli.command, Command::Reference1d { .. }) {
                cfg.experiment = Experiment::Reference1d;
            }
            let dir = cli.output_dir.clone().unwrap_or_else(|| cfg.output.directory.clone());
            cfg.output.directory = dir.clone();
            let summary = run_experiment(&cfg, control, &dir, &mut log)?;
            for l in &summary.lines {
                println!("{l}");
            }
        }
        Command::Young { sigma12, sigma13, sigma23 } => {
            let psi = young_angles(*sigma12, *sigma13, *sigma23)?;
            let d = psi.map(f64::to_degrees);
            println!("{:.3}, {:.3}, {:.3} degrees", d[0], d[1], d[2]);
            println!("{}, {}, {} radians", fmt_f64(psi[0]), fmt_f64(psi[1]), fmt_f64(psi[2]));
        }
        Command::Eoc { tables } => {
            let t = tables.iter().map(read_csv).collect::<Result<Vec<_>>>()?;
            write_csv_to(std::io::stdout().lock(), &eoc_table(&t)?)?;
        }
        Command::Angles { snapshot, hint } => {
            let img = read_vtk(snapshot)?;
            let domain = img.domain()?;
            let hint = hint.as_ref().map(|h| [h[0], h[1]]);
            let m = measure_angles(&domain, &img.phases()?, hint)?;
            println!("time = {}", img.time);
            println!("junction = ({:.6}, {:.6})", m.junction[0], m.junction[1]);
            let (a, u) = (m.psi_anchored, m.psi_unanchored);
            println!("anchored = {:.6}, {:.6}, {:.6} rad", a[0], a[1], a[2]);
            println!("unanchored = {:.6}, {:.6}, {:.6} rad", u[0], u[1], u[2]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = threads(&cli) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
