use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use corrnoise::config::RunConfig;
use corrnoise::figures::{self, Figure, FigureOptions};
use corrnoise::run;
use corrnoise::units::{self, Dimension};
use corrnoise::verify::{self, Mutation, Suite, VerifyOptions};

/// Two-qubit dynamics under spatially correlated noise.
#[derive(Parser)]
#[command(name = "corrnoise", version, about)]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, env = "CORRNOISE_WORKERS", global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the scenario described by a TOML config and write a CSV.
    Simulate {
        config: PathBuf,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind a figure (fig2 … fig7, or `all`).
    Figure {
        name: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// θ-grid size for fig3b.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run the invariant and analytic-oracle suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, hide = true)]
        inject: Option<Mutation>,
    },
    /// Tabulate the master-equation coefficients of a config at given times.
    Rates {
        config: PathBuf,
        /// Comma-separated times, each with a unit (e.g. `1 ns,0.5us`).
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<String>,
        /// Evaluate 1/f scenarios by generic quadrature instead of closed forms.
        #[arg(long)]
        generic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Numeric failure (exit 1) vs usage or configuration error (exit 2).
enum Failure {
    Numeric(anyhow::Error),
    Usage(anyhow::Error),
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn numeric<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Numeric(e.into())
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    RunConfig::parse(&text).map_err(|e| usage(anyhow::anyhow!("{}: {e}", path.display())))
}

fn write_table(table: &corrnoise::output::Table, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => table.save(p).with_context(|| format!("writing {}", p.display())).map_err(numeric),
        None => table.write(std::io::stdout().lock()).context("writing stdout").map_err(numeric),
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { config, out } => {
            let cfg = load(&config)?;
            let traj = run::simulate(&cfg).map_err(numeric)?;
            write_table(&run::trajectory_table(&cfg, &traj), out.as_deref())?;
            let last = traj.states.last().expect("at least one time point");
            let worst_trace = traj.states.iter().map(|s| s.diagnostics().trace_defect).fold(0.0, f64::max);
            eprintln!(
                "{}: {} points to t = {} us, final concurrence {:.6}, max trace defect {:.1e}, final min eigenvalue {:.1e}",
                cfg.scenario.name(),
                traj.len(),
                traj.times.last().unwrap(),
                traj.measures.last().unwrap().concurrence,
                worst_trace,
                last.diagnostics().min_eigenvalue
            );
            Ok(())
        }
        Command::Figure { name, out, grid } => {
            let list: Vec<Figure> =
                if name == "all" { Figure::ALL.to_vec() } else { vec![name.parse().map_err(usage)?] };
            let opts = FigureOptions { grid };
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display())).map_err(usage)?;
            for fig in list {
                let files = figures::generate(fig, &opts).map_err(|e| match e {
                    figures::FigureError::Grid(_) => usage(e),
                    e => numeric(e),
                })?;
                for (file, table) in files {
                    let path = out.join(file);
                    table.save(&path).with_context(|| format!("writing {}", path.display())).map_err(numeric)?;
                    eprintln!("wrote {}", path.display());
                }
            }
            Ok(())
        }
        Command::Verify { suite, seed, inject } => {
            let report = verify::run(&VerifyOptions { suite, seed, mutation: inject });
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(numeric(anyhow::anyhow!("verification failed")))
            }
        }
        Command::Rates { config, at, generic, out } => {
            let cfg = load(&config)?;
            let times = at
                .iter()
                .map(|s| units::parse(s, Dimension::Time).with_context(|| format!("--at `{s}`")))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::Usage)?;
            let table = run::rates_at(&cfg, &times, generic).map_err(numeric)?;
            write_table(&table, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not configure {n} workers: {e}");
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
