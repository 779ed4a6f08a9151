use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lipdyn::config::{load_config, ScanSpec, ScenarioConfig};
use lipdyn::output::{self, fmt17, write_text};
use lipdyn::scenario::{self, Surface};
use lipdyn::units::to_cm1;

/// Wave-packet dynamics of Na2 in light-induced potentials.
#[derive(Parser)]
#[command(name = "lipdyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output directory (overrides `outputs.directory`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Time step in fs (overrides `propagation.dt_fs`).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scenario and write its output files.
    Run { config: PathBuf },
    /// Run every cell of a parameter scan.
    Scan { scanspec: PathBuf },
    /// Bound states of a surface: X, A, Pi or active@<t_ps>.
    Eigen {
        config: PathBuf,
        #[arg(long, default_value = "X")]
        surface: Surface,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Light-induced surfaces and tracked active-surface states, no propagation.
    Lip {
        config: PathBuf,
        /// Comma-separated times in ps.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        times: Vec<f64>,
    },
}

fn load(path: &Path, common: &Common) -> lipdyn::Result<ScenarioConfig> {
    let config = load_config(path)?;
    match common.dt {
        Some(dt) => config.with_dt_fs(dt),
        None => Ok(config),
    }
}

fn out_dir(common: &Common, config: &ScenarioConfig) -> PathBuf {
    common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.raw.outputs.directory))
}

fn execute(cli: &Cli) -> lipdyn::Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Run { config } => {
            let config = load(config, common)?;
            let dir = out_dir(common, &config);
            let outcome = scenario::run_scenario(&config, &dir)?;
            if !common.quiet {
                let rep = &outcome.report;
                let p = rep.final_populations;
                println!("final populations: X {:.6} A {:.6} Pi {:.6}", p[0], p[1], p[2]);
                println!("dominant state: {} weight {:.6}", rep.dominant, rep.dominant_weight);
                println!("outputs written to {}", dir.display());
            }
            match scenario::boundary_error(&outcome.result) {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Scan { scanspec } => {
            let mut spec = ScanSpec::load(scanspec)?;
            if let Some(dt) = common.dt {
                spec = spec.with_dt_fs(dt)?;
            }
            let dir = out_dir(common, &spec.base);
            let rows = scenario::run_scan(&spec, &dir)?;
            if !common.quiet {
                let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
                println!("{} cells, {failed} failed; table in {}", rows.len(), dir.join("scan.csv").display());
            }
            Ok(())
        }
        Command::Eigen { config, surface, count } => {
            let config = load(config, common)?;
            let set = scenario::eigen_command(&config, *surface, *count)?;
            if let Some(dir) = &common.out {
                write_text(&dir.join("energies.csv"), &output::energies_csv(&set))?;
                write_text(&dir.join("states.csv"), &output::states_csv(&set))?;
            }
            if !common.quiet {
                for (i, e) in set.energies.iter().enumerate() {
                    println!("{i} {} cm-1", fmt17(to_cm1(*e)));
                }
            }
            Ok(())
        }
        Command::Lip { config, times } => {
            let config = load(config, common)?;
            let dir = out_dir(common, &config);
            let set = scenario::run_lip(&config, times, &dir)?;
            if !common.quiet {
                println!("{} trajectories, {} crossing events; outputs in {}", set.count(), set.events.len(), dir.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("lipdyn: cannot configure thread pool: {e}");
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lipdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
