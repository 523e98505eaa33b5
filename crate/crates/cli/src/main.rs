use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tdd_cli::error::CliError;
use tdd_cli::presets::PRESET_IDS;
use tdd_cli::run::{classify_report, run_evolve, run_figures, run_oracle, run_sweep, RunOutput};
use tdd_cli::config::Ini;
use tdd_cli::scenario::{state_from_ini, Overrides, Scenario};
use tdd_core::oracle::MinimizeOptions;

/// Trace-distance discord and concurrence of two coupled qubits under
/// dephasing.
#[derive(Parser)]
#[command(name = "tdd", version)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for randomised runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct GridFlags {
    /// End of the time window; overrides grid.t_max.
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of time samples; overrides grid.samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Plateau tolerance; overrides output.level_tol.
    #[arg(long)]
    level_tol: Option<f64>,
    /// Kink threshold in units of the local curvature scale; overrides output.kink_tol.
    #[arg(long)]
    kink_tol: Option<f64>,
}

impl GridFlags {
    fn overrides(self) -> Overrides {
        Overrides { t_max: self.t_max, samples: self.samples, level_tol: self.level_tol, kink_tol: self.kink_tol }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Single trajectory: <stem>.csv and <stem>_events.csv.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Long-format sweep over one or two parameter axes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Figure preset data, events and provenance note.
    Figure {
        /// Preset id, or `all`.
        #[arg(long)]
        preset: String,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Closed-form discord against the brute-force minimisation.
    Oracle {
        /// Number of random X states.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = MinimizeOptions::default().restarts)]
        restarts: usize,
        /// Check the single [state] of this config instead of random states.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Regime and closed-form event times of an MMM triple at g = 0.
    Classify {
        #[arg(allow_negative_numbers = true)]
        c1: f64,
        #[arg(allow_negative_numbers = true)]
        c2: f64,
        #[arg(allow_negative_numbers = true)]
        c3: f64,
        #[arg(long, default_value_t = 2.0)]
        t_s: f64,
    },
}

fn load(path: &Path, overrides: &Overrides) -> Result<(Scenario, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
    Ok((Scenario::parse(&text, overrides)?, stem))
}

fn finish(out: RunOutput, dir: &Path) -> Result<(), CliError> {
    out.write_to(dir)?;
    for f in &out.files {
        println!("{}", dir.join(&f.name).display());
    }
    if out.formal_rows > 0 {
        eprintln!("note: {} rows from non-physical initial states are flagged physical = 0", out.formal_rows);
    }
    match out.physicality_error() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve { config, grid } => {
            let (scenario, stem) = load(&config, &grid.overrides())?;
            finish(run_evolve(&scenario, &stem)?, &cli.out)
        }
        Command::Sweep { config, grid } => {
            let (scenario, stem) = load(&config, &grid.overrides())?;
            finish(run_sweep(&scenario, &stem)?, &cli.out)
        }
        Command::Figure { preset, grid } => {
            let ids: Vec<&str> = if preset == "all" { PRESET_IDS.to_vec() } else { vec![preset.as_str()] };
            finish(run_figures(&ids, &grid.overrides())?, &cli.out)
        }
        Command::Oracle { count, restarts, config } => {
            let state = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    Some(state_from_ini(&Ini::parse(&text)?)?.build()?)
                }
                None => None,
            };
            let opts = MinimizeOptions { restarts, ..Default::default() };
            finish(run_oracle(count, cli.seed, &opts, state)?, &cli.out)
        }
        Command::Classify { c1, c2, c3, t_s } => {
            print!("{}", classify_report(c1, c2, c3, t_s)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

