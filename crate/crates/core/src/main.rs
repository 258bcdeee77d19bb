use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ris_smbm::analysis::BoundMode;
use ris_smbm::cli::presets::{preset, Preset};
use ris_smbm::cli::{
    cmd_bound, cmd_simulate, cmd_tables, load_config, parse_config, CliError, ExperimentConfig, Overrides, TableSet,
};

#[derive(Parser)]
#[command(name = "ris-smbm", version, about = "RIS-aided spatial media-based modulation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file (TOML, or a JSON echo written by a previous run).
    config: Option<PathBuf>,
    /// Use a built-in figure preset instead of a file.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Run only the named experiment section.
    #[arg(long)]
    experiment: Option<String>,
    /// Override the seed of every experiment.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER sweep; writes <name>_ber.csv and <name>_config.json.
    Simulate(RunArgs),
    /// Union-bound ABER; writes <name>_bound.csv and <name>_config.json.
    Bound {
        #[command(flatten)]
        run: RunArgs,
        /// `symmetric` (one representative transmitted pair) or `full`.
        #[arg(long, default_value = "symmetric")]
        mode: String,
    },
    /// Energy-saving, data-rate and complexity tables.
    Tables {
        /// all, table2, table3, table4 or fig2.
        #[arg(long, default_value = "all")]
        preset: String,
        /// Custom parameter row `M,n_T,m_rf[,N]`; repeatable.
        #[arg(long = "row")]
        rows: Vec<String>,
        /// Also write CSV files here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print a built-in preset as a configuration file.
    Preset { name: String },
}

fn experiments(args: &RunArgs) -> Result<Vec<ExperimentConfig>, CliError> {
    let overrides = Overrides { seed: args.seed, workers: args.workers };
    match (&args.config, &args.preset) {
        (Some(path), None) => load_config(path, &overrides),
        (None, Some(name)) => match preset(name)? {
            Preset::Config(text) => parse_config(&text, &overrides),
            Preset::Tables(_) => {
                Err(CliError::Config(format!("'{name}' is a table preset; use `tables --preset {name}`")))
            }
        },
        _ => Err(CliError::Config("give a configuration file or --preset".into())),
    }
}

fn parse_row(text: &str) -> Result<(usize, usize, u32, Option<usize>), CliError> {
    let bad = || CliError::Config(format!("--row expects M,n_T,m_rf[,N] (got '{text}')"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let m = parts[0].parse().map_err(|_| bad())?;
    let n_t = parts[1].parse().map_err(|_| bad())?;
    let m_rf = parts[2].parse().map_err(|_| bad())?;
    let n = parts.get(3).map(|p| p.parse()).transpose().map_err(|_| bad())?;
    Ok((m, n_t, m_rf, n))
}

fn report(written: &[PathBuf]) {
    for path in written {
        println!("wrote {}", path.display());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => {
            let exps = experiments(&args)?;
            report(&cmd_simulate(&exps, args.experiment.as_deref(), &args.out_dir)?);
        }
        Command::Bound { run, mode } => {
            let mode = match mode.as_str() {
                "symmetric" => BoundMode::Symmetric,
                "full" => BoundMode::Full,
                other => return Err(CliError::Config(format!("unknown bound mode '{other}' (symmetric or full)"))),
            };
            let exps = experiments(&run)?;
            report(&cmd_bound(&exps, run.experiment.as_deref(), &run.out_dir, mode)?);
        }
        Command::Tables { preset: name, rows, out_dir } => {
            let set = match preset(&name) {
                Ok(Preset::Tables(set)) => set,
                _ => name.parse::<TableSet>()?,
            };
            let rows = rows.iter().map(|r| parse_row(r)).collect::<Result<Vec<_>, _>>()?;
            print!("{}", cmd_tables(set, &rows, out_dir.as_deref())?);
        }
        Command::Preset { name } => match preset(&name)? {
            Preset::Config(text) => print!("{text}"),
            Preset::Tables(_) => println!("# '{name}' is a table preset: run `ris-smbm tables --preset {name}`"),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
