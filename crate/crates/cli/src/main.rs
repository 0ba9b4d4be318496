//! `uavnoma`: coverage of NOMA-assisted UAV networks from the command line.

mod config;
mod sweep;
mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use uavnoma::scenario::{watts_to_dbm, Access, Strategy};

use config::{ExperimentFile, Mode};
use sweep::Point;

const DEFAULT_TRIALS: u64 = 100_000;
const QUICK_TRIALS: u64 = 2_000;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-domain configuration.
    Config(String),
    /// A computation failed.
    Numerical(String),
    Io(String),
    /// The validation suite found a failure.
    Validation(usize),
}

impl CliError {
    fn from_core(e: uavnoma::Error) -> Self {
        match e {
            uavnoma::Error::Config { field, reason } => CliError::Config(format!("field `{field}`: {reason}")),
            other => CliError::Numerical(other.to_string()),
        }
    }

    fn io(e: impl std::fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Validation(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Validation(n) => write!(f, "{n} validation check(s) failed"),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    UserCentric,
    UavCentric,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::UserCentric => Strategy::UserCentric,
            StrategyArg::UavCentric => Strategy::UavCentric,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AccessArg {
    Noma,
    Oma,
}

impl From<AccessArg> for Access {
    fn from(a: AccessArg) -> Self {
        match a {
            AccessArg::Noma => Access::Noma,
            AccessArg::Oma => Access::Oma,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "uavnoma", version, about = "Coverage of NOMA-assisted UAV cellular networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment file with `network`, `link`, `sweep` and `analysis` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, global = true, value_enum)]
    access: Option<AccessArg>,
    /// Desk-check scale: few trials.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form coverage at one point.
    Analytic,
    /// Monte Carlo coverage at one point.
    Mc,
    /// Run the sweep described by `--config` and write CSV.
    Sweep,
    /// Cross-check analytics against independent evaluations and simulation.
    Validate,
}

impl Cli {
    fn experiment(&self) -> Result<ExperimentFile, CliError> {
        match &self.config {
            Some(p) => ExperimentFile::load(p),
            None => Ok(ExperimentFile::default()),
        }
    }

    fn trials(&self, configured: u64) -> u64 {
        match (self.trials, self.quick) {
            (Some(n), _) => n,
            (None, true) => configured.min(QUICK_TRIALS),
            (None, false) => configured,
        }
    }

    fn write_rows(&self, rows: &[sweep::Row]) -> Result<(), CliError> {
        match &self.out {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?;
                sweep::write_csv(rows, BufWriter::new(f))
            }
            None => sweep::write_csv(rows, io::stdout().lock()),
        }
    }
}

fn warn_infeasible(p: &Point) {
    let steps = sweep::infeasible_steps(p);
    if !steps.is_empty() {
        eprintln!(
            "warning: {} {} link at {}={}: decoding is infeasible for the {}; coverage there is 0",
            p.strategy.as_str(),
            p.access.as_str(),
            p.axis,
            p.value,
            steps.join(", ")
        );
    }
}

fn single_point(cli: &Cli, mode: Mode) -> Result<(), CliError> {
    let file = cli.experiment()?;
    let scenario = file.scenario()?;
    let sweep = file.sweep.as_ref();
    if cli.trials == Some(0) && mode.mc() {
        return Err(CliError::Config("--trials must be >= 1".into()));
    }
    let point = Point {
        strategy: cli.strategy.map(Into::into).or(sweep.map(|s| s.strategy)).unwrap_or(Strategy::UserCentric),
        access: cli.access.map(Into::into).or(sweep.map(|s| s.access)).unwrap_or(Access::Noma),
        scenario,
        axis: "tx_power_dbm".into(),
        value: watts_to_dbm(scenario.network.tx_power),
        mode,
        trials: cli.trials(sweep.map_or(DEFAULT_TRIALS, |s| s.trials)),
        seed: cli.seed.or(sweep.map(|s| s.seed)).unwrap_or(1),
    };
    if mode.analytic() {
        warn_infeasible(&point);
    }
    let rows = sweep::evaluate(&point, &file.analysis)?;
    cli.write_rows(&rows)
}

fn run_sweep(cli: &Cli) -> Result<(), CliError> {
    if cli.config.is_none() {
        return Err(CliError::Config("sweep needs --config".into()));
    }
    let file = cli.experiment()?;
    let Some(mut spec) = file.sweep.clone() else {
        return Err(CliError::Config("missing `sweep` section".into()));
    };
    if let Some(s) = cli.strategy {
        spec.strategy = s.into();
    }
    if let Some(a) = cli.access {
        spec.access = a.into();
        for series in &mut spec.series {
            series.access = None;
        }
    }
    let trials = cli.trials(spec.trials);
    if trials == 0 && spec.mode.mc() {
        return Err(CliError::Config("--trials must be >= 1".into()));
    }
    let points = sweep::expand(&spec, &file.scenario()?, trials, cli.seed.unwrap_or(spec.seed))?;
    if spec.mode.analytic() {
        points.iter().for_each(warn_infeasible);
    }
    let rows = sweep::run(&points, &file.analysis)?;
    cli.write_rows(&rows)
}

fn run_validate(cli: &Cli) -> Result<(), CliError> {
    let trials = cli.trials.unwrap_or(if cli.quick { 5_000 } else { 50_000 });
    let checks = validate::run(trials, cli.seed.unwrap_or(1)).map_err(CliError::from_core)?;
    let mut out = io::stdout().lock();
    let mut failed = 0;
    for c in &checks {
        failed += usize::from(!c.pass);
        writeln!(out, "{}: {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail).map_err(CliError::io)?;
    }
    if failed > 0 {
        Err(CliError::Validation(failed))
    } else {
        Ok(())
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("UAVNOMA_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("UAVNOMA_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::io)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Analytic => single_point(&cli, Mode::Analytic),
        Command::Mc => single_point(&cli, Mode::Mc),
        Command::Sweep => run_sweep(&cli),
        Command::Validate => run_validate(&cli),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let config = CliError::from_core(uavnoma::Error::Config {
            field: "m_desired",
            reason: "too large".into(),
        });
        assert_eq!(config.exit_code(), 2);
        let numerical = CliError::from_core(uavnoma::Error::Numerical {
            what: "outer integral",
            estimate: 0.5,
        });
        assert_eq!(numerical.exit_code(), 3);
        assert_eq!(CliError::from_core(uavnoma::Error::Domain("r < 0".into())).exit_code(), 3);
        assert_eq!(CliError::Validation(1).exit_code(), 1);
    }

    #[test]
    fn quick_caps_configured_trials() {
        let cli = Cli::parse_from(["uavnoma", "sweep", "--quick"]);
        assert_eq!(cli.trials(100_000), QUICK_TRIALS);
        assert_eq!(cli.trials(500), 500);
        let cli = Cli::parse_from(["uavnoma", "sweep", "--quick", "--trials", "7"]);
        assert_eq!(cli.trials(100_000), 7);
    }
}
