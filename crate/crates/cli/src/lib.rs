//! Command-line front end for `pdm-dirac`.
//!
//! [`run`] takes the full argv and returns the process exit code:
//! `0` success, `1` verification failure, `2` usage or parameter error,
//! `3` internal error.

use std::fs;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use thiserror::Error;

use pdm_dirac::model::{effective_potential, partner_potentials, AmbiguityParams};
use pdm_dirac::morse::{
    closed_form_spectrum, lower_wavefunction_printed, lower_wavefunction_scaled,
    normalization_constant, upper_potential, upper_wavefunction,
};
use pdm_dirac::numerics::{eigen_lowest, hamiltonian_t};
use pdm_dirac::transform::{PointCoordinate, ScalarField};
use pdm_dirac::verify::run_suite;
use pdm_dirac::{GridSpec, Grid, MorseParams, Normalization, Suite};

pub mod config;
pub mod output;

use config::{parse_config, ConfigFile};
use output::{report_csv, report_json, table_csv, table_json, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const MIN_POINTS: usize = 65;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pdm_dirac::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("encoding: {0}")]
    Encode(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Encode(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Encode(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(pdm_dirac::Error::Solver(_)) => EXIT_INTERNAL,
            CliError::Core(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Encode(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pdm-dirac", version, about = "Dirac equation with position-dependent mass and Fermi velocity: Morse system")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Constant shift of the partner potentials
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Grid points (at least 65)
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub normalization: Option<NormalizationArg>,
    /// key=value file; explicit flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and finite-difference bound-state spectrum
    Spectrum,
    /// Sample one spinor component of a bound level
    Wavefunction {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "t")]
        coordinate: CoordinateArg,
        #[arg(long, value_enum, default_value = "upper")]
        component: Component,
    },
    /// Partner potentials V+ and V-
    Partner {
        #[arg(long, value_enum, default_value = "t")]
        coordinate: CoordinateArg,
    },
    /// Shift of the effective potential for m = 1/(2 alpha^2 x^2)
    EffectivePotential {
        #[arg(long, allow_negative_numbers = true)]
        eta: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        x_min: f64,
        #[arg(long, default_value_t = 5.0)]
        x_max: f64,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Component,
    Spinor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoordinateArg {
    X,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Component {
    Upper,
    LowerOperator,
    /// the printed closed form, kept for comparison
    #[value(name = "lower-paper")]
    LowerPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Spectrum,
    Susy,
    Dirac,
    Effective,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Spectrum => Suite::Spectrum,
            SuiteArg::Susy => Suite::Susy,
            SuiteArg::Dirac => Suite::Dirac,
            SuiteArg::Effective => Suite::Effective,
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: MorseParams,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub normalization: Normalization,
}

impl RunConfig {
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::with_t_grid(self.t_min, self.t_max, self.points)
    }

    pub fn t_grid(&self) -> Result<Grid, CliError> {
        Ok(self.grid_spec().t_grid()?)
    }
}

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.parse(key),
    }
}

fn pick_enum<T: ValueEnum>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>, CliError> {
    match (flag, cfg.get(key)) {
        (Some(v), _) => Ok(Some(v)),
        (None, None) => Ok(None),
        (None, Some(raw)) => T::from_str(raw, false)
            .map(Some)
            .map_err(|_| CliError::Usage(format!("config: invalid value {raw:?} for {key}"))),
    }
}

/// Merges flags over the config file (read from `config_text` when given).
pub fn resolve(common: &CommonArgs, config_text: Option<&str>) -> Result<RunConfig, CliError> {
    let cfg = match config_text {
        Some(text) => parse_config(text)?,
        None => ConfigFile::default(),
    };
    let required = |v: Option<f64>, key: &str| {
        v.ok_or_else(|| CliError::Usage(format!("--{key} is required (flag or config)")))
    };
    let omega0 = required(pick(common.omega0, &cfg, "omega0")?, "omega0")?;
    let omega1 = required(pick(common.omega1, &cfg, "omega1")?, "omega1")?;
    let alpha = required(pick(common.alpha, &cfg, "alpha")?, "alpha")?;
    let mut params = MorseParams::new(omega0, omega1, alpha)?;
    if let Some(lambda) = pick(common.lambda, &cfg, "lambda")? {
        params = params.with_lambda_shift(lambda)?;
    }

    let defaults = GridSpec::default();
    let t_min = pick(common.t_min, &cfg, "t_min")?.unwrap_or(defaults.t_min);
    let t_max = pick(common.t_max, &cfg, "t_max")?.unwrap_or(defaults.t_max);
    let points = pick(common.points, &cfg, "points")?.unwrap_or(defaults.n_t);
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(CliError::Usage(format!("need finite t_min < t_max, got [{t_min}, {t_max}]")));
    }
    if points < MIN_POINTS {
        return Err(CliError::Usage(format!("--points must be at least {MIN_POINTS}, got {points}")));
    }

    let format = pick_enum(common.format, &cfg, "format")?.unwrap_or(Format::Csv);
    let normalization = match pick_enum(common.normalization, &cfg, "normalization")? {
        Some(NormalizationArg::Spinor) => Normalization::Spinor,
        _ => Normalization::Component,
    };
    let output = common
        .output
        .clone()
        .or_else(|| cfg.get("output").map(PathBuf::from));
    Ok(RunConfig {
        params,
        t_min,
        t_max,
        points,
        format,
        output,
        normalization,
    })
}

/// Parses argv and resolves the configuration without running anything.
pub fn parse_invocation<I, T>(argv: I) -> Result<(RunConfig, Command), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match &cli.common.config {
        Some(path) => Some(
            fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let config = resolve(&cli.common, text.as_deref())?;
    Ok((config, cli.command))
}

fn spectrum_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let grid = cfg.t_grid()?;
    let closed = closed_form_spectrum(&cfg.params);
    let pairs = eigen_lowest(&hamiltonian_t(&upper_potential(&grid, &cfg.params))?, closed.levels.len())?;
    let mut table = Table::new(vec!["n", "kappa", "ksq_closed", "E_closed", "ksq_numeric", "abs_error"]);
    for (level, pair) in closed.levels.iter().zip(&pairs) {
        table.push(vec![
            Cell::Int(level.n as i64),
            Cell::Float(level.kappa),
            Cell::Float(level.ksq),
            Cell::Float(level.energy),
            Cell::Float(pair.value),
            Cell::Float((pair.value - level.ksq).abs()),
        ]);
    }
    Ok(table)
}

fn abscissa_grid(cfg: &RunConfig, coordinate: CoordinateArg) -> Result<Grid, CliError> {
    match coordinate {
        CoordinateArg::T => cfg.t_grid(),
        CoordinateArg::X => Ok(cfg.grid_spec().x_image(&cfg.params, cfg.points)?),
    }
}

fn complex_table(field: &ScalarField<Complex64>) -> Table {
    let mut table = Table::new(vec!["abscissa", "re", "im"]);
    for (a, v) in field.grid().points().zip(field.values()) {
        table.push(vec![Cell::Float(a), Cell::Float(v.re), Cell::Float(v.im)]);
    }
    table
}

fn wavefunction_table(cfg: &RunConfig, n: usize, grid: &Grid, component: Component) -> Result<Table, CliError> {
    let params = &cfg.params;
    let constant = normalization_constant(n, params, grid, cfg.normalization)?;
    let field = match component {
        Component::Upper => {
            let (raw, _) = upper_wavefunction(n, params, grid, false)?;
            raw.map(|v| Complex64::new(v * constant, 0.0))
        }
        Component::LowerOperator => lower_wavefunction_scaled(n, params, grid, constant)?,
        Component::LowerPrinted => {
            let component_constant = normalization_constant(n, params, grid, Normalization::Component)?;
            lower_wavefunction_printed(n, params, grid)?.scaled(constant / component_constant)
        }
    };
    Ok(complex_table(&field))
}

fn partner_table(cfg: &RunConfig, grid: &Grid, coordinate: CoordinateArg) -> Result<Table, CliError> {
    let point = match coordinate {
        CoordinateArg::T => PointCoordinate::T,
        CoordinateArg::X => PointCoordinate::X,
    };
    let mut table = Table::new(vec!["abscissa", "vplus", "vminus"]);
    for a in grid.points() {
        let (vp, vm) = partner_potentials(a, point, &cfg.params)?;
        table.push(vec![Cell::Float(a), Cell::Float(vp), Cell::Float(vm)]);
    }
    Ok(table)
}

fn effective_table(cfg: &RunConfig, grid: &Grid, amb: &AmbiguityParams) -> Result<Table, CliError> {
    let params = &cfg.params;
    let a2 = params.alpha() * params.alpha();
    let mut system = Vec::with_capacity(grid.len());
    for x in grid.points() {
        system.push(partner_potentials(x, PointCoordinate::X, params)?.0);
    }
    let system = ScalarField::new(*grid, system)?;
    let mass = ScalarField::from_fn(*grid, |x| 1.0 / (2.0 * a2 * x * x));
    let out = effective_potential(&system, &mass, amb)?;
    let mut table = Table::new(vec!["x", "veff_shift"]);
    for ((x, v), s) in grid.points().zip(out.values()).zip(system.values()) {
        table.push(vec![Cell::Float(x), Cell::Float(v - s)]);
    }
    Ok(table)
}

enum Outcome {
    Pass,
    VerifyFailed,
}

fn execute(cfg: &RunConfig, command: &Command) -> Result<(Vec<u8>, Outcome), CliError> {
    let encode = |table: Table, grid: &Grid| -> Result<Vec<u8>, CliError> {
        match cfg.format {
            Format::Csv => table_csv(&table),
            Format::Json => table_json(&table, &cfg.params, grid),
        }
    };
    let bytes = match *command {
        Command::Spectrum => encode(spectrum_table(cfg)?, &cfg.t_grid()?)?,
        Command::Wavefunction { n, coordinate, component } => {
            let grid = abscissa_grid(cfg, coordinate)?;
            encode(wavefunction_table(cfg, n, &grid, component)?, &grid)?
        }
        Command::Partner { coordinate } => {
            let grid = abscissa_grid(cfg, coordinate)?;
            encode(partner_table(cfg, &grid, coordinate)?, &grid)?
        }
        Command::EffectivePotential { eta, beta, gamma, x_min, x_max } => {
            let amb = AmbiguityParams::new(eta, beta, gamma)?;
            let grid = Grid::new(pdm_dirac::Coordinate::X, x_min, x_max, cfg.points)?;
            encode(effective_table(cfg, &grid, &amb)?, &grid)?
        }
        Command::Verify { suite } => {
            let report = run_suite(&cfg.params, &cfg.grid_spec(), suite.into())?;
            let bytes = match cfg.format {
                Format::Csv => report_csv(&report)?,
                Format::Json => report_json(&report)?,
            };
            let outcome = if report.all_passed() { Outcome::Pass } else { Outcome::VerifyFailed };
            return Ok((bytes, outcome));
        }
    };
    Ok((bytes, Outcome::Pass))
}

/// Runs one invocation, writing results to `out` (or the `--output` file) and
/// diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    if let Err(e) = Cli::try_parse_from(&argv) {
        let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        let text = e.render().to_string();
        let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
        return code;
    }
    let result = panic::catch_unwind(AssertUnwindSafe(|| -> Result<Outcome, CliError> {
        let (cfg, command) = parse_invocation(&argv)?;
        let (bytes, outcome) = execute(&cfg, &command)?;
        match &cfg.output {
            Some(path) => fs::write(path, &bytes)?,
            None => out.write_all(&bytes)?,
        }
        Ok(outcome)
    }));
    match result {
        Ok(Ok(Outcome::Pass)) => EXIT_OK,
        Ok(Ok(Outcome::VerifyFailed)) => {
            let _ = writeln!(err, "verification failed");
            EXIT_VERIFY_FAILED
        }
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
        Err(_) => {
            let _ = writeln!(err, "error: internal failure");
            EXIT_INTERNAL
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
