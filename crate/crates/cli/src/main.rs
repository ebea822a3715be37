//! `soar` command line: solve, bench, filters and trace.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure. Errors go
//! to stderr as `error[config]: ...` or `error[runtime]: ...`.

mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use soar::bench::{
    discrepancy_trace, run_matrix, run_single, write_records_csv, write_traces, ExperimentRecord, ExperimentSpec,
    RunStatus, TraceSpec,
};
use soar::filters::{write_filter_curve, DampingConfig};
use soar::problems::build_integral_problem;
use soar::solvers::write_trajectory_csv;
use soar::SoarError;
use toml::Table;

use config::{FiltersSpec, SolveSpec};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "error[config]: {m}"),
            CliError::Runtime(m) => write!(f, "error[runtime]: {m}"),
        }
    }
}

impl From<SoarError> for CliError {
    fn from(e: SoarError) -> Self {
        match e {
            SoarError::Config(m) => CliError::Config(m),
            SoarError::Parse(_)
            | SoarError::Domain(_)
            | SoarError::DimensionMismatch { .. }
            | SoarError::NonFinite { .. } => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

#[derive(Parser)]
#[command(
    name = "soar",
    version,
    about = "Second order asymptotical regularization: solvers, benchmarks and filter curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method with one stopping rule on a test problem.
    Solve(Common),
    /// Run the cross product of methods, rules, noise levels and seeds.
    Bench(Common),
    /// Emit discrepancy traces chi(t) for several damping values.
    Trace(Common),
    /// Tabulate the spectral filters g, phi, r over an (alpha, lambda) grid.
    Filters(FilterArgs),
}

#[derive(Args)]
struct Common {
    /// TOML config with [solve], [bench], [trace] or [filters] tables.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Shipped parameter set, applied before --config.
    #[arg(long, value_parser = ["example1", "example2"])]
    preset: Option<String>,
    /// Set a config key; repeatable. Scalars given for list keys become one-element lists.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_name = "DIR", default_value = "out")]
    output_dir: PathBuf,
    /// Noise seed (bench: replaces the seed list).
    #[arg(long)]
    seed: Option<u64>,
    /// Parallel runs (bench only).
    #[arg(long)]
    workers: Option<usize>,
    /// Total energy rule with the threshold 1.1 delta^(4p/(4p+1)).
    #[arg(long)]
    table_mode: bool,
    #[arg(long)]
    max_iter: Option<usize>,
    /// -v prints one line per completed run.
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    eta: Option<f64>,
    /// Operator norm ||A||.
    #[arg(long)]
    norm: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Number of spectral points.
    #[arg(long)]
    lambdas: Option<usize>,
}

fn command() -> clap::Command {
    let mut cmd = Cli::command();
    for s in config::SECTIONS {
        cmd = cmd.mut_subcommand(s, |c| c.after_long_help(config::help_text(s)));
    }
    cmd
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let mut cmd = command();
    if args.len() <= 1 {
        // Usage on a bare invocation is not an error.
        let _ = cmd.print_help();
        return ExitCode::SUCCESS;
    }
    let matches = match cmd.try_get_matches_from_mut(&args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    eprintln!("error[config]: {}", e.render().to_string().trim_start_matches("error: ").trim_end());
                    ExitCode::from(1)
                }
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error[config]: {e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve(c) => solve(&c),
        Command::Bench(c) => bench(&c),
        Command::Trace(c) => trace(&c),
        Command::Filters(f) => filters(&f),
    }
}

/// Preset, file, dedicated flags and overrides merged for `section`.
fn resolve(section: &str, c: &Common, extra: &[(&str, String)]) -> Result<Table, CliError> {
    let mut base = Table::new();
    if let Some(name) = &c.preset {
        let sections = config::parse_sections(config::preset(name)?, name)?;
        config::merge_section(&mut base, &sections, section);
    }
    if let Some(path) = &c.config {
        config::merge_section(&mut base, &config::read_sections(path)?, section);
    }
    let mut flags: Vec<(&str, String)> = Vec::new();
    if let Some(seed) = c.seed {
        flags.push((if section == "bench" { "seeds" } else { "seed" }, seed.to_string()));
    }
    if let Some(w) = c.workers {
        flags.push(("workers", w.to_string()));
    }
    if c.table_mode {
        flags.push(("table_mode", "true".into()));
    }
    if let Some(m) = c.max_iter {
        flags.push(("max_iter", m.to_string()));
    }
    for (k, v) in flags.iter().chain(extra) {
        config::set_key(&mut base, section, k, v)
            .map_err(|_| CliError::Config(format!("--{} does not apply to `{section}`", k.replace('_', "-"))))?;
    }
    for kv in &c.overrides {
        config::apply_override(&mut base, section, kv)?;
    }
    Ok(base)
}

fn output_dir(c: &Common) -> Result<&Path, CliError> {
    std::fs::create_dir_all(&c.output_dir).map_err(|e| io_err(&c.output_dir, e))?;
    Ok(&c.output_dir)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn write_manifest<T: Serialize>(dir: &Path, section: &str, spec: &T) -> Result<(), CliError> {
    let path = dir.join("manifest.txt");
    std::fs::write(&path, config::manifest(section, spec)?).map_err(|e| io_err(&path, e))
}

fn write_records(dir: &Path, records: &[ExperimentRecord]) -> Result<(), CliError> {
    let path = dir.join("records.csv");
    write_records_csv(create(&path)?, records)?;
    Ok(())
}

fn describe(r: &ExperimentRecord) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
    format!(
        "{} {} delta'={:e} seed={} status={} k*={} t*={} l2err={}{}",
        r.method,
        r.rule,
        r.delta_prime,
        r.seed,
        r.status.as_str(),
        r.k_star.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
        opt(r.t_star),
        opt(r.l2err),
        if r.message.is_empty() { String::new() } else { format!(" ({})", r.message) }
    )
}

fn solve(c: &Common) -> Result<(), CliError> {
    let spec: SolveSpec = config::into_spec(resolve("solve", c, &[])?, "solve")?;
    let exp = spec.to_experiment();
    exp.validate()?;
    let problem = build_integral_problem(spec.n, spec.problem)?;
    let (record, outcome) = run_single(&exp, &problem)?;
    let dir = output_dir(c)?;
    write_records(dir, std::slice::from_ref(&record))?;
    write_manifest(dir, "solve", &spec)?;
    if let Some(out) = outcome {
        write_trajectory_csv(create(&dir.join("trajectory.csv"))?, &out.trajectory)?;
        let path = dir.join("solution.csv");
        let mut w = csv::Writer::from_writer(create(&path)?);
        let werr = |e: csv::Error| io_err(&path, e);
        w.write_record(["node", "x", "x_exact"]).map_err(werr)?;
        for ((s, x), xe) in problem.nodes.iter().zip(&out.state.x).zip(&problem.x_exact) {
            w.write_record([format!("{s:e}"), format!("{x:e}"), format!("{xe:e}")])
                .map_err(werr)?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
    }
    println!("{}", describe(&record));
    match record.status {
        RunStatus::ConfigError => Err(CliError::Config(record.message)),
        RunStatus::Diverged | RunStatus::Breakdown => Err(CliError::Runtime(record.message)),
        _ => Ok(()),
    }
}

fn bench(c: &Common) -> Result<(), CliError> {
    let spec: ExperimentSpec = config::into_spec(resolve("bench", c, &[])?, "bench")?;
    let records = run_matrix(&spec)?;
    let dir = output_dir(c)?;
    write_records(dir, &records)?;
    write_manifest(dir, "bench", &spec)?;
    if c.verbose >= 1 {
        for r in &records {
            println!("run {}: {}", r.index, describe(r));
        }
    }
    let failed: Vec<&ExperimentRecord> = records.iter().filter(|r| r.is_config_error()).collect();
    println!(
        "{} runs, {} ok, {} config errors; records in {}",
        records.len(),
        records.iter().filter(|r| r.status == RunStatus::Ok).count(),
        failed.len(),
        dir.join("records.csv").display()
    );
    match failed.first() {
        Some(r) => Err(CliError::Config(format!(
            "{} run(s) failed configuration, first is run {}: {}",
            failed.len(),
            r.index,
            r.message
        ))),
        None => Ok(()),
    }
}

fn trace(c: &Common) -> Result<(), CliError> {
    let spec: TraceSpec = config::into_spec(resolve("trace", c, &[])?, "trace")?;
    let problem = build_integral_problem(spec.n, spec.problem)?;
    let report = discrepancy_trace(&problem, &spec)?;
    let dir = output_dir(c)?;
    let paths = write_traces(dir, &report)?;
    write_manifest(dir, "trace", &spec)?;
    if c.verbose >= 1 {
        for p in &paths {
            println!("wrote {}", p.display());
        }
    }
    for check in &report.checks {
        println!(
            "eta {:e} vs {:e}: larger damping below at {:.1}% of samples ({})",
            check.eta_large,
            check.eta_small,
            100.0 * check.fraction,
            if check.pass { "pass" } else { "fail" }
        );
    }
    println!("{} traces, dt = {}, delta = {:e}", report.traces.len(), report.dt, report.delta);
    Ok(())
}

fn filters(f: &FilterArgs) -> Result<(), CliError> {
    let mut extra: Vec<(&str, String)> = Vec::new();
    if let Some(eta) = f.eta {
        extra.push(("eta", eta.to_string()));
    }
    if let Some(norm) = f.norm {
        extra.push(("norm", norm.to_string()));
    }
    if let Some(alphas) = &f.alphas {
        let list: Vec<String> = alphas.iter().map(|a| format!("{a:e}")).collect();
        extra.push(("alphas", format!("[{}]", list.join(", "))));
    }
    if let Some(m) = f.lambdas {
        extra.push(("lambdas", m.to_string()));
    }
    let spec: FiltersSpec = config::into_spec(resolve("filters", &f.common, &extra)?, "filters")?;
    spec.validate()?;
    let cfg = DampingConfig::new(spec.eta, spec.norm * spec.norm)?;
    let dir = output_dir(&f.common)?;
    let path = dir.join("filters.csv");
    let rows = write_filter_curve(create(&path)?, &cfg, &spec.alphas, &spec.lambda_grid())?;
    write_manifest(dir, "filters", &spec)?;
    println!("{rows} rows in {}", path.display());
    Ok(())
}
