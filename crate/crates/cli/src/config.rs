//! Config files, presets and `key=value` overrides.
//!
//! A config file is TOML with one optional table per subcommand:
//! `[solve]`, `[bench]`, `[trace]` and `[filters]`. Layers are merged key by
//! key in the order preset, file, dedicated flags, `--override`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use soar::bench::{ExperimentSpec, TraceSpec};
use soar::problems::ProblemLabel;
use soar::solvers::{Method, DEFAULT_MAX_ITER};
use soar::stopping::{RuleKind, DEFAULT_TAU};
use toml::{Table, Value};

use crate::CliError;

pub const SECTIONS: [&str; 4] = ["solve", "bench", "trace", "filters"];

pub const EXAMPLE1: &str = include_str!("../presets/example1.cfg");
pub const EXAMPLE2: &str = include_str!("../presets/example2.cfg");

pub fn preset(name: &str) -> Result<&'static str, CliError> {
    match name {
        "example1" => Ok(EXAMPLE1),
        "example2" => Ok(EXAMPLE2),
        _ => Err(CliError::Config(format!(
            "unknown preset `{name}` (expected example1 or example2)"
        ))),
    }
}

/// A single run. Keys match [`ExperimentSpec`] with the list keys singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSpec {
    pub problem: ProblemLabel,
    pub n: usize,
    pub method: Method,
    pub rule: RuleKind,
    pub delta_prime: f64,
    pub seed: u64,
    pub dt: Option<f64>,
    pub eta: f64,
    pub x0: f64,
    pub v0: f64,
    pub tau: f64,
    pub p: Option<f64>,
    pub table_mode: bool,
    pub t_star: Option<f64>,
    pub max_iter: usize,
    pub allow_unstable_step: bool,
}

impl Default for SolveSpec {
    fn default() -> Self {
        let b = ExperimentSpec::default();
        Self {
            problem: b.problem,
            n: b.n,
            method: b.methods[0],
            rule: b.rules[0],
            delta_prime: b.delta_prime[0],
            seed: 0,
            dt: b.dt,
            eta: b.eta,
            x0: b.x0,
            v0: b.v0,
            tau: b.tau,
            p: b.p,
            table_mode: b.table_mode,
            t_star: b.t_star,
            max_iter: b.max_iter,
            allow_unstable_step: b.allow_unstable_step,
        }
    }
}

impl SolveSpec {
    pub fn to_experiment(&self) -> ExperimentSpec {
        ExperimentSpec {
            problem: self.problem,
            n: self.n,
            methods: vec![self.method],
            rules: vec![self.rule],
            delta_prime: vec![self.delta_prime],
            seeds: vec![self.seed],
            dt: self.dt,
            eta: self.eta,
            x0: self.x0,
            v0: self.v0,
            tau: self.tau,
            p: self.p,
            table_mode: self.table_mode,
            t_star: self.t_star,
            repetitions: 1,
            max_iter: self.max_iter,
            allow_unstable_step: self.allow_unstable_step,
            ..ExperimentSpec::default()
        }
    }
}

/// Filter curves on a log-spaced grid `lambda in [lambda_floor norm^2, norm^2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiltersSpec {
    pub eta: f64,
    pub norm: f64,
    pub alphas: Vec<f64>,
    pub lambdas: usize,
    pub lambda_floor: f64,
}

impl Default for FiltersSpec {
    fn default() -> Self {
        Self {
            eta: 4.0,
            norm: 1.0,
            alphas: vec![1e-3, 1e-2, 1e-1, 1.0],
            lambdas: 64,
            lambda_floor: 1e-6,
        }
    }
}

impl FiltersSpec {
    pub fn lambda_grid(&self) -> Vec<f64> {
        let hi = self.norm * self.norm;
        let lo = self.lambda_floor * hi;
        match self.lambdas {
            0 => Vec::new(),
            1 => vec![hi],
            m => {
                let (a, b) = (lo.ln(), hi.ln());
                (0..m)
                    .map(|i| (a + (b - a) * i as f64 / (m - 1) as f64).exp())
                    .collect()
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.norm > 0.0 && self.norm.is_finite()) {
            return Err(CliError::Config(format!("norm must be positive, got {}", self.norm)));
        }
        if !(self.lambda_floor > 0.0 && self.lambda_floor <= 1.0) {
            return Err(CliError::Config(format!(
                "lambda_floor must lie in (0, 1], got {}",
                self.lambda_floor
            )));
        }
        Ok(())
    }
}

/// Help entry for one config key.
pub struct KeyDoc {
    pub name: &'static str,
    pub unit: &'static str,
    pub list: bool,
    /// Shown when the key has no default value of its own.
    pub absent: &'static str,
    pub doc: &'static str,
}

const fn key(name: &'static str, unit: &'static str, doc: &'static str) -> KeyDoc {
    KeyDoc { name, unit, list: false, absent: "", doc }
}

const fn list(name: &'static str, unit: &'static str, doc: &'static str) -> KeyDoc {
    KeyDoc { name, unit, list: true, absent: "", doc }
}

const fn optional(name: &'static str, unit: &'static str, absent: &'static str, doc: &'static str) -> KeyDoc {
    KeyDoc { name, unit, list: false, absent, doc }
}

const METHODS: &str = "soar_sv | soar_euler | landweber | nesterov | chebyshev | cgne";
const RULES: &str = "morozov | total_energy | a_priori | max_iter_only";
const DT_DEFAULT: &str = "0.9 min(sqrt(2)/||A||, 2/eta) for SOAR, 1/||A||^2 otherwise";

pub const SOLVE_KEYS: &[KeyDoc] = &[
    key("problem", "label", "example1 | example2"),
    key("n", "nodes", "grid points of the finite element model"),
    key("method", "label", METHODS),
    key("rule", "label", RULES),
    key("delta_prime", "relative", "noise level, y_delta = (1 + delta_prime xi) y"),
    key("seed", "integer", "noise seed"),
    optional("dt", "time", DT_DEFAULT, "step size"),
    key("eta", "1/time", "damping"),
    key("x0", "value", "constant fill of the initial iterate"),
    key("v0", "value/time", "constant fill of the initial velocity"),
    key("tau", "ratio", "discrepancy multiplier, must exceed 1"),
    optional("p", "exponent", "problem reference value", "source exponent for --table-mode"),
    key("table_mode", "bool", "energy threshold 1.1 delta^(4p/(4p+1)) instead of tau"),
    optional("t_star", "time", "none", "stopping time of the a_priori rule"),
    key("max_iter", "steps", "iteration cap"),
    key("allow_unstable_step", "bool", "skip the step size check"),
];

pub const BENCH_KEYS: &[KeyDoc] = &[
    key("problem", "label", "example1 | example2"),
    key("n", "nodes", "grid points of the finite element model"),
    list("methods", "labels", METHODS),
    list("rules", "labels", "total_energy runs only for the SOAR methods"),
    list("delta_prime", "relative", "noise levels"),
    list("seeds", "integers", "noise seeds"),
    optional("dt", "time", DT_DEFAULT, "step size shared by all methods"),
    key("eta", "1/time", "damping"),
    key("x0", "value", "constant fill of the initial iterate"),
    key("v0", "value/time", "constant fill of the initial velocity"),
    key("tau", "ratio", "discrepancy multiplier, must exceed 1"),
    optional("p", "exponent", "problem reference value", "source exponent for table_mode"),
    key("table_mode", "bool", "energy threshold 1.1 delta^(4p/(4p+1)) instead of tau"),
    optional("t_star", "time", "none", "stopping time of the a_priori rule"),
    key("repetitions", "count", "repeats of each coordinate with the same seed"),
    key("max_iter", "steps", "iteration cap per run"),
    key("allow_unstable_step", "bool", "skip the step size check"),
    key("cap", "runs", "largest allowed matrix"),
    key("workers", "threads", "parallel runs"),
];

pub const TRACE_KEYS: &[KeyDoc] = &[
    key("problem", "label", "example1 | example2"),
    key("n", "nodes", "grid points of the finite element model"),
    list("etas", "1/time", "one trace per damping value"),
    key("delta_prime", "relative", "noise level"),
    key("seed", "integer", "noise seed"),
    optional("dt", "time", "0.9 min(sqrt(2)/||A||, 2/max eta)", "common step size"),
    key("tau", "ratio", "chi = ||A x - y_delta|| - tau delta"),
    key("x0", "value", "constant fill of the initial iterate"),
    key("v0", "value/time", "constant fill of the initial velocity"),
    key("steps", "steps", "trace length"),
    key("allow_unstable_step", "bool", "skip the step size check"),
];

pub const FILTERS_KEYS: &[KeyDoc] = &[
    key("eta", "1/time", "damping"),
    key("norm", "value", "operator norm ||A||"),
    list("alphas", "1/time", "regularization parameters alpha = 1/t"),
    key("lambdas", "count", "log-spaced spectral points"),
    key("lambda_floor", "ratio", "smallest lambda as a fraction of norm^2"),
];

pub fn keys(section: &str) -> &'static [KeyDoc] {
    match section {
        "solve" => SOLVE_KEYS,
        "bench" => BENCH_KEYS,
        "trace" => TRACE_KEYS,
        "filters" => FILTERS_KEYS,
        _ => &[],
    }
}

pub fn default_table(section: &str) -> Table {
    let value = match section {
        "solve" => Value::try_from(SolveSpec::default()),
        "bench" => Value::try_from(ExperimentSpec::default()),
        "trace" => Value::try_from(TraceSpec::default()),
        _ => Value::try_from(FiltersSpec::default()),
    };
    match value {
        Ok(Value::Table(t)) => t,
        _ => Table::new(),
    }
}

/// Key reference appended to `--help` of a subcommand.
pub fn help_text(section: &str) -> String {
    let defaults = default_table(section);
    let mut out = format!("Config keys of [{section}] (default, unit):\n");
    for k in keys(section) {
        let default = defaults
            .get(k.name)
            .map(|v| v.to_string())
            .unwrap_or_else(|| k.absent.to_string());
        out.push_str(&format!("  {:<20} {default}  [{}]\n      {}\n", k.name, k.unit, k.doc));
    }
    if section == "bench" || section == "solve" {
        out.push_str(&format!("\nmax_iter defaults to {DEFAULT_MAX_ITER}, tau to {DEFAULT_TAU}.\n"));
    }
    out
}

/// The section tables of a config text. Unknown sections are rejected.
pub fn parse_sections(text: &str, origin: &str) -> Result<Table, CliError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("{origin}: {e}")))?;
    for (name, value) in &table {
        if !SECTIONS.contains(&name.as_str()) {
            return Err(CliError::Config(format!(
                "{origin}: unknown section `{name}` (expected one of {})",
                SECTIONS.join(", ")
            )));
        }
        if !value.is_table() {
            return Err(CliError::Config(format!("{origin}: `{name}` must be a table")));
        }
    }
    Ok(table)
}

pub fn read_sections(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_sections(&text, &path.display().to_string())
}

/// Layers `section` of `sections` over `base`.
pub fn merge_section(base: &mut Table, sections: &Table, section: &str) {
    if let Some(Value::Table(t)) = sections.get(section) {
        for (k, v) in t {
            base.insert(k.clone(), v.clone());
        }
    }
}

/// Parses `raw` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Sets `key` in `base`. Scalars given for list keys become one-element lists.
pub fn set_key(base: &mut Table, section: &str, key: &str, raw: &str) -> Result<(), CliError> {
    let doc = keys(section)
        .iter()
        .find(|k| k.name == key)
        .ok_or_else(|| CliError::Config(format!("unknown key `{key}` in [{section}]")))?;
    let value = match parse_value(raw) {
        v @ Value::Array(_) => v,
        v if doc.list => Value::Array(vec![v]),
        v => v,
    };
    base.insert(key.to_string(), value);
    Ok(())
}

pub fn apply_override(base: &mut Table, section: &str, kv: &str) -> Result<(), CliError> {
    let (k, v) = kv
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{kv}` is not of the form key=value")))?;
    set_key(base, section, k.trim(), v.trim())
}

pub fn into_spec<T: for<'de> Deserialize<'de>>(table: Table, section: &str) -> Result<T, CliError> {
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("[{section}]: {}", e.message())))
}

/// The manifest: `spec` under its section header.
pub fn manifest<T: Serialize>(section: &str, spec: &T) -> Result<String, CliError> {
    let body = toml::to_string(spec).map_err(|e| CliError::Runtime(format!("manifest: {e}")))?;
    Ok(format!("[{section}]\n{body}"))
}
