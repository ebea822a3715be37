//! Experiment matrices over methods, stopping rules, noise levels and seeds.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SoarError};
use crate::filters::SourceCondition;
use crate::operator::DenseOperator;
use crate::problems::{add_noise, build_integral_problem, l2_relative_error, IntegralProblem, ProblemLabel};
use crate::solvers::{default_dt, max_soar_dt, run, Method, RunOutcome, SolverConfig, SolverState, DEFAULT_MAX_ITER};
use crate::stopping::{table_mode_tau, RuleKind, StopReason, StoppingRule, DEFAULT_TAU};

pub const DEFAULT_CAP: usize = 10_000;

/// Cross product of runs on one problem. Field names double as config keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemLabel,
    pub n: usize,
    pub methods: Vec<Method>,
    pub rules: Vec<RuleKind>,
    pub delta_prime: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Step size; method default when absent.
    pub dt: Option<f64>,
    pub eta: f64,
    /// Constant fill of the initial iterate.
    pub x0: f64,
    /// Constant fill of the initial velocity.
    pub v0: f64,
    pub tau: f64,
    /// Source exponent for the table mode energy threshold; the
    /// problem's reference value when absent.
    pub p: Option<f64>,
    pub table_mode: bool,
    /// Stopping time of the a priori rule.
    pub t_star: Option<f64>,
    pub repetitions: usize,
    pub max_iter: usize,
    pub allow_unstable_step: bool,
    pub cap: usize,
    pub workers: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            problem: ProblemLabel::Example1,
            n: 400,
            methods: vec![Method::SoarStormerVerlet],
            rules: vec![RuleKind::Morozov],
            delta_prime: vec![1e-3],
            seeds: vec![0],
            dt: None,
            eta: 2.5648e-2,
            x0: 0.0,
            v0: 0.0,
            tau: DEFAULT_TAU,
            p: None,
            table_mode: false,
            t_star: None,
            repetitions: 1,
            max_iter: DEFAULT_MAX_ITER,
            allow_unstable_step: false,
            cap: DEFAULT_CAP,
            workers: 1,
        }
    }
}

/// One coordinate of the cross product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunKey {
    pub method: Method,
    pub rule: RuleKind,
    pub delta_prime: f64,
    pub seed: u64,
    pub repetition: usize,
}

impl ExperimentSpec {
    /// Runs in record order. The total energy rule is paired with the SOAR
    /// methods only; for first order methods it repeats the discrepancy rule.
    pub fn runs(&self) -> Vec<RunKey> {
        let mut out = Vec::new();
        for &method in &self.methods {
            for &rule in &self.rules {
                if rule == RuleKind::TotalEnergy && !method.is_soar() {
                    continue;
                }
                for &delta_prime in &self.delta_prime {
                    for &seed in &self.seeds {
                        for repetition in 0..self.repetitions {
                            out.push(RunKey {
                                method,
                                rule,
                                delta_prime,
                                seed,
                                repetition,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Checks that do not need the operator.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SoarError::Config(m));
        if self.n < crate::problems::MIN_NODES {
            return bad(format!("n must be at least {}, got {}", crate::problems::MIN_NODES, self.n));
        }
        if self.problem == ProblemLabel::Custom {
            return bad("problem must be example1 or example2".into());
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.tau > 1.0 && self.tau.is_finite()) {
            return bad(format!("tau must exceed 1, got {}", self.tau));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if let Some(p) = self.p {
            if !(p > 0.0) {
                return bad(format!("p must be positive, got {p}"));
            }
        }
        if self.delta_prime.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return bad("delta_prime values must be nonnegative".into());
        }
        if !(self.x0.is_finite() && self.v0.is_finite()) {
            return bad("x0 and v0 must be finite".into());
        }
        if self.repetitions == 0 || self.max_iter == 0 || self.workers == 0 {
            return bad("repetitions, max_iter and workers must be positive".into());
        }
        let count = self.runs().len();
        if count > self.cap {
            return bad(format!("{count} runs exceed the cap of {}", self.cap));
        }
        Ok(())
    }

    /// [`ExperimentSpec::validate`] plus the step size condition of every
    /// method against the assembled operator.
    pub fn validate_with_problem(&self, problem: &IntegralProblem) -> Result<()> {
        self.validate()?;
        for &method in &self.methods {
            self.solver_config(method, problem)?.validate(&problem.op)?;
        }
        Ok(())
    }

    fn solver_config(&self, method: Method, problem: &IntegralProblem) -> Result<SolverConfig> {
        let n = problem.n;
        let norm = problem.op.operator_norm();
        Ok(SolverConfig::new(method, &problem.op, self.eta)?
            .with_dt(self.dt.unwrap_or_else(|| default_dt(method, norm, self.eta)))
            .with_x0(vec![self.x0; n])
            .with_v0(vec![self.v0; n])
            .with_max_iter(self.max_iter)
            .with_unstable_step(self.allow_unstable_step))
    }

    fn p_or_default(&self, problem: &IntegralProblem) -> f64 {
        self.p.unwrap_or(problem.p_smoothness)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Diverged,
    MaxIterExceeded,
    Breakdown,
    ConfigError,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Diverged => "diverged",
            RunStatus::MaxIterExceeded => "max_iter_exceeded",
            RunStatus::Breakdown => "breakdown",
            RunStatus::ConfigError => "config_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub index: usize,
    pub problem: ProblemLabel,
    pub n: usize,
    pub method: Method,
    pub rule: RuleKind,
    pub delta_prime: f64,
    pub seed: u64,
    pub repetition: usize,
    pub dt: f64,
    pub eta: f64,
    pub x0: f64,
    pub v0: f64,
    pub tau: f64,
    pub tau_eff: f64,
    pub p: f64,
    pub table_mode: bool,
    pub delta: f64,
    pub delta_weighted: f64,
    pub status: RunStatus,
    pub reason: Option<StopReason>,
    pub k_star: Option<usize>,
    pub t_star: Option<f64>,
    pub chi_value: Option<f64>,
    pub l2err: Option<f64>,
    pub residual_above_tau1: Option<bool>,
    pub energy_monotone: Option<bool>,
    pub wall_time_seconds: f64,
    pub message: String,
}

pub const RECORD_COLUMNS: [&str; 28] = [
    "index",
    "problem",
    "n",
    "method",
    "rule",
    "delta_prime",
    "seed",
    "repetition",
    "dt",
    "eta",
    "x0",
    "v0",
    "tau",
    "tau_eff",
    "p",
    "table_mode",
    "delta",
    "delta_weighted",
    "status",
    "reason",
    "k_star",
    "t_star",
    "chi_value",
    "l2err",
    "residual_above_tau1",
    "energy_monotone",
    "wall_time_seconds",
    "message",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            self.problem.to_string(),
            self.n.to_string(),
            self.method.to_string(),
            self.rule.to_string(),
            format!("{:e}", self.delta_prime),
            self.seed.to_string(),
            self.repetition.to_string(),
            self.dt.to_string(),
            self.eta.to_string(),
            self.x0.to_string(),
            self.v0.to_string(),
            self.tau.to_string(),
            format!("{:e}", self.tau_eff),
            self.p.to_string(),
            self.table_mode.to_string(),
            format!("{:e}", self.delta),
            format!("{:e}", self.delta_weighted),
            self.status.as_str().to_string(),
            opt(self.reason.map(|r| r.as_str())),
            opt(self.k_star),
            opt(self.t_star),
            opt(self.chi_value.map(|c| format!("{c:e}"))),
            opt(self.l2err),
            opt(self.residual_above_tau1),
            opt(self.energy_monotone),
            format!("{:.6}", self.wall_time_seconds),
            self.message.clone(),
        ]
    }

    pub fn is_config_error(&self) -> bool {
        self.status == RunStatus::ConfigError
    }
}

pub fn write_records_csv<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every coordinate of `spec`; records come back in [`ExperimentSpec::runs`] order.
pub fn run_matrix(spec: &ExperimentSpec) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let keys = spec.runs();
    if keys.is_empty() {
        return Ok(Vec::new());
    }
    let problem = Arc::new(build_integral_problem(spec.n, spec.problem)?);
    run_matrix_on(spec, &problem)
}

/// [`run_matrix`] on an already assembled problem.
pub fn run_matrix_on(spec: &ExperimentSpec, problem: &Arc<IntegralProblem>) -> Result<Vec<ExperimentRecord>> {
    spec.validate_with_problem(problem)?;
    let keys = spec.runs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| SoarError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        keys.par_iter()
            .enumerate()
            .map(|(i, key)| run_one(spec, problem, i, key))
            .collect()
    }))
}

/// The only run of a one-coordinate `spec`, with its trajectory unless it failed.
pub fn run_single(spec: &ExperimentSpec, problem: &IntegralProblem) -> Result<(ExperimentRecord, Option<RunOutcome>)> {
    spec.validate_with_problem(problem)?;
    match spec.runs().as_slice() {
        [key] => Ok(execute(spec, problem, 0, key)),
        keys => Err(SoarError::Config(format!("expected exactly one run, spec has {}", keys.len()))),
    }
}

fn run_one(spec: &ExperimentSpec, problem: &IntegralProblem, index: usize, key: &RunKey) -> ExperimentRecord {
    execute(spec, problem, index, key).0
}

fn execute(
    spec: &ExperimentSpec,
    problem: &IntegralProblem,
    index: usize,
    key: &RunKey,
) -> (ExperimentRecord, Option<RunOutcome>) {
    let started = Instant::now();
    let p = spec.p_or_default(problem);
    let mut rec = ExperimentRecord {
        index,
        problem: spec.problem,
        n: spec.n,
        method: key.method,
        rule: key.rule,
        delta_prime: key.delta_prime,
        seed: key.seed,
        repetition: key.repetition,
        dt: spec
            .dt
            .unwrap_or_else(|| default_dt(key.method, problem.op.operator_norm(), spec.eta)),
        eta: spec.eta,
        x0: spec.x0,
        v0: spec.v0,
        tau: spec.tau,
        tau_eff: spec.tau,
        p,
        table_mode: spec.table_mode,
        delta: f64::NAN,
        delta_weighted: f64::NAN,
        status: RunStatus::Ok,
        reason: None,
        k_star: None,
        t_star: None,
        chi_value: None,
        l2err: None,
        residual_above_tau1: None,
        energy_monotone: None,
        wall_time_seconds: 0.0,
        message: String::new(),
    };
    let result = (|| -> Result<RunOutcome> {
        let noise = add_noise(problem, key.delta_prime, key.seed)?;
        rec.delta = noise.delta;
        rec.delta_weighted = noise.delta_weighted;
        let rule = match key.rule {
            RuleKind::Morozov => StoppingRule::morozov(spec.tau, noise.delta)?,
            RuleKind::TotalEnergy => {
                let mut r = StoppingRule::total_energy(spec.tau, noise.delta)?;
                if spec.table_mode {
                    r.tau_te = Some(table_mode_tau(p, noise.delta));
                }
                r
            }
            RuleKind::APriori => StoppingRule::a_priori(
                spec.t_star
                    .ok_or_else(|| SoarError::Config("a_priori rule needs t_star".into()))?,
            )?,
            RuleKind::MaxIterOnly => StoppingRule::max_iter_only(),
        };
        rec.tau_eff = rule.tau_eff();
        let cfg = spec.solver_config(key.method, problem)?;
        let out = run(&problem.op, &noise.y_delta, &cfg, &rule)?;
        rec.status = if out.decision.fired {
            RunStatus::Ok
        } else {
            RunStatus::MaxIterExceeded
        };
        rec.reason = Some(out.decision.reason);
        rec.k_star = Some(out.decision.k_star);
        rec.t_star = Some(out.decision.t_star);
        rec.chi_value = Some(out.decision.chi_value);
        rec.residual_above_tau1 = out.decision.residual_above_tau1;
        rec.energy_monotone = Some(out.energy_monotone);
        rec.l2err = Some(l2_relative_error(&out.state.x, problem)?);
        Ok(out)
    })();
    let outcome = result.map_err(|e| {
        rec.status = match e {
            SoarError::Diverged { .. } => RunStatus::Diverged,
            SoarError::Breakdown { .. } => RunStatus::Breakdown,
            _ => RunStatus::ConfigError,
        };
        rec.message = e.to_string();
    });
    rec.wall_time_seconds = started.elapsed().as_secs_f64();
    (rec, outcome.ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordField {
    Delta,
    DeltaPrime,
    KStar,
    TStar,
    L2Err,
    WallTime,
}

impl RecordField {
    fn get(self, r: &ExperimentRecord) -> Option<f64> {
        match self {
            RecordField::Delta => Some(r.delta),
            RecordField::DeltaPrime => Some(r.delta_prime),
            RecordField::KStar => r.k_star.map(|k| k as f64),
            RecordField::TStar => r.t_star,
            RecordField::L2Err => r.l2err,
            RecordField::WallTime => Some(r.wall_time_seconds),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub used: usize,
    /// Points dropped for a nonpositive or missing coordinate.
    pub excluded: usize,
}

/// Least squares line through `(log x, log y)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    crate::error::check_len(xs.len(), ys.len())?;
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let excluded = xs.len() - pts.len();
    let mut distinct: Vec<f64> = pts.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(SoarError::Domain(format!(
            "rate fit needs at least 3 distinct positive x values, got {}",
            distinct.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r2,
        used: pts.len(),
        excluded,
    })
}

pub fn fit_rate(records: &[ExperimentRecord], x: RecordField, y: RecordField) -> Result<RateFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .map(|r| (x.get(r).unwrap_or(f64::NAN), y.get(r).unwrap_or(f64::NAN)))
        .unzip();
    fit_loglog(&xs, &ys)
}

/// Parameters shared by all traces of one discrepancy comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceSpec {
    pub problem: ProblemLabel,
    pub n: usize,
    pub etas: Vec<f64>,
    pub delta_prime: f64,
    pub seed: u64,
    /// Common step; `0.9 min(sqrt(2)/||A||, 2/max eta)` when absent.
    pub dt: Option<f64>,
    pub tau: f64,
    pub x0: f64,
    pub v0: f64,
    pub steps: usize,
    pub allow_unstable_step: bool,
}

impl Default for TraceSpec {
    fn default() -> Self {
        Self {
            problem: ProblemLabel::Example1,
            n: 400,
            etas: vec![2.5648e-4, 2.5648e-3],
            delta_prime: 1e-3,
            seed: 0,
            dt: None,
            tau: DEFAULT_TAU,
            x0: 1.0,
            v0: 0.0,
            steps: 2000,
            allow_unstable_step: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaTrace {
    pub eta: f64,
    /// `(t, chi)` with `chi = ||A x(t) - y_delta|| - tau delta`.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceCheck {
    pub eta_small: f64,
    pub eta_large: f64,
    /// Share of samples beyond `t = 10 dt` where the larger damping gives the smaller `chi`.
    pub fraction: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub dt: f64,
    pub delta: f64,
    pub traces: Vec<EtaTrace>,
    pub checks: Vec<DominanceCheck>,
}

impl TraceReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn discrepancy_trace(problem: &IntegralProblem, spec: &TraceSpec) -> Result<TraceReport> {
    if spec.etas.is_empty() {
        return Err(SoarError::Config("trace needs at least one eta".into()));
    }
    let noise = add_noise(problem, spec.delta_prime, spec.seed)?;
    let norm = problem.op.operator_norm();
    let eta_max = spec.etas.iter().copied().fold(f64::MIN, f64::max);
    let dt = spec
        .dt
        .unwrap_or_else(|| default_dt(Method::SoarStormerVerlet, norm, eta_max));
    let level = spec.tau * noise.delta;
    let mut traces = Vec::with_capacity(spec.etas.len());
    for &eta in &spec.etas {
        let cfg = SolverConfig::new(Method::SoarStormerVerlet, &problem.op, eta)?
            .with_dt(dt)
            .with_x0(vec![spec.x0; problem.n])
            .with_v0(vec![spec.v0; problem.n])
            .with_unstable_step(spec.allow_unstable_step);
        let mut state = SolverState::initial(&problem.op, &noise.y_delta, &cfg)?;
        let mut points = vec![(state.t, state.residual_norm - level)];
        for _ in 0..spec.steps {
            state = crate::solvers::step(&state, &problem.op, &noise.y_delta, &cfg)?;
            points.push((state.t, state.residual_norm - level));
        }
        traces.push(EtaTrace { eta, points });
    }
    let mut order: Vec<usize> = (0..traces.len()).collect();
    order.sort_by(|&a, &b| traces[a].eta.total_cmp(&traces[b].eta));
    let checks = order
        .windows(2)
        .map(|w| {
            let (small, large) = (&traces[w[0]], &traces[w[1]]);
            let mut total = 0usize;
            let mut below = 0usize;
            for (ps, pl) in small.points.iter().zip(&large.points) {
                if ps.0 > 10.0 * dt {
                    total += 1;
                    if pl.1 <= ps.1 {
                        below += 1;
                    }
                }
            }
            let fraction = if total == 0 { 1.0 } else { below as f64 / total as f64 };
            DominanceCheck {
                eta_small: small.eta,
                eta_large: large.eta,
                fraction,
                pass: fraction >= 0.8,
            }
        })
        .collect();
    Ok(TraceReport {
        dt,
        delta: noise.delta,
        traces,
        checks,
    })
}

/// Writes one `trace/eta_<eta>.csv` per damping value under `dir`.
pub fn write_traces(dir: &Path, report: &TraceReport) -> Result<Vec<std::path::PathBuf>> {
    let trace_dir = dir.join("trace");
    std::fs::create_dir_all(&trace_dir)?;
    let mut paths = Vec::new();
    for tr in &report.traces {
        let path = trace_dir.join(format!("eta_{:e}.csv", tr.eta));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["t", "chi"])?;
        for (t, chi) in &tr.points {
            w.write_record([format!("{t:e}"), format!("{chi:e}")])?;
        }
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

/// Diagonal problem `sigma_j = 1/j` with `x_dagger = 0` and
/// `x0 = (A^T A)^p w`, `w` flat with `||w|| = rho`.
#[derive(Debug, Clone)]
pub struct PlantedProblem {
    pub op: DenseOperator,
    pub x_dagger: Vec<f64>,
    pub x0: Vec<f64>,
    pub y: Vec<f64>,
    pub source: SourceCondition,
}

pub fn planted_diagonal(modes: usize, p: f64, rho: f64) -> Result<PlantedProblem> {
    let source = SourceCondition::new(p, rho)?;
    if modes == 0 {
        return Err(SoarError::Config("need at least one mode".into()));
    }
    let sigma: Vec<f64> = (1..=modes).map(|j| 1.0 / j as f64).collect();
    let w = rho / (modes as f64).sqrt();
    Ok(PlantedProblem {
        op: DenseOperator::diagonal(&sigma)?,
        x_dagger: vec![0.0; modes],
        x0: sigma.iter().map(|s| s.powf(2.0 * p) * w).collect(),
        y: vec![0.0; modes],
        source,
    })
}

/// `delta` times a uniformly random unit vector.
pub fn noise_of_norm(len: usize, delta: f64, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let nr = crate::vecops::norm(&raw);
    raw.into_iter().map(|v| delta * v / nr).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedRun {
    pub delta: f64,
    pub k_star: usize,
    pub t_star: f64,
    pub error: f64,
}

/// Störmer-Verlet with the discrepancy rule on [`planted_diagonal`] for each
/// noise level, with step `0.5 min(sqrt(2)/||A||, 2/eta)`.
pub fn planted_rate_study(
    problem: &PlantedProblem,
    eta: f64,
    tau: f64,
    deltas: &[f64],
    seed: u64,
) -> Result<Vec<PlantedRun>> {
    let norm = problem.op.operator_norm();
    let cfg = SolverConfig::new(Method::SoarStormerVerlet, &problem.op, eta)?
        .with_dt(0.5 * max_soar_dt(norm, eta))
        .with_x0(problem.x0.clone())
        .with_max_iter(10_000_000);
    deltas
        .iter()
        .map(|&delta| {
            let e = noise_of_norm(problem.y.len(), delta, seed);
            let ydelta: Vec<f64> = problem.y.iter().zip(&e).map(|(a, b)| a + b).collect();
            let rule = StoppingRule::morozov(tau, delta)?;
            let out = run(&problem.op, &ydelta, &cfg, &rule)?;
            let diff = crate::vecops::sub(&out.state.x, &problem.x_dagger);
            Ok(PlantedRun {
                delta,
                k_star: out.decision.k_star,
                t_star: out.decision.t_star,
                error: crate::vecops::norm(&diff),
            })
        })
        .collect()
}
