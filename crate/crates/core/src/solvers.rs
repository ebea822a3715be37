//! Iterative solvers behind one stepping interface.
//!
//! Every step takes the current [`SolverState`] by reference and returns the
//! next one; inputs are never mutated. Each state caches the residual
//! `y - A x` and the gradient `A^T (y - A x)` at its iterate, so the
//! Störmer-Verlet, Euler, Landweber and Chebyshev steps cost two
//! matrix-vector products.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SoarError};
use crate::filters::{filter_constants, DampingConfig};
use crate::operator::DenseOperator;
use crate::stopping::{RuleKind, StopReason, StoppingDecision, StoppingRule};
use crate::vecops::{all_finite, axpy, dot, norm};

pub const DEFAULT_NESTEROV_ALPHA: f64 = 3.1;
pub const DEFAULT_MAX_ITER: usize = 400_000;
/// Conjugate gradient residuals are recomputed from scratch this often.
const RESYNC_EVERY: usize = 64;
/// The Chebyshev method here is the nu-method with this nu.
pub const CHEBYSHEV_NU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(rename = "soar_sv")]
    SoarStormerVerlet,
    SoarEuler,
    Landweber,
    Nesterov,
    Chebyshev,
    Cgne,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::SoarStormerVerlet,
        Method::SoarEuler,
        Method::Landweber,
        Method::Nesterov,
        Method::Chebyshev,
        Method::Cgne,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SoarStormerVerlet => "soar_sv",
            Method::SoarEuler => "soar_euler",
            Method::Landweber => "landweber",
            Method::Nesterov => "nesterov",
            Method::Chebyshev => "chebyshev",
            Method::Cgne => "cgne",
        }
    }

    pub fn is_soar(self) -> bool {
        matches!(self, Method::SoarStormerVerlet | Method::SoarEuler)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = SoarError;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| SoarError::Config(format!("unknown method `{s}`")))
    }
}

/// Which trajectory samples [`run`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thinning {
    pub dense_until: usize,
    pub stride: usize,
}

impl Default for Thinning {
    fn default() -> Self {
        Self {
            dense_until: 10_000,
            stride: 10,
        }
    }
}

impl Thinning {
    pub fn keep(&self, k: usize) -> bool {
        k < self.dense_until || k % self.stride.max(1) == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub dt: f64,
    /// Damping; only the SOAR methods use it.
    pub eta: f64,
    pub nesterov_alpha: f64,
    pub x0: Vec<f64>,
    /// Initial velocity; only the SOAR methods use it.
    pub v0: Vec<f64>,
    pub max_iter: usize,
    /// Skip the step size check.
    pub allow_unstable_step: bool,
    pub thinning: Thinning,
}

/// `0.9 min(sqrt(2)/||A||, 2/eta)` for SOAR, `1/||A||^2` otherwise.
pub fn default_dt(method: Method, norm: f64, eta: f64) -> f64 {
    match method {
        Method::SoarStormerVerlet | Method::SoarEuler => 0.9 * max_soar_dt(norm, eta),
        _ if norm > 0.0 => 1.0 / (norm * norm),
        _ => 1.0,
    }
}

/// Largest stable step `min(sqrt(2)/||A||, 2/eta)` of the SOAR schemes.
pub fn max_soar_dt(norm: f64, eta: f64) -> f64 {
    let a = if norm > 0.0 { 2f64.sqrt() / norm } else { f64::INFINITY };
    a.min(2.0 / eta)
}

impl SolverConfig {
    /// Defaults: zero initial data, default step, 400000 iterations.
    pub fn new(method: Method, op: &DenseOperator, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(SoarError::Config(format!("eta must be positive, got {eta}")));
        }
        let n = op.cols();
        Ok(Self {
            method,
            dt: default_dt(method, op.operator_norm(), eta),
            eta,
            nesterov_alpha: DEFAULT_NESTEROV_ALPHA,
            x0: vec![0.0; n],
            v0: vec![0.0; n],
            max_iter: DEFAULT_MAX_ITER,
            allow_unstable_step: false,
            thinning: Thinning::default(),
        })
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_v0(mut self, v0: Vec<f64>) -> Self {
        self.v0 = v0;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_unstable_step(mut self, allow: bool) -> Self {
        self.allow_unstable_step = allow;
        self
    }

    pub fn with_thinning(mut self, thinning: Thinning) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn with_nesterov_alpha(mut self, alpha: f64) -> Self {
        self.nesterov_alpha = alpha;
        self
    }

    /// Checks dimensions and the step size condition of the method.
    pub fn validate(&self, op: &DenseOperator) -> Result<()> {
        check_len(op.cols(), self.x0.len())?;
        check_len(op.cols(), self.v0.len())?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SoarError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(SoarError::Config(format!("eta must be positive, got {}", self.eta)));
        }
        if self.max_iter == 0 {
            return Err(SoarError::Config("max_iter must be positive".into()));
        }
        if self.method == Method::Nesterov && !(self.nesterov_alpha > 3.0) {
            return Err(SoarError::Config(format!(
                "nesterov_alpha must exceed 3, got {}",
                self.nesterov_alpha
            )));
        }
        if self.allow_unstable_step {
            return Ok(());
        }
        let norm = op.operator_norm();
        match self.method {
            Method::SoarStormerVerlet | Method::SoarEuler => {
                let bound = max_soar_dt(norm, self.eta);
                if self.dt > bound * (1.0 + 1e-12) {
                    return Err(SoarError::Config(format!(
                        "step size violation: dt = {} exceeds min(sqrt(2)/||A||, 2/eta) = {bound}",
                        self.dt
                    )));
                }
            }
            Method::Landweber | Method::Nesterov => {
                if norm > 0.0 && self.dt >= 2.0 / (norm * norm) {
                    return Err(SoarError::Config(format!(
                        "step size violation: dt = {} must be below 2/||A||^2 = {}",
                        self.dt,
                        2.0 / (norm * norm)
                    )));
                }
            }
            Method::Chebyshev | Method::Cgne => {}
        }
        Ok(())
    }

    /// Coefficients `(mu, omega)` of the three-term form
    /// `x+ = x + mu (x - x_prev) + omega A^T (y - A x)` of the Euler scheme:
    /// `mu = 1 - dt eta`, `omega = dt^2`.
    ///
    /// Eliminating `v` from `x+ = x + dt v`, `v = v- + dt (A^T(y - A x) - eta v-)`
    /// gives `dt v = mu (x - x_prev) + dt^2 A^T (y - A x)`.
    pub fn semi_iterative_coefficients(&self) -> (f64, f64) {
        (1.0 - self.dt * self.eta, self.dt * self.dt)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct CgVectors {
    direction: Vec<f64>,
    /// `||A^T r||^2`
    gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Vec<f64>,
    /// Velocity; zero for the first order methods.
    pub v: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub k: usize,
    pub t: f64,
    /// `||A x - y_delta||`
    pub residual_norm: f64,
    pub velocity_norm: f64,
    residual: Vec<f64>,
    gradient: Vec<f64>,
    cg: Option<CgVectors>,
}

impl SolverState {
    /// State at `k = 0` after validating `cfg` against `op`.
    pub fn initial(op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<Self> {
        cfg.validate(op)?;
        check_len(op.rows(), ydelta.len())?;
        let (residual, gradient) = op.residual_and_gradient(&cfg.x0, ydelta);
        let v = if cfg.method.is_soar() {
            cfg.v0.clone()
        } else {
            vec![0.0; op.cols()]
        };
        let cg = (cfg.method == Method::Cgne).then(|| CgVectors {
            direction: gradient.clone(),
            gamma: dot(&gradient, &gradient),
        });
        finish(cfg, cfg.x0.clone(), v, cfg.x0.clone(), 0, residual, gradient, cg)
    }

    /// `||A x - y_delta||^2 + ||v||^2`
    pub fn energy(&self) -> f64 {
        self.residual_norm * self.residual_norm + self.velocity_norm * self.velocity_norm
    }

    /// `y_delta - A x`
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    #[cfg(test)]
    pub(crate) fn synthetic(residual_norm: f64, velocity_norm: f64, k: usize, t: f64) -> Self {
        Self {
            x: vec![],
            v: vec![],
            x_prev: vec![],
            k,
            t,
            residual_norm,
            velocity_norm,
            residual: vec![],
            gradient: vec![],
            cg: None,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cfg: &SolverConfig,
    x: Vec<f64>,
    v: Vec<f64>,
    x_prev: Vec<f64>,
    k: usize,
    residual: Vec<f64>,
    gradient: Vec<f64>,
    cg: Option<CgVectors>,
) -> Result<SolverState> {
    if !(all_finite(&x) && all_finite(&v) && all_finite(&residual)) {
        return Err(SoarError::Diverged { step: k });
    }
    Ok(SolverState {
        residual_norm: norm(&residual),
        velocity_norm: norm(&v),
        t: k as f64 * cfg.dt,
        x,
        v,
        x_prev,
        k,
        residual,
        gradient,
        cg,
    })
}

fn expect_method(cfg: &SolverConfig, m: Method) -> Result<()> {
    if cfg.method == m {
        Ok(())
    } else {
        Err(SoarError::Config(format!(
            "{} step called with a {} config",
            m, cfg.method
        )))
    }
}

/// One step of whichever method `cfg` names.
pub fn step(state: &SolverState, op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    match cfg.method {
        Method::SoarStormerVerlet => step_soar_sv(state, op, ydelta, cfg),
        Method::SoarEuler => step_soar_euler(state, op, ydelta, cfg),
        Method::Landweber => step_landweber(state, op, ydelta, cfg),
        Method::Nesterov => step_nesterov(state, op, ydelta, cfg),
        Method::Chebyshev => step_chebyshev(state, op, ydelta, cfg),
        Method::Cgne => step_cgne(state, op, ydelta, cfg),
    }
}

/// Damped Störmer-Verlet:
///
/// ```text
/// v_half = (v + dt/2 A^T (y - A x)) / (1 + dt eta / 2)
/// x+     = x + dt v_half
/// v+     = v_half + dt/2 (A^T (y - A x+) - eta v_half)
/// ```
pub fn step_soar_sv(state: &SolverState, op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    expect_method(cfg, Method::SoarStormerVerlet)?;
    let (h, eta) = (cfg.dt, cfg.eta);
    let damp = 1.0 + 0.5 * h * eta;
    let v_half: Vec<f64> = state
        .v
        .iter()
        .zip(&state.gradient)
        .map(|(v, g)| (v + 0.5 * h * g) / damp)
        .collect();
    let mut x = state.x.clone();
    axpy(h, &v_half, &mut x);
    let (residual, gradient) = op.residual_and_gradient(&x, ydelta);
    let v: Vec<f64> = v_half
        .iter()
        .zip(&gradient)
        .map(|(vh, g)| vh + 0.5 * h * (g - eta * vh))
        .collect();
    finish(cfg, x, v, state.x.clone(), state.k + 1, residual, gradient, None)
}

/// Symplectic Euler: `x+ = x + dt v`, `v+ = v + dt (A^T (y - A x+) - eta v)`.
pub fn step_soar_euler(state: &SolverState, op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    expect_method(cfg, Method::SoarEuler)?;
    let (h, eta) = (cfg.dt, cfg.eta);
    let mut x = state.x.clone();
    axpy(h, &state.v, &mut x);
    let (residual, gradient) = op.residual_and_gradient(&x, ydelta);
    let v: Vec<f64> = state
        .v
        .iter()
        .zip(&gradient)
        .map(|(v, g)| v + h * (g - eta * v))
        .collect();
    finish(cfg, x, v, state.x.clone(), state.k + 1, residual, gradient, None)
}

/// `x+ = x + dt A^T (y - A x)`
pub fn step_landweber(state: &SolverState, op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    expect_method(cfg, Method::Landweber)?;
    let mut x = state.x.clone();
    axpy(cfg.dt, &state.gradient, &mut x);
    let (residual, gradient) = op.residual_and_gradient(&x, ydelta);
    let v = vec![0.0; x.len()];
    finish(cfg, x, v, state.x.clone(), state.k + 1, residual, gradient, None)
}

/// `z = x + k/(k + alpha) (x - x_prev)`, `x+ = z + dt A^T (y - A z)` where
/// `k` counts the steps already taken, so the first step has no momentum.
pub fn step_nesterov(state: &SolverState, op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    expect_method(cfg, Method::Nesterov)?;
    let kf = state.k as f64;
    let m = kf / (kf + cfg.nesterov_alpha);
    let z: Vec<f64> = state
        .x
        .iter()
        .zip(&state.x_prev)
        .map(|(x, xp)| x + m * (x - xp))
        .collect();
    let (_, grad_z) = op.residual_and_gradient(&z, ydelta);
    let mut x = z;
    axpy(cfg.dt, &grad_z, &mut x);
    let (residual, gradient) = op.residual_and_gradient(&x, ydelta);
    let v = vec![0.0; x.len()];
    finish(cfg, x, v, state.x.clone(), state.k + 1, residual, gradient, None)
}

/// Coefficients `(mu_k, omega_k)` of step `k >= 1` of the nu-method.
///
/// ```text
/// mu_1 = 0, omega_1 = (4 nu + 2) / (4 nu + 1)
/// mu_k    = (k-1)(2k-3)(2k+2nu-1) / ((k+2nu-1)(2k+4nu-1)(2k+2nu-3))
/// omega_k = 4 (2k+2nu-1)(k+nu-1) / ((k+2nu-1)(2k+4nu-1))
/// ```
pub fn nu_method_coefficients(nu: f64, k: usize) -> (f64, f64) {
    if k <= 1 {
        return (0.0, (4.0 * nu + 2.0) / (4.0 * nu + 1.0));
    }
    let k = k as f64;
    let mu = (k - 1.0) * (2.0 * k - 3.0) * (2.0 * k + 2.0 * nu - 1.0)
        / ((k + 2.0 * nu - 1.0) * (2.0 * k + 4.0 * nu - 1.0) * (2.0 * k + 2.0 * nu - 3.0));
    let omega = 4.0 * (2.0 * k + 2.0 * nu - 1.0) * (k + nu - 1.0)
        / ((k + 2.0 * nu - 1.0) * (2.0 * k + 4.0 * nu - 1.0));
    (mu, omega)
}

/// Chebyshev (nu = 1/2) method on `A / ||A||`:
/// `x_k = x_{k-1} + mu_k (x_{k-1} - x_{k-2}) + omega_k / ||A||^2 A^T (y - A x_{k-1})`.
pub fn step_chebyshev(state: &SolverState, op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    expect_method(cfg, Method::Chebyshev)?;
    let scale = op.operator_norm();
    if scale == 0.0 {
        return Err(SoarError::Domain("Chebyshev method needs a nonzero operator".into()));
    }
    let (mu, omega) = nu_method_coefficients(CHEBYSHEV_NU, state.k + 1);
    let w = omega / (scale * scale);
    let x: Vec<f64> = state
        .x
        .iter()
        .zip(&state.x_prev)
        .zip(&state.gradient)
        .map(|((x, xp), g)| x + mu * (x - xp) + w * g)
        .collect();
    let (residual, gradient) = op.residual_and_gradient(&x, ydelta);
    let v = vec![0.0; x.len()];
    finish(cfg, x, v, state.x.clone(), state.k + 1, residual, gradient, None)
}

/// Conjugate gradients on `A^T A x = A^T y` in residual form (CGLS).
pub fn step_cgne(state: &SolverState, op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig) -> Result<SolverState> {
    expect_method(cfg, Method::Cgne)?;
    let cg = state
        .cg
        .as_ref()
        .ok_or_else(|| SoarError::Config("state was not initialised for CGNE".into()))?;
    let q = op.apply(&cg.direction)?;
    let qq = dot(&q, &q);
    if qq == 0.0 || cg.gamma == 0.0 {
        return Err(SoarError::Breakdown { step: state.k });
    }
    let a = cg.gamma / qq;
    let mut x = state.x.clone();
    axpy(a, &cg.direction, &mut x);
    let k = state.k + 1;
    let (residual, gradient) = if k % RESYNC_EVERY == 0 {
        op.residual_and_gradient(&x, ydelta)
    } else {
        let mut r = state.residual.clone();
        axpy(-a, &q, &mut r);
        let s = op.apply_adjoint(&r)?;
        (r, s)
    };
    let gamma = dot(&gradient, &gradient);
    let beta = gamma / cg.gamma;
    let direction: Vec<f64> = gradient
        .iter()
        .zip(&cg.direction)
        .map(|(s, p)| s + beta * p)
        .collect();
    let v = vec![0.0; x.len()];
    finish(cfg, x, v, state.x.clone(), k, residual, gradient, Some(CgVectors { direction, gamma }))
}

/// Eigenvalues `mu_+-` of the Störmer-Verlet iteration matrix on the mode
/// `lambda`, as `(re, im)` pairs.
pub fn sv_mode_eigenvalues(eta: f64, dt: f64, lambda: f64) -> [(f64, f64); 2] {
    let d = 2.0 + dt * eta;
    let b = 2.0 - dt * dt * lambda;
    let c = 4.0 - dt * dt * eta * eta;
    let disc = b * b - c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [((b + s) / d, 0.0), ((b - s) / d, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [(b / d, s / d), (b / d, -s / d)]
    }
}

/// Moduli `|mu_+-|` over the spectrum of `A^T A`, zero eigenvalues included;
/// `2n` values in total.
pub fn iteration_matrix_spectrum(op: &DenseOperator, cfg: &SolverConfig) -> Result<Vec<f64>> {
    expect_method(cfg, Method::SoarStormerVerlet)?;
    let svd = op.svd()?;
    let mut lambdas = svd.lambdas();
    lambdas.resize(op.cols(), 0.0);
    let mut out = Vec::with_capacity(2 * lambdas.len());
    for l in lambdas {
        for (re, im) in sv_mode_eigenvalues(cfg.eta, cfg.dt, l) {
            out.push(re.hypot(im));
        }
    }
    Ok(out)
}

/// The `2n x 2n` matrix `B` with `(x+, v+) = B (x, v) + b` for Störmer-Verlet.
pub fn iteration_matrix(op: &DenseOperator, cfg: &SolverConfig) -> Result<DMatrix<f64>> {
    expect_method(cfg, Method::SoarStormerVerlet)?;
    let n = op.cols();
    let (h, eta) = (cfg.dt, cfg.eta);
    let d = 2.0 + h * eta;
    let m = op.matrix().transpose() * op.matrix();
    let id = DMatrix::<f64>::identity(n, n);
    let b11 = &id - &m * (h * h / d);
    let b12 = &id * (2.0 * h / d);
    let b21 = (&id * 4.0 - &m * (h * h)) * &m * (-h / (2.0 * d));
    let b22 = &id * ((2.0 - h * eta) / d) - &m * (h * h / d);
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    b.view_mut((0, 0), (n, n)).copy_from(&b11);
    b.view_mut((0, n), (n, n)).copy_from(&b12);
    b.view_mut((n, 0), (n, n)).copy_from(&b21);
    b.view_mut((n, n), (n, n)).copy_from(&b22);
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub k: usize,
    pub t: f64,
    pub residual_norm: f64,
    pub velocity_norm: f64,
    pub energy: f64,
}

impl From<&SolverState> for TrajectoryPoint {
    fn from(s: &SolverState) -> Self {
        Self {
            k: s.k,
            t: s.t,
            residual_norm: s.residual_norm,
            velocity_norm: s.velocity_norm,
            energy: s.energy(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SolverState,
    pub decision: StoppingDecision,
    pub trajectory: Vec<TrajectoryPoint>,
    /// `E_{k+1} <= E_k + 1e-8 E_0` held on every step.
    pub energy_monotone: bool,
}

/// Steps until `rule` fires or `cfg.max_iter` steps are done.
pub fn run(op: &DenseOperator, ydelta: &[f64], cfg: &SolverConfig, rule: &StoppingRule) -> Result<RunOutcome> {
    let mut state = SolverState::initial(op, ydelta, cfg)?;
    let e0 = state.energy();
    let mut prev_energy = e0;
    let mut energy_monotone = true;
    let mut trajectory = vec![TrajectoryPoint::from(&state)];
    let decision = loop {
        let (chi, fired) = rule.evaluate(&state)?;
        if fired {
            break StoppingDecision {
                fired: true,
                k_star: state.k,
                t_star: state.t,
                reason: rule.reason(state.k),
                chi_value: chi,
                residual_above_tau1: None,
            };
        }
        if state.k >= cfg.max_iter {
            break StoppingDecision {
                fired: false,
                k_star: state.k,
                t_star: state.t,
                reason: StopReason::MaxIterExceeded,
                chi_value: chi,
                residual_above_tau1: None,
            };
        }
        state = step(&state, op, ydelta, cfg)?;
        let e = state.energy();
        if e > prev_energy + 1e-8 * e0 {
            energy_monotone = false;
        }
        prev_energy = e;
        if cfg.thinning.keep(state.k) {
            trajectory.push(TrajectoryPoint::from(&state));
        }
    };
    if trajectory.last().map(|p| p.k) != Some(state.k) {
        trajectory.push(TrajectoryPoint::from(&state));
    }
    let mut decision = decision;
    if rule.kind == RuleKind::TotalEnergy && decision.fired {
        let tau1 = match rule.tau1 {
            Some(t) => t,
            None => DampingConfig::from_operator(op, cfg.eta)
                .map(|c| filter_constants(&c).gamma1 + 1e-6)
                .unwrap_or(1.0),
        };
        decision.residual_above_tau1 = Some(state.residual_norm >= tau1 * rule.delta);
    }
    Ok(RunOutcome {
        state,
        decision,
        trajectory,
        energy_monotone,
    })
}

/// CSV with columns `k,t,residual_norm,velocity_norm,energy`.
pub fn write_trajectory_csv<W: Write>(out: W, points: &[TrajectoryPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "t", "residual_norm", "velocity_norm", "energy"])?;
    for p in points {
        w.write_record([
            p.k.to_string(),
            format!("{:e}", p.t),
            format!("{:e}", p.residual_norm),
            format!("{:e}", p.velocity_norm),
            format!("{:e}", p.energy),
        ])?;
    }
    w.flush()?;
    Ok(())
}
