//! Spectral filters of the damped second order flow
//! `x'' + eta x' + A^T A x = A^T y`.
//!
//! On an eigenpair `A^T A u = lambda u` the flow started at `(x0, v0)` reads
//! `xi(t) = r(t) xi0 + phi(t) xi0' + g(t) <A^T y, u>`, where `r = 1 - lambda g`.
//! With `alpha = 1/t` these are the filters `r_alpha`, `phi_alpha`, `g_alpha`.
//!
//! All three damping regimes are evaluated through two exponentially scaled
//! mode functions `E_C = e^{-eta t/2} C` and `E_S = e^{-eta t/2} S`, where
//! `C, S` are `cosh/cos(w t/2)` and `sinh/sin(w t/2)/w`. Written that way the
//! regimes join continuously at `4 lambda = eta^2` with no `0/0` to guard.

use std::f64::consts::E;
use std::io::Write;

use crate::error::{check_len, Result, SoarError};
use crate::operator::DenseOperator;

/// Relative half-width of the band around `lambda = eta^2 / 4` that is
/// treated as critically damped.
pub const CRITICAL_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DampingRegime {
    Overdamped,
    Underdamped,
    Critical,
}

impl DampingRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            DampingRegime::Overdamped => "overdamped",
            DampingRegime::Underdamped => "underdamped",
            DampingRegime::Critical => "critical",
        }
    }
}

impl std::fmt::Display for DampingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Regime of a single spectral point.
pub fn classify(eta: f64, lambda: f64) -> DampingRegime {
    let d = eta * eta - 4.0 * lambda;
    if d.abs() <= CRITICAL_BAND * eta * eta {
        DampingRegime::Critical
    } else if d > 0.0 {
        DampingRegime::Overdamped
    } else {
        DampingRegime::Underdamped
    }
}

/// Response of one mode at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeResponse {
    pub r: f64,
    pub phi: f64,
    pub g: f64,
    /// `d r / dt = -lambda phi`
    pub r_dot: f64,
    pub phi_dot: f64,
}

fn mode_functions(eta: f64, lambda: f64, t: f64) -> (f64, f64) {
    let s = 0.5 * t;
    let d = eta * eta - 4.0 * lambda;
    if d.abs() <= CRITICAL_BAND * eta * eta {
        let e = (-eta * s).exp();
        (e, s * e)
    } else if d > 0.0 {
        let w = d.sqrt();
        // Slow rate written without the cancellation in (eta - w) / 2.
        let a = 2.0 * lambda / (eta + w);
        let b = 0.5 * (eta + w);
        let ea = (-a * t).exp();
        let eb = (-b * t).exp();
        (0.5 * (ea + eb), ea * (-(-w * t).exp_m1()) / (2.0 * w))
    } else {
        let nu = (-d).sqrt();
        let e = (-eta * s).exp();
        (e * (nu * s).cos(), e * (nu * s).sin() / nu)
    }
}

/// `g(t)` from its Taylor series; valid for `eta t <= 1`, `lambda t^2 <= 1`.
fn g_series(eta: f64, lambda: f64, t: f64) -> f64 {
    // Scaled coefficients d_k = c_k t^k of g'' + eta g' + lambda g = 1, g(0) = g'(0) = 0.
    let (et, lt2) = (eta * t, lambda * t * t);
    let (mut d_prev, mut d_cur) = (0.0, 0.5 * t * t);
    let mut sum = d_cur;
    for k in 2..80 {
        let kf = k as f64;
        let next = -(et * kf * d_cur + lt2 * d_prev) / ((kf + 1.0) * kf);
        sum += next;
        if next.abs() <= 1e-18 * sum.abs() && d_cur.abs() <= 1e-17 * sum.abs() {
            break;
        }
        d_prev = d_cur;
        d_cur = next;
    }
    sum
}

/// `(1 - e^{-x}) / x`, equal to 1 at 0.
fn e1(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Evaluates the mode response for `eta >= 0`, `lambda >= 0`, `t >= 0`.
///
/// `lambda = 0` is allowed and gives the evolution of null-space components.
pub fn mode_response(eta: f64, lambda: f64, t: f64) -> ModeResponse {
    let (ec, es) = mode_functions(eta, lambda, t);
    let r = if lambda == 0.0 { 1.0 } else { ec + eta * es };
    let phi = 2.0 * es;
    let phi_dot = ec - eta * es;
    let g = if eta * t <= 1.0 && lambda * t * t <= 1.0 {
        g_series(eta, lambda, t)
    } else if 8.0 * lambda < eta * eta {
        let w = (eta * eta - 4.0 * lambda).sqrt();
        let a = 2.0 * lambda / (eta + w);
        let b = 0.5 * (eta + w);
        (t * e1(a * t) + (-b * t).exp_m1() / b) / w
    } else {
        (1.0 - r) / lambda
    };
    ModeResponse {
        r,
        phi,
        g,
        r_dot: -lambda * phi,
        phi_dot,
    }
}

/// Damping parameter and the spectral data the filter constants depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingConfig {
    pub eta: f64,
    pub operator_norm_sq: f64,
    /// Largest spectral point below the critical band, if any.
    subcritical_lambda: Option<f64>,
    has_critical_mode: bool,
}

impl DampingConfig {
    /// Config from `eta` and `||A||^2` alone. Unless the whole spectrum is
    /// overdamped, attach the spectrum with [`DampingConfig::with_spectrum`]
    /// to get the sharper constants.
    pub fn new(eta: f64, operator_norm_sq: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(SoarError::Domain(format!("eta must be positive, got {eta}")));
        }
        if !(operator_norm_sq > 0.0 && operator_norm_sq.is_finite()) {
            return Err(SoarError::Domain(format!(
                "operator_norm_sq must be positive, got {operator_norm_sq}"
            )));
        }
        let top = classify(eta, operator_norm_sq);
        Ok(Self {
            eta,
            operator_norm_sq,
            subcritical_lambda: (top == DampingRegime::Overdamped).then_some(operator_norm_sq),
            has_critical_mode: top == DampingRegime::Critical,
        })
    }

    /// Records the discrete spectrum of `A^T A`.
    pub fn with_spectrum(mut self, lambdas: &[f64]) -> Self {
        let eta = self.eta;
        self.subcritical_lambda = lambdas
            .iter()
            .copied()
            .filter(|&l| l >= 0.0 && classify(eta, l) == DampingRegime::Overdamped)
            .fold(None, |m: Option<f64>, l| Some(m.map_or(l, |m| m.max(l))));
        self.has_critical_mode = lambdas.iter().any(|&l| classify(eta, l) == DampingRegime::Critical);
        self
    }

    /// Config for `op` with its singular spectrum attached.
    pub fn from_operator(op: &DenseOperator, eta: f64) -> Result<Self> {
        let svd = op.svd()?;
        let norm = svd.singular_values.first().copied().unwrap_or(0.0);
        Ok(Self::new(eta, norm * norm)?.with_spectrum(&svd.lambdas()))
    }

    pub fn subcritical_lambda(&self) -> Option<f64> {
        self.subcritical_lambda
    }

    /// Regime of the configuration as a whole.
    pub fn regime(&self) -> DampingRegime {
        match classify(self.eta, self.operator_norm_sq) {
            DampingRegime::Overdamped => DampingRegime::Overdamped,
            _ if self.has_critical_mode => DampingRegime::Critical,
            DampingRegime::Critical => DampingRegime::Critical,
            DampingRegime::Underdamped => DampingRegime::Underdamped,
        }
    }

    fn omega_min(&self) -> Option<f64> {
        self.subcritical_lambda
            .map(|l| (self.eta * self.eta - 4.0 * l).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterEvaluation {
    pub alpha: f64,
    pub lambda: f64,
    pub g: f64,
    pub phi: f64,
    pub r: f64,
    pub regime: DampingRegime,
}

pub fn evaluate_filters(cfg: &DampingConfig, alpha: f64, lambda: f64) -> Result<FilterEvaluation> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(SoarError::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(lambda > 0.0) || lambda > cfg.operator_norm_sq * (1.0 + 1e-12) {
        return Err(SoarError::Domain(format!(
            "lambda must lie in (0, {}], got {lambda}",
            cfg.operator_norm_sq
        )));
    }
    let m = mode_response(cfg.eta, lambda, 1.0 / alpha);
    Ok(FilterEvaluation {
        alpha,
        lambda,
        g: m.g,
        phi: m.phi,
        r: m.r,
        regime: classify(cfg.eta, lambda),
    })
}

/// Constants in `|r_alpha| <= gamma1`, `|phi_alpha| <= gamma2` and
/// `sqrt(lambda) |g_alpha| <= gamma_star / sqrt(alpha)` for `alpha <= alpha_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConstants {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_star: f64,
    /// `f64::INFINITY` when every mode is overdamped.
    pub alpha_bar: f64,
}

pub fn filter_constants(cfg: &DampingConfig) -> FilterConstants {
    let eta = cfg.eta;
    let mut c = FilterConstants {
        gamma1: 0.0,
        gamma2: 0.0,
        gamma_star: 0.0,
        alpha_bar: f64::INFINITY,
    };
    if let Some(w) = cfg.omega_min() {
        c.gamma1 = eta / (2.0 * w) + 0.5;
        // phi also approaches (1 - e^{-eta t}) / eta on slow modes.
        c.gamma2 = (eta / (2.0 * w)).max(1.0 / eta);
        c.gamma_star = eta.sqrt() / w;
    }
    if cfg.regime() != DampingRegime::Overdamped {
        c.gamma1 = c.gamma1.max(1.0);
        c.gamma2 = c.gamma2.max(2.0 / (E * eta));
        c.gamma_star = c.gamma_star.max(4.0);
        c.alpha_bar = eta * eta;
    }
    c
}

/// Constant `gamma(p)` with `lambda^p |r_alpha(lambda)| <= gamma alpha^p` and
/// the same bound for `phi_alpha`.
pub fn qualification_constant(cfg: &DampingConfig, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(SoarError::Domain(format!("p must be positive, got {p}")));
    }
    let eta = cfg.eta;
    let norm_sq = cfg.operator_norm_sq;
    let mut gamma: f64 = 0.0;
    if let Some(w) = cfg.omega_min() {
        let gamma1 = eta / (2.0 * w) + 0.5;
        gamma = (p * eta / E).powf(p) * gamma1.max(1.0 / w);
    }
    let regime = cfg.regime();
    if regime != DampingRegime::Overdamped {
        let half = 0.5 * (eta + 2.0 * norm_sq);
        let gamma_b = half * (2.0 * (p + 1.0) / (E * eta)).powf(p + 1.0) * norm_sq.powf(p);
        gamma = gamma.max(gamma_b * (2.0 / eta).max(1.0));
        if regime == DampingRegime::Critical {
            let gamma_c = half
                * ((p + 1.0) / E).powf(p + 1.0)
                * (0.5 * eta).powf(p - 2.0)
                * (0.5 * eta).max(1.0);
            gamma = gamma.max(gamma_c);
        }
    }
    Ok(gamma)
}

/// Source condition `x0 - x_dagger = (A^T A)^p w` with `||w|| <= rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceCondition {
    pub p: f64,
    pub rho: f64,
}

impl SourceCondition {
    pub fn new(p: f64, rho: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(SoarError::Domain(format!("p must be positive, got {p}")));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(SoarError::Domain(format!("rho must be nonnegative, got {rho}")));
        }
        Ok(Self { p, rho })
    }
}

/// Stopping time `T* = (2 gamma rho / delta)^{2/(2p+1)}`.
pub fn a_priori_time(sc: &SourceCondition, cfg: &DampingConfig, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(SoarError::Domain(format!("delta must be positive, got {delta}")));
    }
    let gamma = qualification_constant(cfg, sc.p)?;
    let e = 2.0 / (2.0 * sc.p + 1.0);
    Ok((2.0 * gamma).powf(e) * sc.rho.powf(e) * delta.powf(-e))
}

/// Error bound `(1 + gamma_star) (2 gamma rho)^{1/(2p+1)} delta^{2p/(2p+1)}`
/// attained at [`a_priori_time`].
pub fn a_priori_error_bound(sc: &SourceCondition, cfg: &DampingConfig, delta: f64) -> Result<f64> {
    let gamma = qualification_constant(cfg, sc.p)?;
    let gs = filter_constants(cfg).gamma_star;
    let q = 2.0 * sc.p + 1.0;
    Ok((1.0 + gs) * (2.0 * gamma * sc.rho).powf(1.0 / q) * delta.powf(2.0 * sc.p / q))
}

/// Exact solution `(x(t), x'(t))` of the flow, mode by mode in the singular
/// basis of `op`. Components outside the retained right singular vectors
/// evolve with `lambda = 0`.
pub fn closed_form_solution(
    op: &DenseOperator,
    cfg: &DampingConfig,
    x0: &[f64],
    v0: &[f64],
    y: &[f64],
    t: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = op.cols();
    check_len(n, x0.len())?;
    check_len(n, v0.len())?;
    check_len(op.rows(), y.len())?;
    if !(t >= 0.0) {
        return Err(SoarError::Domain(format!("t must be nonnegative, got {t}")));
    }
    let svd = op.svd()?;
    let eta = cfg.eta;
    let u = &svd.right_vectors;
    let vy = &svd.left_vectors;

    let null = mode_response(eta, 0.0, t);
    let mut x: Vec<f64> = x0.iter().zip(v0).map(|(a, b)| a + null.phi * b).collect();
    let mut v: Vec<f64> = v0.iter().map(|b| null.phi_dot * b).collect();

    for (j, &sigma) in svd.singular_values.iter().enumerate() {
        let col = u.column(j);
        let xi0: f64 = col.iter().zip(x0).map(|(a, b)| a * b).sum();
        let dxi0: f64 = col.iter().zip(v0).map(|(a, b)| a * b).sum();
        let b = sigma * vy.column(j).iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let m = mode_response(eta, sigma * sigma, t);
        // Replace the null-space evolution of this component by its own.
        let cx = m.r * xi0 + m.phi * dxi0 + m.g * b - (xi0 + null.phi * dxi0);
        let cv = m.r_dot * xi0 + m.phi_dot * dxi0 + m.phi * b - null.phi_dot * dxi0;
        for (i, uij) in col.iter().enumerate() {
            x[i] += cx * uij;
            v[i] += cv * uij;
        }
    }
    Ok((x, v))
}

/// Writes `alpha,lambda,g,phi,r,regime` rows for every pair. Returns the row count.
pub fn write_filter_curve<W: Write>(
    out: W,
    cfg: &DampingConfig,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "lambda", "g", "phi", "r", "regime"])?;
    let mut rows = 0;
    for &alpha in alphas {
        for &lambda in lambdas {
            let e = evaluate_filters(cfg, alpha, lambda)?;
            w.write_record([
                format!("{:e}", e.alpha),
                format!("{:e}", e.lambda),
                format!("{:e}", e.g),
                format!("{:e}", e.phi),
                format!("{:e}", e.r),
                e.regime.to_string(),
            ])?;
            rows += 1;
        }
    }
    w.flush()?;
    Ok(rows)
}
