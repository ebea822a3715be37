//! Stopping rules evaluated on the discrete trajectory.
//!
//! Every rule fires at the first index where its function `chi` is
//! nonpositive; there is no interpolation between steps.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SoarError};
use crate::solvers::SolverState;

pub const DEFAULT_TAU: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// `||A x - y_delta|| <= tau delta`
    Morozov,
    /// `||A x - y_delta||^2 + ||v||^2 <= (tau delta)^2`
    TotalEnergy,
    /// `t >= T*`
    APriori,
    MaxIterOnly,
}

impl RuleKind {
    pub const ALL: [RuleKind; 4] = [
        RuleKind::Morozov,
        RuleKind::TotalEnergy,
        RuleKind::APriori,
        RuleKind::MaxIterOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Morozov => "morozov",
            RuleKind::TotalEnergy => "total_energy",
            RuleKind::APriori => "a_priori",
            RuleKind::MaxIterOnly => "max_iter_only",
        }
    }
}

impl std::fmt::Display for RuleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RuleKind {
    type Err = SoarError;
    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SoarError::Config(format!("unknown stopping rule `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    DiscrepancyCrossed,
    EnergyCrossed,
    APrioriReached,
    ImmediateStop,
    MaxIterExceeded,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::DiscrepancyCrossed => "discrepancy_crossed",
            StopReason::EnergyCrossed => "energy_crossed",
            StopReason::APrioriReached => "a_priori_reached",
            StopReason::ImmediateStop => "immediate_stop",
            StopReason::MaxIterExceeded => "max_iter_exceeded",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingRule {
    pub kind: RuleKind,
    pub tau: f64,
    /// Energy threshold multiplier of table mode; replaces `tau` for the
    /// total energy rule when set.
    pub tau_te: Option<f64>,
    pub delta: f64,
    pub t_star: Option<f64>,
    /// Level for the residual-at-stop diagnostic of the total energy rule.
    /// `None` means `gamma1 + 1e-6` of the run's damping config.
    pub tau1: Option<f64>,
}

impl StoppingRule {
    pub fn morozov(tau: f64, delta: f64) -> Result<Self> {
        Self::discrepancy(RuleKind::Morozov, tau, delta)
    }

    pub fn total_energy(tau: f64, delta: f64) -> Result<Self> {
        Self::discrepancy(RuleKind::TotalEnergy, tau, delta)
    }

    /// Total energy rule with `tau_te = 1.1 delta^{4p/(4p+1)}`.
    pub fn total_energy_table_mode(p: f64, delta: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(SoarError::Config(format!("p must be positive, got {p}")));
        }
        let mut rule = Self::discrepancy(RuleKind::TotalEnergy, DEFAULT_TAU, delta)?;
        rule.tau_te = Some(table_mode_tau(p, delta));
        Ok(rule)
    }

    fn discrepancy(kind: RuleKind, tau: f64, delta: f64) -> Result<Self> {
        if !(tau > 1.0 && tau.is_finite()) {
            return Err(SoarError::Config(format!("tau must exceed 1, got {tau}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(SoarError::Config(format!("delta must be nonnegative, got {delta}")));
        }
        Ok(Self {
            kind,
            tau,
            tau_te: None,
            delta,
            t_star: None,
            tau1: None,
        })
    }

    pub fn a_priori(t_star: f64) -> Result<Self> {
        if !(t_star >= 0.0 && t_star.is_finite()) {
            return Err(SoarError::Config(format!("t_star must be nonnegative, got {t_star}")));
        }
        Ok(Self {
            kind: RuleKind::APriori,
            tau: DEFAULT_TAU,
            tau_te: None,
            delta: 0.0,
            t_star: Some(t_star),
            tau1: None,
        })
    }

    pub fn max_iter_only() -> Self {
        Self {
            kind: RuleKind::MaxIterOnly,
            tau: DEFAULT_TAU,
            tau_te: None,
            delta: 0.0,
            t_star: None,
            tau1: None,
        }
    }

    /// Multiplier used by the total energy rule.
    pub fn tau_eff(&self) -> f64 {
        self.tau_te.unwrap_or(self.tau)
    }

    /// Whether `tau` exceeds the bias constant `gamma1` as the convergence
    /// theory of the discrepancy principle asks. Advisory only.
    pub fn satisfies_theory(&self, gamma1: f64) -> bool {
        self.tau > gamma1
    }

    /// `(chi, fired)` for the rule at `state`.
    pub fn evaluate(&self, state: &SolverState) -> Result<(f64, bool)> {
        match self.kind {
            RuleKind::Morozov => Ok(eval_morozov(state, self)),
            RuleKind::TotalEnergy => Ok(eval_total_energy(state, self)),
            RuleKind::APriori => {
                let fired = eval_a_priori(state, self)?;
                Ok((self.t_star.unwrap_or(0.0) - state.t, fired))
            }
            RuleKind::MaxIterOnly => Ok((f64::NAN, false)),
        }
    }

    pub(crate) fn reason(&self, k: usize) -> StopReason {
        if k == 0 {
            return StopReason::ImmediateStop;
        }
        match self.kind {
            RuleKind::Morozov => StopReason::DiscrepancyCrossed,
            RuleKind::TotalEnergy => StopReason::EnergyCrossed,
            RuleKind::APriori => StopReason::APrioriReached,
            RuleKind::MaxIterOnly => StopReason::MaxIterExceeded,
        }
    }
}

/// `1.1 delta^{4p/(4p+1)}`
pub fn table_mode_tau(p: f64, delta: f64) -> f64 {
    1.1 * delta.powf(4.0 * p / (4.0 * p + 1.0))
}

/// `chi = ||A x - y_delta|| - tau delta`
pub fn eval_morozov(state: &SolverState, rule: &StoppingRule) -> (f64, bool) {
    let chi = state.residual_norm - rule.tau * rule.delta;
    (chi, chi <= 0.0)
}

/// `chi_te = ||A x - y_delta||^2 + ||v||^2 - (tau_eff delta)^2`
pub fn eval_total_energy(state: &SolverState, rule: &StoppingRule) -> (f64, bool) {
    let level = rule.tau_eff() * rule.delta;
    let chi = state.residual_norm.powi(2) + state.velocity_norm.powi(2) - level * level;
    (chi, chi <= 0.0)
}

pub fn eval_a_priori(state: &SolverState, rule: &StoppingRule) -> Result<bool> {
    let t_star = rule
        .t_star
        .ok_or_else(|| SoarError::Config("a priori rule needs t_star".into()))?;
    // t is accumulated as k * dt; tolerate the last-bit rounding of that product.
    Ok(state.t >= t_star * (1.0 - 1e-12))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingDecision {
    pub fired: bool,
    pub k_star: usize,
    pub t_star: f64,
    pub reason: StopReason,
    pub chi_value: f64,
    /// Total energy rule only: residual at the stop was at least `tau1 delta`.
    pub residual_above_tau1: Option<bool>,
}
