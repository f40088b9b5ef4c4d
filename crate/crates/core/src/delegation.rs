//! Delegate to the optimally designed agent, or let the uninformed principal act?
//!
//! Centralizing means taking the prior-optimal action `E_f[θ]`, worth
//! `-Var_f(θ)`. Delegating is worth `U(g*)`. The direct comparison decides; for
//! two states and two signals a closed-form threshold on the agent's ideal
//! confidence is reported next to it.

use serde::{Deserialize, Serialize};

use crate::binary::determinant;
use crate::design::{solve_design, Method, SolverConfig};
use crate::error::Result;
use crate::model::{conflict_moments, weighted_covariance, JointDistribution, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelegationReport {
    /// `delegation_payoff >= centralization_payoff`
    pub delegate: bool,
    /// `U(g*)`
    pub delegation_payoff: f64,
    /// `-Var_f(θ)`
    pub centralization_payoff: f64,
    /// Variance of the posterior mean `E_f[θ|s]`.
    pub var_signal: f64,
    pub method: Method,
    /// Closed-form threshold on the ideal confidence (2×2 only).
    pub threshold_rhs: Option<f64>,
    pub tau_star_interior: Option<f64>,
    /// Whether `tau_star_interior >= threshold_rhs` gives the same answer as `delegate`.
    pub threshold_agrees: Option<bool>,
    /// Whether the design optimum sits on the boundary of the feasible beliefs.
    pub clamped: Option<bool>,
}

/// `|f|² (θ₂-θ₁)² / (f_S(1) f_S(2))` for any 2×2 joint distribution,
/// including the independent limit where it vanishes.
pub fn signal_variance_closed_form(f: &JointDistribution, states: [f64; 2]) -> f64 {
    let det = determinant(f);
    let fs = f.col_marginal();
    det * det / (fs[0] * fs[1]) * (states[1] - states[0]).powi(2)
}

/// `Var_f(E_f[θ|s])` in closed form.
pub fn var_signal(sc: &Scenario) -> Result<f64> {
    sc.require_binary()?;
    Ok(signal_variance_closed_form(
        sc.joint(),
        [sc.states()[0], sc.states()[1]],
    ))
}

/// `Var_f(E_f[θ|s])` summed directly; any shape.
pub fn posterior_mean_variance(sc: &Scenario) -> f64 {
    let post = sc.posterior_means();
    weighted_covariance(sc.joint().col_marginal(), &post, &post)
}

/// `f_S(1) f_S(2) E_f[c]² / (|f| (y₂-y₁)(θ₂-θ₁)) - |f|`.
pub fn threshold_rhs(sc: &Scenario) -> Result<f64> {
    sc.require_binary()?;
    let fs = sc.joint().col_marginal();
    let det = determinant(sc.joint());
    let mean_conflict = conflict_moments(sc).mean_conflict;
    let dy = sc.y()[1] - sc.y()[0];
    let dtheta = sc.states()[1] - sc.states()[0];
    Ok(fs[0] * fs[1] * mean_conflict * mean_conflict / (det * dy * dtheta) - det)
}

pub fn delegation_decision(sc: &Scenario, config: &SolverConfig) -> Result<DelegationReport> {
    let design = solve_design(sc, config)?;
    let centralization_payoff = -sc.state_variance();
    let delegate = design.payoff >= centralization_payoff;
    let mut report = DelegationReport {
        delegate,
        delegation_payoff: design.payoff,
        centralization_payoff,
        var_signal: posterior_mean_variance(sc),
        method: design.method,
        threshold_rhs: None,
        tau_star_interior: None,
        threshold_agrees: None,
        clamped: None,
    };
    if let Some(binary) = &design.binary {
        let rhs = threshold_rhs(sc)?;
        report.var_signal = var_signal(sc)?;
        report.threshold_rhs = Some(rhs);
        report.tau_star_interior = Some(binary.tau_star_interior);
        report.threshold_agrees = Some((binary.tau_star_interior >= rhs) == delegate);
        report.clamped = Some(binary.clamped);
    }
    Ok(report)
}
