//! Closed-form belief design with two states and two signals.
//!
//! Every feasible belief is `f + τ·bbᵀ` with `b = (1, -1)ᵀ`; `τ` is the agent's
//! level of confidence and ranges over a compact interval fixed by `f`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{principal_payoff, JointDistribution, Scenario};
use crate::order::ConfidenceTag;

/// Tolerance on `(θ₂-θ₁) - (y₂-y₁)` when testing for an additive bias.
pub const CALIBRATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySolution {
    pub tau_lower: f64,
    pub tau_upper: f64,
    /// Unconstrained maximizer of `U(f + τbbᵀ)`.
    pub tau_star_interior: f64,
    /// Maximizer over `[tau_lower, tau_upper]`.
    pub tau_star: f64,
    /// `f₁₁f₂₂ - f₁₂f₂₁`
    pub det_f: f64,
    pub classification: ConfidenceTag,
    pub payoff: f64,
    pub clamped: bool,
}

/// Determinant of the 2×2 joint distribution.
pub fn determinant(f: &JointDistribution) -> f64 {
    f.get(0, 0) * f.get(1, 1) - f.get(0, 1) * f.get(1, 0)
}

/// Feasible interval `[τ̲, τ̄]` keeping every entry of `f + τbbᵀ` in `[0, 1]`.
pub fn tau_bounds(sc: &Scenario) -> Result<(f64, f64)> {
    sc.require_binary()?;
    let f = sc.joint();
    let (f11, f12, f21, f22) = (f.get(0, 0), f.get(0, 1), f.get(1, 0), f.get(1, 1));
    let lower = -f11.min(1.0 - f12).min(1.0 - f21).min(f22);
    let upper = (1.0 - f11).min(f12).min(f21).min(1.0 - f22);
    Ok((lower, upper))
}

/// `f + τbbᵀ` as a raw matrix.
pub fn perturbed(f: &JointDistribution, tau: f64) -> DMatrix<f64> {
    let mut g = f.probs().clone();
    g[(0, 0)] += tau;
    g[(1, 1)] += tau;
    g[(0, 1)] -= tau;
    g[(1, 0)] -= tau;
    g
}

/// `E_τ[y | s_j]` in closed form.
pub fn actions_at(sc: &Scenario, tau: f64) -> [f64; 2] {
    let fs = sc.joint().col_marginal();
    let ey = sc.preferred_action_means();
    let dy = sc.y()[1] - sc.y()[0];
    [ey[0] - tau * dy / fs[0], ey[1] + tau * dy / fs[1]]
}

/// `U(f + τbbᵀ)`; `tau` must lie in the feasible interval.
pub fn payoff_at(sc: &Scenario, tau: f64) -> Result<f64> {
    sc.require_binary()?;
    let g = JointDistribution::new(perturbed(sc.joint(), tau))?;
    principal_payoff(sc, &g)
}

/// Prop-1 style classification from the sign of `(θ₂-θ₁) - (y₂-y₁)`.
pub fn classify_by_slopes(sc: &Scenario) -> ConfidenceTag {
    let d = (sc.states()[1] - sc.states()[0]) - (sc.y()[1] - sc.y()[0]);
    if d.abs() <= CALIBRATION_TOLERANCE {
        ConfidenceTag::WellCalibrated
    } else if d > 0.0 {
        ConfidenceTag::Overconfident
    } else {
        ConfidenceTag::Underconfident
    }
}

pub fn solve_binary(sc: &Scenario) -> Result<BinarySolution> {
    let (tau_lower, tau_upper) = tau_bounds(sc)?;
    let det_f = determinant(sc.joint());
    let c = sc.conflict();
    let y = sc.y();
    let classification = classify_by_slopes(sc);
    let tau_star_interior = if classification == ConfidenceTag::WellCalibrated {
        0.0
    } else {
        -(c[1] - c[0]) / (y[1] - y[0]) * det_f
    };
    let tau_star = tau_star_interior.clamp(tau_lower, tau_upper);
    let clamped = tau_star != tau_star_interior;
    let payoff = payoff_at(sc, tau_star)?;
    Ok(BinarySolution {
        tau_lower,
        tau_upper,
        tau_star_interior,
        tau_star,
        det_f,
        classification,
        payoff,
        clamped,
    })
}
