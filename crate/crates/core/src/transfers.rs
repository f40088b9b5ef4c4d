//! Joint design of beliefs and a wage contract with two states and two signals.
//!
//! The principal recommends action `x_i` after signal `s_i` and pays `w_i` when
//! it is taken; any other action earns nothing. An agent who believes the
//! signal-`i` distribution `g` would, unpaid, pick `μ_i = E_g[y|s_i]`.
//! Incentive compatibility needs the recommended action to beat both the other
//! recommendation and the unpaid optimum `μ_i`.

use serde::{Deserialize, Serialize};

use crate::binary::{actions_at, solve_binary};
use crate::error::{Error, Result};
use crate::model::{conflict_moments, payoff_of_actions, Scenario};

/// Negative slack beyond this counts as an incentive violation.
pub const IC_TOLERANCE: f64 = 1e-9;

/// Which pair of incentive constraints binds, by where `μ̄ = (μ₁+μ₂)/2` falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    /// `x₂ ≥ x₁ > μ̄`
    AboveMidpoint,
    /// `x₁ ≤ μ̄ ≤ x₂`
    Straddling,
    /// `x₁ ≤ x₂ < μ̄`
    BelowMidpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractSolution {
    pub x: [f64; 2],
    pub w: [f64; 2],
    /// `E_τ[y | s_i]`
    pub mu: [f64; 2],
    pub tau: f64,
    pub placement: Placement,
    pub total_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcReport {
    /// Signal 1: recommendation 1 versus recommendation 2.
    pub cross_1: f64,
    /// Signal 1: recommendation 1 versus the unpaid optimum.
    pub off_path_1: f64,
    /// Signal 2: recommendation 2 versus recommendation 1.
    pub cross_2: f64,
    /// Signal 2: recommendation 2 versus the unpaid optimum.
    pub off_path_2: f64,
    pub violated: bool,
}

impl IcReport {
    pub fn slacks(&self) -> [f64; 4] {
        [self.cross_1, self.off_path_1, self.cross_2, self.off_path_2]
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks().into_iter().fold(f64::INFINITY, f64::min)
    }
}

pub fn placement_of(x: [f64; 2], mu: [f64; 2]) -> Placement {
    let mid = 0.5 * (mu[0] + mu[1]);
    if x[0] > mid {
        Placement::AboveMidpoint
    } else if x[1] < mid {
        Placement::BelowMidpoint
    } else {
        Placement::Straddling
    }
}

/// `-Σ_i f_S(i) (E_f[(x_i - θ)^2 | s_i] + w_i)`.
pub fn contract_payoff(sc: &Scenario, x: [f64; 2], w: [f64; 2]) -> f64 {
    let fs = sc.joint().col_marginal();
    payoff_of_actions(sc, &x) - fs[0] * w[0] - fs[1] * w[1]
}

/// Incentive slacks given recommendations, wages and the agent's unpaid optima.
pub fn ic_slacks(x: [f64; 2], w: [f64; 2], mu: [f64; 2]) -> IcReport {
    let sq = |a: f64| a * a;
    let cross_1 = sq(x[1] - mu[0]) - sq(x[0] - mu[0]) + w[0] - w[1];
    let off_path_1 = w[0] - sq(x[0] - mu[0]);
    let cross_2 = sq(x[0] - mu[1]) - sq(x[1] - mu[1]) + w[1] - w[0];
    let off_path_2 = w[1] - sq(x[1] - mu[1]);
    let violated = [cross_1, off_path_1, cross_2, off_path_2]
        .iter()
        .any(|&s| s < -IC_TOLERANCE);
    IcReport {
        cross_1,
        off_path_1,
        cross_2,
        off_path_2,
        violated,
    }
}

/// Checks a contract against the agent whose beliefs are `f + τbbᵀ` at `contract.tau`.
pub fn verify_ic(sc: &Scenario, contract: &ContractSolution) -> Result<IcReport> {
    sc.require_binary()?;
    Ok(ic_slacks(contract.x, contract.w, actions_at(sc, contract.tau)))
}

/// Cheapest incentive-compatible wages for recommendations `x`, or `None` if
/// no wages work (the recommendations order opposite to `mu`).
pub fn minimal_wages(x: [f64; 2], mu: [f64; 2]) -> Option<[f64; 2]> {
    let sq = |a: f64| a * a;
    let a = [sq(x[0] - mu[0]), sq(x[1] - mu[1])];
    // the cross constraints read lower ≤ w₂ - w₁ ≤ upper
    let upper = sq(x[1] - mu[0]) - a[0];
    let lower = sq(x[1] - mu[1]) - sq(x[0] - mu[1]);
    if lower > upper {
        return None;
    }
    Some([a[0].max(a[1] - upper), a[1].max(a[0] + lower)])
}

/// Optimal beliefs and contract.
///
/// The beliefs are the binary design optimum `τ*`. Recommendations split the
/// difference between the principal's posterior mean and the agent's unpaid
/// optimum, and each wage exactly compensates the agent's disutility of
/// compliance. When `τ*` is interior the wedge `x_i - μ_i` is `-E_f[c]/2` for
/// both signals and wages are flat; a clamped `τ*` leaves them unequal.
pub fn solve_with_transfers(sc: &Scenario) -> Result<ContractSolution> {
    sc.require_binary()?;
    let post = sc.posterior_means();
    let mean_conflict = conflict_moments(sc).mean_conflict;
    let spread = post[1] - post[0];
    if mean_conflict.abs() > spread {
        return Err(Error::HypothesisViolated {
            condition: "|E_f[c]| <= E_f[θ|s₂] - E_f[θ|s₁]".into(),
            lhs: mean_conflict.abs(),
            rhs: spread,
        });
    }
    let tau = solve_binary(sc)?.tau_star;
    let contract = split_difference(sc, tau);
    if contract.placement != Placement::Straddling {
        let mid = 0.5 * (contract.mu[0] + contract.mu[1]);
        let (lhs, rhs) = match contract.placement {
            Placement::AboveMidpoint => (contract.x[0], mid),
            _ => (mid, contract.x[1]),
        };
        return Err(Error::HypothesisViolated {
            condition: "x₁ <= (μ₁+μ₂)/2 <= x₂ at feasible beliefs".into(),
            lhs,
            rhs,
        });
    }
    Ok(contract)
}

/// The best contract when only the well-calibrated agent (`τ = 0`) is available.
pub fn well_calibrated_benchmark(sc: &Scenario) -> Result<ContractSolution> {
    sc.require_binary()?;
    Ok(split_difference(sc, 0.0))
}

fn split_difference(sc: &Scenario, tau: f64) -> ContractSolution {
    let post = sc.posterior_means();
    let mu = actions_at(sc, tau);
    let x = [0.5 * (post[0] + mu[0]), 0.5 * (post[1] + mu[1])];
    let w = [(x[0] - mu[0]).powi(2), (x[1] - mu[1]).powi(2)];
    ContractSolution {
        x,
        w,
        mu,
        tau,
        placement: placement_of(x, mu),
        total_payoff: contract_payoff(sc, x, w),
    }
}
