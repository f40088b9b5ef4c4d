//! General `n×m` belief design: choose `g` with `f`'s marginals to maximize
//! the principal's payoff `U(g)`.
//!
//! The payoff depends on `g` only through the response deviation
//! `δ(j) = E_g[y|s_j] - E_f[y|s_j]`, and is strictly concave in it. The ideal
//! deviation `E_f[c] - E_f[c|s_j]` makes the agent act as if its bias were
//! additive. [`solve_design`] tries, in order:
//!
//! 1. the closed form when `n = m = 2`;
//! 2. `g = f` when `E_f[c|s]` is constant;
//! 3. the cumulative-deviation construction, with split weights found by a
//!    max-slack LP, which attains the ideal deviation whenever some split
//!    keeps `g` inside the simplex;
//! 4. an away-step conditional-gradient fallback certified by its duality gap.

pub mod floor;
pub mod frank_wolfe;
pub mod cumulative;
pub mod transport;

pub use frank_wolfe::{FallbackOutcome, Start};
pub use floor::floor_representative;
pub use cumulative::{construct_cumulative, feasibility_search, SplitWeights};

use serde::{Deserialize, Serialize};

use crate::binary::{self, BinarySolution};
use crate::error::Result;
use crate::model::{conflict_moments, payoff_terms, JointDistribution, PayoffTerms, Scenario};
use crate::order::{self, ConfidenceClass, TransformationMatrix};

/// Spread of `E_f[c|s]` at or below this counts as constant.
pub const CONSTANT_CONFLICT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub gap_tolerance: f64,
    pub max_iterations: usize,
    /// First-order residual below which an optimum is reported as interior.
    pub foc_tolerance: f64,
    /// Sign tolerance for concordance classification.
    pub sign_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tolerance: 1e-8,
            max_iterations: 100_000,
            foc_tolerance: 1e-8,
            sign_tolerance: order::SIGN_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedFormBinary,
    CumulativeConstruction,
    FallbackQP,
}

/// `δ(j) = E_g[y|s_j] - E_f[y|s_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseDeviation {
    pub delta: Vec<f64>,
}

impl ResponseDeviation {
    /// `Σ_j f_S(j) δ(j)`, zero for any belief with the true marginals.
    pub fn weighted_mean(&self, sc: &Scenario) -> f64 {
        crate::model::dot(sc.joint().col_marginal(), &self.delta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSolution {
    pub g_star: JointDistribution,
    pub delta_star: ResponseDeviation,
    pub classification: ConfidenceClass,
    pub payoff: f64,
    pub payoff_terms: PayoffTerms,
    pub method: Method,
    pub foc_residual: f64,
    /// `foc_residual <= foc_tolerance`
    pub interior: bool,
    pub phi: Option<SplitWeights>,
    /// Duality gap certificate (fallback only).
    pub duality_gap: Option<f64>,
    pub iterations: usize,
    pub binary: Option<BinarySolution>,
}

/// Deviation of an agent holding beliefs `g` from the well-calibrated agent.
pub fn response_deviation(sc: &Scenario, g: &JointDistribution) -> Result<ResponseDeviation> {
    let actions = crate::model::agent_actions(sc, g)?;
    let base = sc.preferred_action_means();
    Ok(ResponseDeviation {
        delta: actions.iter().zip(&base).map(|(a, b)| a - b).collect(),
    })
}

/// `δ(j) = E_f[c] - E_f[c|s_j]`: the deviation that makes conflict look constant.
pub fn ideal_deviation(sc: &Scenario) -> ResponseDeviation {
    let moments = conflict_moments(sc);
    ResponseDeviation {
        delta: moments
            .conditional_conflict
            .iter()
            .map(|c| moments.mean_conflict - c)
            .collect(),
    }
}

/// `max_l |(δ_l + E_f[c|s_l]) - (δ_{l+1} + E_f[c|s_{l+1}])|`.
pub fn foc_residual(sc: &Scenario, delta: &ResponseDeviation) -> f64 {
    let moments = conflict_moments(sc);
    let shifted: Vec<f64> = delta
        .delta
        .iter()
        .zip(&moments.conditional_conflict)
        .map(|(d, c)| d + c)
        .collect();
    shifted
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(0.0, f64::max)
}

/// `max_j |E_f[c|s_j] - E_f[c]|`.
pub fn conflict_spread(sc: &Scenario) -> f64 {
    let moments = conflict_moments(sc);
    moments
        .conditional_conflict
        .iter()
        .map(|c| (c - moments.mean_conflict).abs())
        .fold(0.0, f64::max)
}

pub fn solve_design(sc: &Scenario, config: &SolverConfig) -> Result<DesignSolution> {
    if sc.is_binary() {
        return solve_binary_lifted(sc, config);
    }
    if conflict_spread(sc) <= CONSTANT_CONFLICT_TOLERANCE {
        let g = sc.joint().clone();
        let t = TransformationMatrix::zeros(sc.n_states(), sc.n_signals());
        return assemble(
            sc,
            config,
            g,
            order::classify(&t, config.sign_tolerance),
            Method::CumulativeConstruction,
            Some(SplitWeights::uniform(sc.n_states() - 1)),
            None,
            0,
            None,
        );
    }
    if let Some(phi) = feasibility_search(sc) {
        let t = construct_cumulative(sc, &phi)?;
        if let Ok(g) = t.reconstruct(sc.joint()) {
            return assemble(
                sc,
                config,
                g,
                order::classify(&t, config.sign_tolerance),
                Method::CumulativeConstruction,
                Some(phi),
                None,
                0,
                None,
            );
        }
    }
    solve_fallback(sc, config, Start::Truth)
}

/// Runs only the conditional-gradient fallback from `start`.
pub fn solve_fallback(sc: &Scenario, config: &SolverConfig, start: Start) -> Result<DesignSolution> {
    let outcome = frank_wolfe::maximize(sc, start, config)?;
    let classification =
        order::concordance_compare_with_tolerance(sc.joint(), &outcome.g, config.sign_tolerance)?;
    assemble(
        sc,
        config,
        outcome.g,
        classification,
        Method::FallbackQP,
        None,
        Some(outcome.gap),
        outcome.iterations,
        None,
    )
}

fn solve_binary_lifted(sc: &Scenario, config: &SolverConfig) -> Result<DesignSolution> {
    let sol = binary::solve_binary(sc)?;
    let g = JointDistribution::new(binary::perturbed(sc.joint(), sol.tau_star))?;
    let evidence = TransformationMatrix::new(nalgebra::DMatrix::from_element(1, 1, sol.tau_star));
    let classification = ConfidenceClass {
        tag: sol.classification,
        evidence,
        violating_cell: None,
    };
    assemble(
        sc,
        config,
        g,
        classification,
        Method::ClosedFormBinary,
        None,
        None,
        0,
        Some(sol),
    )
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    sc: &Scenario,
    config: &SolverConfig,
    g_star: JointDistribution,
    classification: ConfidenceClass,
    method: Method,
    phi: Option<SplitWeights>,
    duality_gap: Option<f64>,
    iterations: usize,
    binary: Option<BinarySolution>,
) -> Result<DesignSolution> {
    let delta_star = response_deviation(sc, &g_star)?;
    let terms = payoff_terms(sc, &g_star)?;
    let payoff = crate::model::principal_payoff(sc, &g_star)?;
    let residual = foc_residual(sc, &delta_star);
    Ok(DesignSolution {
        g_star,
        delta_star,
        classification,
        payoff,
        payoff_terms: terms,
        method,
        foc_residual: residual,
        interior: residual <= config.foc_tolerance,
        phi,
        duality_gap,
        iterations,
        binary,
    })
}
