//! Problem instances and the probabilistic primitives every solver builds on.
//!
//! A [`Scenario`] pairs an ordered state grid with a strictly positive joint
//! distribution over states (rows) and signals (columns), plus the agent's
//! bias function `y`. The principal's preferred action in state `θ` is `θ`
//! itself; the agent's is `y(θ)`, and `c(θ) = y(θ) - θ` is the conflict of
//! interest.

mod file;

pub use file::{
    validate_document, validate_scenario, BiasSpec, ScenarioFile, ValidatedScenario,
    ValidationOptions, RENORMALIZE_LIMIT,
};
pub(crate) use file::{number, number_array, parse_bias};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries at or below this value are treated as zero probability.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;
/// Tolerance on total mass and on cached marginals.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A joint pmf over `n` states (rows) and `m` signals (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: DMatrix<f64>,
    row_marginal: Vec<f64>,
    col_marginal: Vec<f64>,
}

impl JointDistribution {
    /// Builds a distribution, checking entries lie in `[0, 1]` and sum to one.
    ///
    /// Negative entries above `-1e-12` are float noise from arithmetic on
    /// feasible matrices and are clamped to zero.
    pub fn new(mut probs: DMatrix<f64>) -> Result<Self> {
        if probs.nrows() == 0 || probs.ncols() == 0 {
            return Err(Error::ShapeMismatch("empty joint distribution".into()));
        }
        for i in 0..probs.nrows() {
            for j in 0..probs.ncols() {
                let p = probs[(i, j)];
                if !p.is_finite() || p < -MASS_TOLERANCE || p > 1.0 + MASS_TOLERANCE {
                    return Err(Error::InvalidInput(format!(
                        "probability at ({i}, {j}) is {p}, outside [0, 1]"
                    )));
                }
                probs[(i, j)] = p.clamp(0.0, 1.0);
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::MarginalMismatch {
                what: "total probability mass".into(),
                expected: 1.0,
                found: total,
            });
        }
        let row_marginal = probs.row_iter().map(|r| r.sum()).collect();
        let col_marginal = probs.column_iter().map(|c| c.sum()).collect();
        Ok(Self {
            probs,
            row_marginal,
            col_marginal,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::ShapeMismatch("ragged joint distribution rows".into()));
        }
        Self::new(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }

    /// The independent coupling `f_Θ ⊗ f_S` of two marginals.
    pub fn independent(row_marginal: &[f64], col_marginal: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_fn(
            row_marginal.len(),
            col_marginal.len(),
            |i, j| row_marginal[i] * col_marginal[j],
        ))
    }

    pub fn nrows(&self) -> usize {
        self.probs.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.probs.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[(i, j)]
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col_marginal
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.probs
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// `Σ_i values(i) d(i, j) / d_S(j)`.
    pub fn conditional_mean(&self, values: &[f64], j: usize) -> Result<f64> {
        if values.len() != self.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} states",
                values.len(),
                self.nrows()
            )));
        }
        if j >= self.ncols() {
            return Err(Error::ShapeMismatch(format!("signal index {j} out of range")));
        }
        let mass = self.col_marginal[j];
        if mass <= 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        let weighted: f64 = values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.probs[(i, j)])
            .sum();
        Ok(weighted / mass)
    }

    /// Conditional means for every signal.
    pub fn conditional_means(&self, values: &[f64]) -> Result<Vec<f64>> {
        (0..self.ncols())
            .map(|j| self.conditional_mean(values, j))
            .collect()
    }

    /// Expectation of a state function under the row marginal.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        dot(&self.row_marginal, values)
    }

    /// Covariance of two state functions under the row marginal.
    pub fn covariance(&self, a: &[f64], b: &[f64]) -> f64 {
        weighted_covariance(&self.row_marginal, a, b)
    }

    /// Fails unless both marginals agree with `other`'s within `tol`.
    pub fn check_common_marginals(&self, other: &Self, tol: f64) -> Result<()> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        let pairs = self
            .row_marginal
            .iter()
            .zip(&other.row_marginal)
            .map(|p| ("state marginal", p))
            .chain(
                self.col_marginal
                    .iter()
                    .zip(&other.col_marginal)
                    .map(|p| ("signal marginal", p)),
            );
        for (what, (a, b)) in pairs {
            if (a - b).abs() > tol {
                return Err(Error::MarginalMismatch {
                    what: what.into(),
                    expected: *a,
                    found: *b,
                });
            }
        }
        Ok(())
    }
}

/// How the bias function was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasRepr {
    Table,
    Affine { intercept: f64, slope: f64 },
}

/// The agent's preferred action `y(θ_i)` at every state.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasFunction {
    values: Vec<f64>,
    repr: BiasRepr,
}

impl BiasFunction {
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = first_non_increasing(&values) {
            return Err(Error::NonMonotoneBias { index });
        }
        Ok(Self {
            values,
            repr: BiasRepr::Table,
        })
    }

    /// `y(θ) = intercept + slope·θ`, expanded over `states`.
    pub fn affine(intercept: f64, slope: f64, states: &[f64]) -> Result<Self> {
        if !(slope > 0.0) {
            return Err(Error::NonMonotoneBias { index: 0 });
        }
        let values = states.iter().map(|t| intercept + slope * t).collect();
        let mut bias = Self::table(values)?;
        bias.repr = BiasRepr::Affine { intercept, slope };
        Ok(bias)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn repr(&self) -> BiasRepr {
        self.repr
    }
}

/// A validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    states: Vec<f64>,
    joint: JointDistribution,
    bias: BiasFunction,
}

impl Scenario {
    /// Checks every structural assumption: shape, full support, monotone
    /// states and bias, and signals ordered by strictly increasing posterior mean.
    pub fn new(states: Vec<f64>, joint: JointDistribution, bias: BiasFunction) -> Result<Self> {
        let n = states.len();
        let m = joint.ncols();
        if n < 2 || m < 2 {
            return Err(Error::ShapeMismatch(format!(
                "need at least 2 states and 2 signals, got {n}x{m}"
            )));
        }
        if joint.nrows() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} states but joint has {} rows",
                n,
                joint.nrows()
            )));
        }
        if bias.values().len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} states but bias has {} values",
                n,
                bias.values().len()
            )));
        }
        if let Some(index) = first_non_increasing(&states) {
            return Err(Error::NonMonotoneStates { index });
        }
        for i in 0..n {
            for j in 0..m {
                let value = joint.get(i, j);
                if value <= SUPPORT_TOLERANCE {
                    return Err(Error::ZeroEntry { row: i, col: j, value });
                }
            }
        }
        let means = joint.conditional_means(&states)?;
        if let Some((first, second)) = first_unordered_pair(&means) {
            return Err(Error::UnorderedSignals { first, second });
        }
        Ok(Self {
            states,
            joint,
            bias,
        })
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn bias(&self) -> &BiasFunction {
        &self.bias
    }

    /// `y(θ_i)`.
    pub fn y(&self) -> &[f64] {
        self.bias.values()
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_signals(&self) -> usize {
        self.joint.ncols()
    }

    pub fn is_binary(&self) -> bool {
        self.n_states() == 2 && self.n_signals() == 2
    }

    pub(crate) fn require_binary(&self) -> Result<()> {
        if self.is_binary() {
            Ok(())
        } else {
            Err(Error::NotBinary {
                rows: self.n_states(),
                cols: self.n_signals(),
            })
        }
    }

    /// `c(θ_i) = y(θ_i) - θ_i`.
    pub fn conflict(&self) -> Vec<f64> {
        self.y().iter().zip(&self.states).map(|(y, t)| y - t).collect()
    }

    /// `E_f[θ | s_j]` for every signal.
    pub fn posterior_means(&self) -> Vec<f64> {
        self.joint
            .conditional_means(&self.states)
            .expect("validated scenario has positive signal marginals")
    }

    /// `E_f[y(θ) | s_j]` for every signal.
    pub fn preferred_action_means(&self) -> Vec<f64> {
        self.joint
            .conditional_means(self.y())
            .expect("validated scenario has positive signal marginals")
    }

    /// `Var_f(θ)`, the principal's loss when acting on the prior alone.
    pub fn state_variance(&self) -> f64 {
        self.joint.covariance(&self.states, &self.states)
    }
}

/// First and second moments of the conflict of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictMoments {
    /// `E_f[c]`
    pub mean_conflict: f64,
    /// `E_f[c | s_j]`
    pub conditional_conflict: Vec<f64>,
    /// `Cov_f(c, y)`
    pub cov_c_y: f64,
    /// `Var_f(y)`
    pub var_y: f64,
}

pub fn conflict_moments(sc: &Scenario) -> ConflictMoments {
    let c = sc.conflict();
    let f = sc.joint();
    ConflictMoments {
        mean_conflict: f.expectation(&c),
        conditional_conflict: f
            .conditional_means(&c)
            .expect("validated scenario has positive signal marginals"),
        cov_c_y: f.covariance(&c, sc.y()),
        var_y: f.covariance(sc.y(), sc.y()),
    }
}

/// Actions `E_g[y | s_j]` taken by an agent holding beliefs `g`.
pub fn agent_actions(sc: &Scenario, g: &JointDistribution) -> Result<Vec<f64>> {
    check_shape(sc, g)?;
    g.conditional_means(sc.y())
}

/// `U(g) = -E_f[(E_g[y|s] - θ)^2]`.
pub fn principal_payoff(sc: &Scenario, g: &JointDistribution) -> Result<f64> {
    let actions = agent_actions(sc, g)?;
    Ok(payoff_of_actions(sc, &actions))
}

/// Principal's payoff when the action after signal `j` is `actions[j]`.
pub fn payoff_of_actions(sc: &Scenario, actions: &[f64]) -> f64 {
    let f = sc.joint();
    let mut loss = 0.0;
    for (i, theta) in sc.states().iter().enumerate() {
        for (j, a) in actions.iter().enumerate() {
            loss += f.get(i, j) * (a - theta).powi(2);
        }
    }
    -loss
}

/// The three losses whose negated sum is `U(g)` for any `g` sharing `f`'s marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffTerms {
    /// `E_f[(E_f[θ|s] - θ)^2]`
    pub residual_uncertainty: f64,
    /// `E_f[c]^2`
    pub mean_bias_sq: f64,
    /// `Var_f(E_g[y|s] - E_f[θ|s])`
    pub excess_variance: f64,
}

impl PayoffTerms {
    pub fn payoff(&self) -> f64 {
        -(self.residual_uncertainty + self.mean_bias_sq + self.excess_variance)
    }
}

pub fn payoff_terms(sc: &Scenario, g: &JointDistribution) -> Result<PayoffTerms> {
    let actions = agent_actions(sc, g)?;
    let f = sc.joint();
    let post = sc.posterior_means();
    let residual_uncertainty = -payoff_of_actions(sc, &post);
    let mean_conflict = f.expectation(&sc.conflict());
    let gap: Vec<f64> = actions.iter().zip(&post).map(|(a, p)| a - p).collect();
    let excess_variance = weighted_covariance(f.col_marginal(), &gap, &gap);
    Ok(PayoffTerms {
        residual_uncertainty,
        mean_bias_sq: mean_conflict * mean_conflict,
        excess_variance,
    })
}

fn check_shape(sc: &Scenario, g: &JointDistribution) -> Result<()> {
    if g.nrows() != sc.n_states() || g.ncols() != sc.n_signals() {
        return Err(Error::ShapeMismatch(format!(
            "beliefs are {}x{}, scenario is {}x{}",
            g.nrows(),
            g.ncols(),
            sc.n_states(),
            sc.n_signals()
        )));
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn weighted_covariance(weights: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ma = dot(weights, a);
    let mb = dot(weights, b);
    weights
        .iter()
        .zip(a.iter().zip(b))
        .map(|(w, (x, y))| w * (x - ma) * (y - mb))
        .sum()
}

fn first_non_increasing(values: &[f64]) -> Option<usize> {
    values
        .windows(2)
        .position(|w| !(w[1] > w[0]))
        .map(|k| k + 1)
}

/// Posterior means closer than this (relative) count as ties.
const TIE_TOLERANCE: f64 = 1e-12;

fn first_unordered_pair(means: &[f64]) -> Option<(usize, usize)> {
    means.windows(2).position(|w| {
        let scale = w[0].abs().max(w[1].abs()).max(1.0);
        w[1] - w[0] <= TIE_TOLERANCE * scale
    })
    .map(|k| (k, k + 1))
}
