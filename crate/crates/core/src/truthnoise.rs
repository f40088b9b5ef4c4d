//! One-parameter confidence under a truth-or-noise signal.
//!
//! With probability `ρ` the signal equals the state; otherwise it is an
//! independent draw from the state distribution. The agent acts as if the
//! signal were truthful with probability `ρ + κ`, so `κ ∈ [-ρ, 1-ρ]` is its
//! confidence. The state distribution is a weighted grid; every quantity here
//! is a moment of it, so the grid is exact for grid-supported priors.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{dot, number, number_array, parse_bias, weighted_covariance, BiasFunction, BiasSpec};
use crate::montecarlo::{draw_index, index_sampler, sharded_mean, MonteCarloConfig, MonteCarloEstimate};
use crate::order::ConfidenceTag;

/// `|β|` at or below this counts as uncorrelated `y` and `c`.
pub const BETA_TOLERANCE: f64 = 1e-10;
/// Slack on the `κ` range before [`Error::KappaOutOfRange`] is raised.
pub const KAPPA_SLACK: f64 = 1e-12;
/// Incentive slack below this counts as a violation.
pub const IC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TruthNoiseScenario {
    states: Vec<f64>,
    weights: Vec<f64>,
    rho: f64,
    bias: BiasFunction,
}

/// `n` evenly spaced points on `[lower, upper]` with equal weights.
pub fn uniform_grid(lower: f64, upper: f64, points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points < 2 || !(upper > lower) {
        return Err(Error::parse(
            "uniform",
            format!("need points >= 2 and lower < upper, got {points} points on [{lower}, {upper}]"),
        ));
    }
    let step = (upper - lower) / (points - 1) as f64;
    let states = (0..points).map(|k| lower + step * k as f64).collect();
    Ok((states, vec![1.0 / points as f64; points]))
}

impl TruthNoiseScenario {
    pub fn new(states: Vec<f64>, weights: Vec<f64>, rho: f64, bias: BiasFunction) -> Result<Self> {
        let n = states.len();
        if n < 2 {
            return Err(Error::parse("states", "need at least two grid points"));
        }
        if weights.len() != n {
            return Err(Error::parse(
                "weights",
                format!("expected {n} weights, found {}", weights.len()),
            ));
        }
        if bias.values().len() != n {
            return Err(Error::parse(
                "bias",
                format!("expected {n} values, found {}", bias.values().len()),
            ));
        }
        if let Some(k) = states.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneStates { index: k + 1 });
        }
        if let Some(k) = weights.iter().position(|&w| !(w > 0.0)) {
            return Err(Error::parse(format!("weights[{k}]"), "weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::MarginalMismatch {
                what: "total state weight".into(),
                expected: 1.0,
                found: total,
            });
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::parse("rho", format!("precision must lie in (0, 1), got {rho}")));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        let sc = Self {
            states,
            weights,
            rho,
            bias,
        };
        if !(sc.moments().var_y > 0.0) {
            return Err(Error::DegenerateBias);
        }
        Ok(sc)
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn bias(&self) -> &BiasFunction {
        &self.bias
    }

    pub fn y(&self) -> &[f64] {
        self.bias.values()
    }

    /// `[-ρ, 1-ρ]`
    pub fn kappa_range(&self) -> (f64, f64) {
        (-self.rho, 1.0 - self.rho)
    }

    pub fn moments(&self) -> TruthNoiseMoments {
        let w = &self.weights;
        let y = self.y();
        let theta = &self.states;
        let c: Vec<f64> = y.iter().zip(theta).map(|(a, b)| a - b).collect();
        TruthNoiseMoments {
            mean_y: dot(w, y),
            mean_conflict: dot(w, &c),
            var_y: weighted_covariance(w, y, y),
            var_theta: weighted_covariance(w, theta, theta),
            cov_y_theta: weighted_covariance(w, y, theta),
            cov_y_c: weighted_covariance(w, y, &c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

/// On-disk form of a [`TruthNoiseScenario`].
///
/// ```json
/// {
///   "uniform": { "lower": 0, "upper": 10, "points": 2 },
///   "rho": 0.5,
///   "bias": { "affine": { "intercept": 3, "slope": 0.3333333333333333 } }
/// }
/// ```
///
/// Instead of `uniform`, give `states` with optional `weights` (equal if absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthNoiseFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<UniformGrid>,
    pub rho: f64,
    pub bias: BiasSpec,
}

impl TruthNoiseFile {
    pub fn parse(raw: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(raw).map_err(|e| Error::parse("<document>", e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::parse("<document>", "expected a JSON object"))?;
        let name = match obj.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::parse("name", "expected a string")),
        };
        let uniform = match obj.get("uniform") {
            None => None,
            Some(u) => {
                let u = u
                    .as_object()
                    .ok_or_else(|| Error::parse("uniform", "expected an object"))?;
                let field = |key: &str| {
                    let full = format!("uniform.{key}");
                    u.get(key)
                        .ok_or_else(|| Error::parse(full.clone(), "missing key"))
                        .and_then(|v| number(v, &full))
                };
                let points = field("points")?;
                if points.fract() != 0.0 || points < 2.0 {
                    return Err(Error::parse("uniform.points", "expected an integer >= 2"));
                }
                Some(UniformGrid {
                    lower: field("lower")?,
                    upper: field("upper")?,
                    points: points as usize,
                })
            }
        };
        let states = obj
            .get("states")
            .map(|v| number_array(Some(v), "states"))
            .transpose()?;
        let weights = obj
            .get("weights")
            .map(|v| number_array(Some(v), "weights"))
            .transpose()?;
        match (&states, &uniform) {
            (Some(_), Some(_)) => return Err(Error::parse("uniform", "give either `states` or `uniform`, not both")),
            (None, None) => return Err(Error::parse("states", "missing key (or give `uniform`)")),
            _ => {}
        }
        if uniform.is_some() && weights.is_some() {
            return Err(Error::parse("weights", "weights are implied by `uniform`"));
        }
        let rho = number(
            obj.get("rho").ok_or_else(|| Error::parse("rho", "missing key"))?,
            "rho",
        )?;
        let bias = parse_bias(obj.get("bias"))?;
        Ok(Self {
            name,
            states,
            weights,
            uniform,
            rho,
            bias,
        })
    }

    pub fn to_scenario(&self) -> Result<TruthNoiseScenario> {
        let (states, weights) = match (&self.states, &self.uniform) {
            (_, Some(u)) => uniform_grid(u.lower, u.upper, u.points)?,
            (Some(states), None) => {
                let n = states.len();
                let weights = self
                    .weights
                    .clone()
                    .unwrap_or_else(|| vec![1.0 / n.max(1) as f64; n]);
                (states.clone(), weights)
            }
            (None, None) => return Err(Error::parse("states", "missing key (or give `uniform`)")),
        };
        let bias = match &self.bias {
            BiasSpec::Table(values) => {
                if values.len() != states.len() {
                    return Err(Error::parse(
                        "bias.table",
                        format!("expected {} values, found {}", states.len(), values.len()),
                    ));
                }
                BiasFunction::table(values.clone())?
            }
            BiasSpec::Affine { intercept, slope } => BiasFunction::affine(*intercept, *slope, &states)?,
        };
        TruthNoiseScenario::new(states, weights, self.rho, bias)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthNoiseMoments {
    pub mean_y: f64,
    pub mean_conflict: f64,
    pub var_y: f64,
    pub var_theta: f64,
    pub cov_y_theta: f64,
    pub cov_y_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    InteriorFOC,
    /// `κ* = -ρ`: the agent ignores the signal.
    ClampedLow,
    /// `κ* = 1-ρ`: the agent treats the signal as the state.
    ClampedHigh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthNoiseSolution {
    /// `Cov(y, c) / Var(y)`
    pub beta: f64,
    pub kappa_star: f64,
    pub payoff: f64,
    pub regime: Regime,
    pub classification: ConfidenceTag,
}

/// Principal's payoff when the agent puts weight `a = ρ + κ` on the signal:
/// `-E[c]² - a² Var(y) - Var(θ) + 2aρ Cov(y, θ)`.
pub fn payoff_at_weight(m: &TruthNoiseMoments, rho: f64, a: f64) -> f64 {
    -m.mean_conflict * m.mean_conflict - a * a * m.var_y - m.var_theta + 2.0 * a * rho * m.cov_y_theta
}

pub fn truth_noise_payoff(tn: &TruthNoiseScenario, kappa: f64) -> Result<f64> {
    let (lower, upper) = tn.kappa_range();
    if !(kappa >= lower - KAPPA_SLACK && kappa <= upper + KAPPA_SLACK) {
        return Err(Error::KappaOutOfRange { kappa, lower, upper });
    }
    Ok(payoff_at_weight(&tn.moments(), tn.rho, tn.rho + kappa))
}

/// `κ*(β)`: `-ρβ` clamped to `[-ρ, 1-ρ]`.
pub fn optimal_kappa(beta: f64, rho: f64) -> (f64, Regime) {
    if beta >= 1.0 {
        (-rho, Regime::ClampedLow)
    } else if beta > -(1.0 - rho) / rho {
        let kappa = if beta.abs() <= BETA_TOLERANCE { 0.0 } else { -rho * beta };
        (kappa, Regime::InteriorFOC)
    } else {
        (1.0 - rho, Regime::ClampedHigh)
    }
}

pub fn solve_truth_noise(tn: &TruthNoiseScenario) -> Result<TruthNoiseSolution> {
    let m = tn.moments();
    if !(m.var_y > 0.0) {
        return Err(Error::DegenerateBias);
    }
    let beta = m.cov_y_c / m.var_y;
    let (kappa_star, regime) = optimal_kappa(beta, tn.rho);
    let classification = if beta.abs() <= BETA_TOLERANCE {
        ConfidenceTag::WellCalibrated
    } else if beta > 0.0 {
        ConfidenceTag::Underconfident
    } else {
        ConfidenceTag::Overconfident
    };
    Ok(TruthNoiseSolution {
        beta,
        kappa_star,
        payoff: payoff_at_weight(&m, tn.rho, tn.rho + kappa_star),
        regime,
        classification,
    })
}

/// The agent's preferred action `μ(s) = a y(s) + (1-a) E[y]` at every grid signal.
pub fn agent_actions(tn: &TruthNoiseScenario, kappa: f64) -> Vec<f64> {
    let a = tn.rho + kappa;
    let mean_y = tn.moments().mean_y;
    tn.y().iter().map(|y| a * y + (1.0 - a) * mean_y).collect()
}

/// `Var_κ(y | s)` under the agent's beliefs: `a(1-a)(y(s) - E[y])² + (1-a) Var(y)`.
pub fn agent_conditional_variance(tn: &TruthNoiseScenario, kappa: f64) -> Vec<f64> {
    let a = tn.rho + kappa;
    let m = tn.moments();
    tn.y()
        .iter()
        .map(|y| a * (1.0 - a) * (y - m.mean_y).powi(2) + (1.0 - a) * m.var_y)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthNoiseTransfers {
    /// `E[c]² <= Var(y)`
    pub applies: bool,
    /// Constant gap `x(s) - μ(s)` between recommendation and the agent's preference.
    pub wedge: f64,
    /// Flat on-path wage `wedge²`.
    pub wage: f64,
    pub kappa: f64,
    /// Smallest incentive slack over all (signal, deviation) pairs on the grid.
    pub min_ic_slack: f64,
    pub ic_holds: bool,
}

/// Flat-wage contract at the optimal confidence, with wedge `-E[c]/2`.
pub fn truth_noise_transfers(tn: &TruthNoiseScenario) -> Result<TruthNoiseTransfers> {
    let m = tn.moments();
    let kappa = solve_truth_noise(tn)?.kappa_star;
    let wedge = -m.mean_conflict / 2.0;
    let mu = agent_actions(tn, kappa);
    let min_ic_slack = flat_wage_min_slack(&mu, wedge);
    Ok(TruthNoiseTransfers {
        applies: m.mean_conflict * m.mean_conflict <= m.var_y,
        wedge,
        wage: wedge * wedge,
        kappa,
        min_ic_slack,
        ic_holds: min_ic_slack >= -IC_TOLERANCE,
    })
}

/// Smallest slack when `x(s) = μ(s) + d` is recommended at every signal and
/// each recommendation pays `d²` (other actions pay nothing).
///
/// Off-path deviations to `μ(s)` bind exactly; the slack of signal `s`
/// imitating `s'` is `(μ(s') + d - μ(s))² - d²`.
pub fn flat_wage_min_slack(mu: &[f64], wedge: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for &own in mu {
        for &other in mu {
            worst = worst.min((other + wedge - own).powi(2) - wedge * wedge);
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthNoiseDelegation {
    /// `κ* >= threshold_rhs`
    pub delegate: bool,
    /// `|E[c]| / sd(y) - ρ`
    pub threshold_rhs: f64,
    pub kappa_star: f64,
    /// `U(κ*)`
    pub delegation_payoff: f64,
    /// `-Var(θ)`
    pub centralization_payoff: f64,
    /// `delegation_payoff >= centralization_payoff`
    pub delegate_direct: bool,
    pub agrees: bool,
}

pub fn truth_noise_delegation(tn: &TruthNoiseScenario) -> Result<TruthNoiseDelegation> {
    let m = tn.moments();
    let sol = solve_truth_noise(tn)?;
    let threshold_rhs = m.mean_conflict.abs() / m.var_y.sqrt() - tn.rho;
    let delegate = sol.kappa_star >= threshold_rhs;
    let centralization_payoff = -m.var_theta;
    let delegate_direct = sol.payoff >= centralization_payoff;
    Ok(TruthNoiseDelegation {
        delegate,
        threshold_rhs,
        kappa_star: sol.kappa_star,
        delegation_payoff: sol.payoff,
        centralization_payoff,
        delegate_direct,
        agrees: delegate == delegate_direct,
    })
}

/// Monte Carlo estimate of the principal's payoff from an agent with confidence `kappa`.
pub fn simulate_truth_noise_payoff(
    tn: &TruthNoiseScenario,
    kappa: f64,
    config: &MonteCarloConfig,
) -> Result<MonteCarloEstimate> {
    truth_noise_payoff(tn, kappa)?;
    let sampler = index_sampler(&tn.weights)?;
    let actions = agent_actions(tn, kappa);
    let rho = tn.rho;
    let states = &tn.states;
    sharded_mean(config, |rng| {
        let state = draw_index(&sampler, rng);
        let signal = if rng.gen::<f64>() < rho {
            state
        } else {
            draw_index(&sampler, rng)
        };
        -(actions[signal] - states[state]).powi(2)
    })
}

/// Monte Carlo estimate of `Var_κ(y | s)` at grid signal `signal`, sampling
/// the state from the agent's (not the true) posterior.
pub fn simulate_agent_conditional_variance(
    tn: &TruthNoiseScenario,
    kappa: f64,
    signal: usize,
    config: &MonteCarloConfig,
) -> Result<MonteCarloEstimate> {
    truth_noise_payoff(tn, kappa)?;
    if signal >= tn.states.len() {
        return Err(Error::InvalidInput(format!("signal index {signal} out of range")));
    }
    let sampler = index_sampler(&tn.weights)?;
    let a = tn.rho + kappa;
    let mu = agent_actions(tn, kappa)[signal];
    let y = tn.y();
    sharded_mean(config, |rng| {
        let state = if rng.gen::<f64>() < a {
            signal
        } else {
            draw_index(&sampler, rng)
        };
        (y[state] - mu).powi(2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_point(rho: f64, intercept: f64, slope: f64) -> TruthNoiseScenario {
        let states = vec![0.0, 10.0];
        let bias = BiasFunction::affine(intercept, slope, &states).unwrap();
        TruthNoiseScenario::new(states, vec![0.5, 0.5], rho, bias).unwrap()
    }

    #[test]
    fn file_forms() {
        let raw = r#"{"uniform": {"lower": 0, "upper": 10, "points": 2}, "rho": 0.5,
                      "bias": {"affine": {"intercept": 3, "slope": 0.3333333333333333}}}"#;
        let tn = TruthNoiseFile::parse(raw).unwrap().to_scenario().unwrap();
        assert_eq!(tn.states(), &[0.0, 10.0]);
        assert_eq!(tn.weights(), &[0.5, 0.5]);

        let raw = r#"{"states": [0, 1, 2], "weights": [0.2, 0.3, 0.5], "rho": 0.4,
                      "bias": {"table": [0, 2, 4]}}"#;
        let file = TruthNoiseFile::parse(raw).unwrap();
        let back: TruthNoiseFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(back, file);

        let cases = [
            (r#"{"states": [0, 1], "rho": 0.5}"#, "bias"),
            (r#"{"states": [0, 1], "rho": "x", "bias": {"table": [0, 1]}}"#, "rho"),
            (r#"{"uniform": {"lower": 0, "upper": 1}, "rho": 0.5, "bias": {"table": [0, 1]}}"#, "uniform.points"),
            (r#"{"rho": 0.5, "bias": {"table": [0, 1]}}"#, "states"),
        ];
        for (raw, key) in cases {
            match TruthNoiseFile::parse(raw) {
                Err(Error::Parse { key: k, .. }) => assert_eq!(k, key),
                other => panic!("{raw}: {other:?}"),
            }
        }
        let raw = r#"{"states": [0, 1], "rho": 1.5, "bias": {"table": [0, 1]}}"#;
        assert!(matches!(
            TruthNoiseFile::parse(raw).unwrap().to_scenario(),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn additive_bias_is_well_calibrated() {
        let sol = solve_truth_noise(&two_point(0.4, 2.0, 1.0)).unwrap();
        assert_eq!(sol.beta, 0.0);
        assert_eq!(sol.kappa_star, 0.0);
        assert_eq!(sol.classification, ConfidenceTag::WellCalibrated);
    }

    #[test]
    fn doubled_bias_is_underconfident() {
        let (states, weights) = uniform_grid(-1.0, 3.0, 9).unwrap();
        let bias = BiasFunction::affine(0.0, 2.0, &states).unwrap();
        let tn = TruthNoiseScenario::new(states, weights, 0.5, bias).unwrap();
        let sol = solve_truth_noise(&tn).unwrap();
        assert_abs_diff_eq!(sol.beta, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.kappa_star, -0.25, epsilon = 1e-12);
        assert_eq!(sol.regime, Regime::InteriorFOC);
        assert_eq!(sol.classification, ConfidenceTag::Underconfident);
    }

    #[test]
    fn compressed_bias_clamps_high() {
        let sol = solve_truth_noise(&two_point(0.9, 3.0, 1.0 / 3.0)).unwrap();
        assert_abs_diff_eq!(sol.beta, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.kappa_star, 0.1, epsilon = 1e-12);
        assert_eq!(sol.regime, Regime::ClampedHigh);
        assert_eq!(sol.classification, ConfidenceTag::Overconfident);
    }

    #[test]
    fn payoff_examples() {
        let tn = two_point(0.5, 3.0, 1.0 / 3.0);
        // a = 1/2: -1/9 - 25/36 - 25 + 25/6
        let expected = -1.0 / 9.0 - 25.0 / 36.0 - 25.0 + 25.0 / 6.0;
        assert_abs_diff_eq!(truth_noise_payoff(&tn, 0.0).unwrap(), expected, epsilon = 1e-12);

        let unbiased = two_point(0.3, 0.0, 1.0);
        let var = 25.0;
        assert_abs_diff_eq!(
            truth_noise_payoff(&unbiased, 0.7).unwrap(),
            -2.0 * 0.7 * var,
            epsilon = 1e-12
        );

        // κ = -ρ: the agent always plays E[y]
        let m = tn.moments();
        let constant = -(m.mean_conflict.powi(2) + m.var_theta);
        assert_abs_diff_eq!(truth_noise_payoff(&tn, -0.5).unwrap(), constant, epsilon = 1e-12);

        assert!(matches!(
            truth_noise_payoff(&tn, 0.6),
            Err(Error::KappaOutOfRange { .. })
        ));
    }

    #[test]
    fn delegation_examples() {
        let d = truth_noise_delegation(&two_point(0.5, 3.0, 1.0 / 3.0)).unwrap();
        assert_abs_diff_eq!(d.threshold_rhs, -0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(d.kappa_star, 0.5, epsilon = 1e-12);
        assert!(d.delegate);
        assert!(d.delegate_direct);

        let d = truth_noise_delegation(&two_point(0.05, 6.0, 1.0)).unwrap();
        assert!(d.threshold_rhs > 0.95);
        assert!(!d.delegate);

        let d = truth_noise_delegation(&two_point(0.3, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(d.threshold_rhs, -0.3, epsilon = 1e-15);
        assert!(d.delegate);
    }

    #[test]
    fn transfer_examples() {
        let t = truth_noise_transfers(&two_point(0.5, 3.0, 1.0 / 3.0)).unwrap();
        assert!(t.applies);
        assert_abs_diff_eq!(t.wage, 1.0 / 36.0, epsilon = 1e-12);
        assert!(t.ic_holds);

        let t = truth_noise_transfers(&two_point(0.3, 0.0, 1.0)).unwrap();
        assert_eq!(t.wage, 0.0);

        let (states, weights) = uniform_grid(0.0, 1.0, 2).unwrap();
        let bias = BiasFunction::affine(10.0, 1.0, &states).unwrap();
        let tn = TruthNoiseScenario::new(states, weights, 0.5, bias).unwrap();
        assert!(!truth_noise_transfers(&tn).unwrap().applies);
    }

    #[test]
    fn flat_wage_breaks_on_fine_grids() {
        // adjacent preferred actions closer than 2|d| make imitation profitable
        let (states, weights) = uniform_grid(0.0, 10.0, 101).unwrap();
        let bias = BiasFunction::affine(3.0, 1.0 / 3.0, &states).unwrap();
        let tn = TruthNoiseScenario::new(states, weights, 0.5, bias).unwrap();
        let t = truth_noise_transfers(&tn).unwrap();
        assert!(t.applies);
        assert!(!t.ic_holds, "slack {}", t.min_ic_slack);
    }

    #[test]
    fn simulated_payoff_matches_closed_form() {
        let tn = two_point(0.5, 3.0, 1.0 / 3.0);
        let cfg = MonteCarloConfig {
            draws: 200_000,
            ..MonteCarloConfig::default()
        };
        for kappa in [-0.5, 0.0, 0.3] {
            let est = simulate_truth_noise_payoff(&tn, kappa, &cfg).unwrap();
            let exact = truth_noise_payoff(&tn, kappa).unwrap();
            assert!(est.z_score(exact) < 3.0, "κ={kappa}: {est:?} vs {exact}");
        }
    }

    #[test]
    fn conditional_variance_depends_on_the_signal() {
        let states = vec![0.0, 1.0, 5.0];
        let bias = BiasFunction::affine(0.0, 2.0, &states).unwrap();
        let tn = TruthNoiseScenario::new(states, vec![0.3, 0.4, 0.3], 0.5, bias).unwrap();
        let v = agent_conditional_variance(&tn, 0.0);
        assert!((v[0] - v[1]).abs() > 1.0);
        let cfg = MonteCarloConfig {
            draws: 200_000,
            ..MonteCarloConfig::default()
        };
        for (s, exact) in v.iter().enumerate() {
            let est = simulate_agent_conditional_variance(&tn, 0.0, s, &cfg).unwrap();
            assert!(est.z_score(*exact) < 3.0, "signal {s}: {est:?} vs {exact}");
        }
        // at the extremes a ∈ {0, 1} the dependence vanishes
        assert_abs_diff_eq!(agent_conditional_variance(&tn, 0.5)[0], 0.0, epsilon = 1e-15);
        let low = agent_conditional_variance(&tn, -0.5);
        assert_abs_diff_eq!(low[0], low[2], epsilon = 1e-12);
    }
}
