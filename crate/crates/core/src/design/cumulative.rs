use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{conflict_moments, Scenario};
use crate::order::TransformationMatrix;

/// Optimal slack below this is treated as infeasible.
pub const SLACK_FLOOR: f64 = -1e-12;

/// Weights `φ` in the simplex spreading each column-sum target of `t` over
/// adjacent state pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitWeights {
    phi: Vec<f64>,
}

impl SplitWeights {
    pub fn new(phi: Vec<f64>) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidInput("phi must have at least one entry".into()));
        }
        if phi.iter().any(|&p| !(p >= -1e-12)) {
            return Err(Error::InvalidInput("phi entries must be nonnegative".into()));
        }
        let total: f64 = phi.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("phi sums to {total}, not 1")));
        }
        Ok(Self {
            phi: phi.into_iter().map(|p| p.max(0.0) / total).collect(),
        })
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            phi: vec![1.0 / len as f64; len],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.phi
    }
}

/// Cumulative weighted conflict deviations
/// `A_l = Σ_{j≤l} f_S(j)(E_f[c|s_j] - E_f[c])` for `l < m - 1`.
pub fn cumulative_deviation_targets(sc: &Scenario) -> Vec<f64> {
    let moments = conflict_moments(sc);
    let fs = sc.joint().col_marginal();
    let mut acc = 0.0;
    (0..sc.n_signals() - 1)
        .map(|j| {
            acc += fs[j] * (moments.conditional_conflict[j] - moments.mean_conflict);
            acc
        })
        .collect()
}

/// `t(k, l) = A_l φ_k / (y_{k+1} - y_k)`.
pub fn construct_cumulative(sc: &Scenario, phi: &SplitWeights) -> Result<TransformationMatrix> {
    let n = sc.n_states();
    if phi.as_slice().len() != n - 1 {
        return Err(Error::ShapeMismatch(format!(
            "phi has {} entries, expected {}",
            phi.as_slice().len(),
            n - 1
        )));
    }
    let targets = cumulative_deviation_targets(sc);
    let y = sc.y();
    let t = DMatrix::from_fn(n - 1, sc.n_signals() - 1, |k, l| {
        targets[l] * phi.as_slice()[k] / (y[k + 1] - y[k])
    });
    Ok(TransformationMatrix::new(t))
}

/// Searches the simplex for split weights `φ` whose construction keeps every probability in `[0, 1]`.
///
/// Solves `max s` subject to `f(i,j) + e_ij(φ) ≥ s` and `1 - f(i,j) - e_ij(φ) ≥ s`,
/// where `e_ij` is the (linear in `φ`) mass moved into cell `(i, j)`.
pub fn feasibility_search(sc: &Scenario) -> Option<SplitWeights> {
    let n = sc.n_states();
    let m = sc.n_signals();
    let targets = cumulative_deviation_targets(sc);
    if targets.iter().all(|a| a.abs() <= 1e-15) {
        return Some(SplitWeights::uniform(n - 1));
    }
    let y = sc.y();
    let f = sc.joint();
    let target = |l: isize| -> f64 {
        if l < 0 || l as usize >= m - 1 {
            0.0
        } else {
            targets[l as usize]
        }
    };

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let phi: Vec<_> = (0..n - 1).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let slack = lp.add_var(1.0, (-1.0, 1.0));
    let simplex: Vec<_> = phi.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(&simplex, ComparisonOp::Eq, 1.0);

    for i in 0..n {
        for j in 0..m {
            let jj = j as isize;
            // e_ij = t(i-1,j-1) - t(i-1,j) - t(i,j-1) + t(i,j)
            let column_step = target(jj) - target(jj - 1);
            let mut coefficients = Vec::with_capacity(2);
            if i >= 1 {
                coefficients.push((phi[i - 1], -column_step / (y[i] - y[i - 1])));
            }
            if i < n - 1 {
                coefficients.push((phi[i], column_step / (y[i + 1] - y[i])));
            }
            let p = f.get(i, j);
            let mut lower = coefficients.clone();
            lower.push((slack, -1.0));
            lp.add_constraint(&lower, ComparisonOp::Ge, -p);
            let mut upper: Vec<_> = coefficients.iter().map(|&(v, c)| (v, -c)).collect();
            upper.push((slack, -1.0));
            lp.add_constraint(&upper, ComparisonOp::Ge, p - 1.0);
        }
    }

    let solution = lp.solve().ok()?;
    if solution[slack] < SLACK_FLOOR {
        return None;
    }
    SplitWeights::new(phi.iter().map(|&v| solution[v]).collect()).ok()
}
