//! Choosing, among beliefs that induce the same actions, one that stays above
//! the independent coupling in the concordance order.
//!
//! The payoff depends on `g` only through `E_g[y|s]`, so optima are generally
//! not unique. The one a solver returns may dip below independence even when
//! an equivalent one does not.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{JointDistribution, Scenario};

/// Slack below this (negative) value means no equivalent beliefs clear the floor.
pub const FLOOR_TOLERANCE: f64 = 1e-10;

/// Beliefs inducing the same actions as `g` whose cumulative masses are at
/// least those of the independent coupling, if any exist.
///
/// Solves `max s` over `h` with `f`'s marginals, `Σ_i h(i,j) y_i = Σ_i g(i,j) y_i`
/// for every signal, and `H(k,l) - P(k,l) ≥ s` at every interior corner, with
/// `s` capped at zero.
pub fn floor_representative(sc: &Scenario, g: &JointDistribution) -> Result<Option<JointDistribution>> {
    let f = sc.joint();
    let (n, m) = (f.nrows(), f.ncols());
    if g.nrows() != n || g.ncols() != m {
        return Err(Error::ShapeMismatch("beliefs and scenario differ in shape".into()));
    }
    let rows = f.row_marginal();
    let cols = f.col_marginal();
    let y = sc.y();

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let h: Vec<Vec<_>> = (0..n)
        .map(|_| (0..m).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect())
        .collect();
    let slack = lp.add_var(1.0, (-1.0, 0.0));
    for (i, &r) in rows.iter().enumerate() {
        let terms: Vec<_> = (0..m).map(|j| (h[i][j], 1.0)).collect();
        lp.add_constraint(&terms, ComparisonOp::Eq, r);
    }
    for (j, &c) in cols.iter().enumerate() {
        let terms: Vec<_> = (0..n).map(|i| (h[i][j], 1.0)).collect();
        lp.add_constraint(&terms, ComparisonOp::Eq, c);
        let weighted: Vec<_> = (0..n).map(|i| (h[i][j], y[i])).collect();
        let target: f64 = (0..n).map(|i| g.get(i, j) * y[i]).sum();
        lp.add_constraint(&weighted, ComparisonOp::Eq, target);
    }
    let mut row_cum = 0.0;
    for k in 0..n - 1 {
        row_cum += rows[k];
        let mut col_cum = 0.0;
        for l in 0..m - 1 {
            col_cum += cols[l];
            let mut terms: Vec<_> = (0..=k)
                .flat_map(|i| (0..=l).map(move |j| (i, j)))
                .map(|(i, j)| (h[i][j], 1.0))
                .collect();
            terms.push((slack, -1.0));
            lp.add_constraint(&terms, ComparisonOp::Ge, row_cum * col_cum);
        }
    }

    let solution = match lp.solve() {
        Ok(s) => s,
        Err(minilp::Error::Infeasible) => return Ok(None),
        Err(e) => return Err(Error::InvalidInput(format!("floor LP failed: {e}"))),
    };
    if solution[slack] < -FLOOR_TOLERANCE {
        return Ok(None);
    }
    let probs = DMatrix::from_fn(n, m, |i, j| solution[h[i][j]].max(0.0));
    let total: f64 = probs.iter().sum();
    JointDistribution::new(probs / total).map(Some)
}
