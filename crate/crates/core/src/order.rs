//! Concordance order on bivariate distributions with common marginals.
//!
//! Any `g` sharing `f`'s marginals can be written `g = f + D_nᵀ t D_m`, where
//! `D_k` is the `(k-1)×k` first-difference operator and `t` is the
//! `(n-1)×(m-1)` matrix of elementary transformations. Entry `t(k, l)` is the
//! cumulative difference `Σ_{i≤k, j≤l} (g - f)(i, j)`, so `g` dominates `f`
//! in the concordance order exactly when `t ≥ 0`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::JointDistribution;

/// Entries of `t` smaller than this in magnitude count as zero.
pub const SIGN_TOLERANCE: f64 = 1e-10;
/// Marginals must agree within this for two distributions to be compared.
pub const MARGINAL_TOLERANCE: f64 = 1e-10;

/// `t` such that `g = f + D_nᵀ t D_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationMatrix {
    t: DMatrix<f64>,
}

impl TransformationMatrix {
    pub fn new(t: DMatrix<f64>) -> Self {
        Self { t }
    }

    pub fn zeros(n_states: usize, n_signals: usize) -> Self {
        Self::new(DMatrix::zeros(n_states - 1, n_signals - 1))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.t[(k, l)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.t
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// Signed mass moved into cell `(i, j)`:
    /// `t(i-1,j-1) - t(i-1,j) - t(i,j-1) + t(i,j)`, with `t` zero outside its range.
    pub fn cell_change(&self, i: usize, j: usize) -> f64 {
        let at = |k: isize, l: isize| -> f64 {
            if k < 0 || l < 0 || k as usize >= self.t.nrows() || l as usize >= self.t.ncols() {
                0.0
            } else {
                self.t[(k as usize, l as usize)]
            }
        };
        let (i, j) = (i as isize, j as isize);
        at(i - 1, j - 1) - at(i - 1, j) - at(i, j - 1) + at(i, j)
    }

    /// `D_nᵀ t D_m`, the full `n×m` change in probabilities.
    pub fn difference(&self) -> DMatrix<f64> {
        let n = self.t.nrows() + 1;
        let m = self.t.ncols() + 1;
        DMatrix::from_fn(n, m, |i, j| self.cell_change(i, j))
    }

    /// `f + D_nᵀ t D_m` as a raw matrix (may leave the simplex).
    pub fn apply(&self, f: &JointDistribution) -> Result<DMatrix<f64>> {
        if f.nrows() != self.t.nrows() + 1 || f.ncols() != self.t.ncols() + 1 {
            return Err(Error::ShapeMismatch(format!(
                "transformation is {}x{}, distribution is {}x{}",
                self.t.nrows(),
                self.t.ncols(),
                f.nrows(),
                f.ncols()
            )));
        }
        Ok(f.probs() + self.difference())
    }

    /// `f + D_nᵀ t D_m` as a distribution; fails if any entry leaves `[0, 1]`.
    pub fn reconstruct(&self, f: &JointDistribution) -> Result<JointDistribution> {
        JointDistribution::new(self.apply(f)?)
    }
}

/// Confidence of beliefs `g` relative to the truth `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfidenceTag {
    WellCalibrated,
    Overconfident,
    Underconfident,
    Unranked,
}

impl ConfidenceTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfidenceTag::WellCalibrated => "well_calibrated",
            ConfidenceTag::Overconfident => "overconfident",
            ConfidenceTag::Underconfident => "underconfident",
            ConfidenceTag::Unranked => "unranked",
        }
    }

    /// The opposite ranking (swap the roles of `f` and `g`).
    pub fn reversed(self) -> Self {
        match self {
            ConfidenceTag::Overconfident => ConfidenceTag::Underconfident,
            ConfidenceTag::Underconfident => ConfidenceTag::Overconfident,
            other => other,
        }
    }
}

impl std::fmt::Display for ConfidenceTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceClass {
    pub tag: ConfidenceTag,
    pub evidence: TransformationMatrix,
    /// For `Unranked`: first cell (row-major) whose sign opposes the first nonzero cell.
    pub violating_cell: Option<(usize, usize)>,
}

/// Cumulative-difference matrix `t` between `f` and `g`.
pub fn extract_transformation(
    f: &JointDistribution,
    g: &JointDistribution,
) -> Result<TransformationMatrix> {
    f.check_common_marginals(g, MARGINAL_TOLERANCE)?;
    let n = f.nrows();
    let m = f.ncols();
    let diff = g.probs() - f.probs();
    // running 2-D prefix sums over the leading (n-1)×(m-1) block
    let mut t = DMatrix::zeros(n - 1, m - 1);
    for k in 0..n - 1 {
        let mut row_acc = 0.0;
        for l in 0..m - 1 {
            row_acc += diff[(k, l)];
            t[(k, l)] = row_acc + if k > 0 { t[(k - 1, l)] } else { 0.0 };
        }
    }
    Ok(TransformationMatrix::new(t))
}

/// Classifies a transformation matrix by the signs of its entries.
pub fn classify(t: &TransformationMatrix, tolerance: f64) -> ConfidenceClass {
    let sign = |x: f64| -> i8 {
        if x >= tolerance {
            1
        } else if x <= -tolerance {
            -1
        } else {
            0
        }
    };
    let m = t.matrix();
    let mut first_sign = 0i8;
    let mut violating_cell = None;
    for k in 0..m.nrows() {
        for l in 0..m.ncols() {
            let s = sign(m[(k, l)]);
            if s == 0 {
                continue;
            }
            if first_sign == 0 {
                first_sign = s;
            } else if s != first_sign && violating_cell.is_none() {
                violating_cell = Some((k, l));
            }
        }
    }
    let tag = match (first_sign, violating_cell) {
        (0, _) => ConfidenceTag::WellCalibrated,
        (_, Some(_)) => ConfidenceTag::Unranked,
        (1, None) => ConfidenceTag::Overconfident,
        _ => ConfidenceTag::Underconfident,
    };
    ConfidenceClass {
        tag,
        evidence: t.clone(),
        violating_cell,
    }
}

/// How `g` ranks against `f` in the concordance order.
pub fn concordance_compare(f: &JointDistribution, g: &JointDistribution) -> Result<ConfidenceClass> {
    concordance_compare_with_tolerance(f, g, SIGN_TOLERANCE)
}

pub fn concordance_compare_with_tolerance(
    f: &JointDistribution,
    g: &JointDistribution,
    tolerance: f64,
) -> Result<ConfidenceClass> {
    Ok(classify(&extract_transformation(f, g)?, tolerance))
}

/// True iff `g` weakly dominates the independent coupling of `f`'s marginals.
pub fn association_floor_check(f: &JointDistribution, g: &JointDistribution) -> Result<bool> {
    f.check_common_marginals(g, MARGINAL_TOLERANCE)?;
    let product = JointDistribution::independent(f.row_marginal(), f.col_marginal())?;
    let t = extract_transformation(&product, g)?;
    Ok(t.matrix().iter().all(|&x| x > -SIGN_TOLERANCE))
}

/// Pearson correlation between state index values and signal values under `d`.
pub fn pearson(d: &JointDistribution, row_values: &[f64], col_values: &[f64]) -> f64 {
    let mr = crate::model::dot(d.row_marginal(), row_values);
    let mc = crate::model::dot(d.col_marginal(), col_values);
    let mut cov = 0.0;
    for (i, r) in row_values.iter().enumerate() {
        for (j, c) in col_values.iter().enumerate() {
            cov += d.get(i, j) * (r - mr) * (c - mc);
        }
    }
    let vr = crate::model::weighted_covariance(d.row_marginal(), row_values, row_values);
    let vc = crate::model::weighted_covariance(d.col_marginal(), col_values, col_values);
    cov / (vr * vc).sqrt()
}
