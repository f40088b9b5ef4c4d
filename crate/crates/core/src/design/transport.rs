//! Exact linear maximization over the fixed-marginal (transportation) polytope.
//!
//! The belief-design gradient has product form `∂U/∂g(i,j) = y_i · v_j` with `y`
//! strictly increasing in the state index. For such costs the comonotone
//! coupling (north-west corner rule after sorting signals by `v`) is optimal,
//! since `y_i v_j` is supermodular once both axes are sorted.

use nalgebra::DMatrix;

/// North-west corner coupling of `rows` (in index order) with `cols` visited in `col_order`.
pub fn northwest_corner(rows: &[f64], cols: &[f64], col_order: &[usize]) -> DMatrix<f64> {
    let n = rows.len();
    let m = cols.len();
    let mut g = DMatrix::zeros(n, m);
    let mut i = 0;
    let mut k = 0;
    let mut row_left = rows[0];
    let mut col_left = cols[col_order[0]];
    loop {
        let j = col_order[k];
        if i == n - 1 && k == m - 1 {
            // the last cell absorbs rounding so both marginals are met
            g[(i, j)] += row_left.max(0.0);
            break;
        }
        if (row_left <= col_left && i < n - 1) || k == m - 1 {
            g[(i, j)] += row_left;
            col_left -= row_left;
            i += 1;
            row_left = rows[i];
        } else {
            g[(i, j)] += col_left;
            row_left -= col_left;
            k += 1;
            col_left = cols[col_order[k]];
        }
    }
    g
}

/// Signal order that sorts `scores` ascending (ties broken by index).
pub fn ascending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    order
}

/// Maximizes `Σ_ij y_i v_j h(i,j)` over couplings `h` of `rows` and `cols`,
/// assuming `y` is nondecreasing in the row index.
pub fn max_product_objective(rows: &[f64], cols: &[f64], signal_scores: &[f64]) -> DMatrix<f64> {
    northwest_corner(rows, cols, &ascending_order(signal_scores))
}
