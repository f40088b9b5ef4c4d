//! Brute-force cross-checks that share no formulas with the solvers.
//!
//! Every payoff here is summed directly from its definition. Scans are
//! deterministic given their seed and independent of the rayon thread count.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary::tau_bounds;
use crate::error::{Error, Result};
use crate::model::{JointDistribution, Scenario};
use crate::montecarlo::{draw_index, index_sampler, shard_rng, sharded_mean, MonteCarloConfig, MonteCarloEstimate};
use crate::order::{extract_transformation, TransformationMatrix};
use crate::transfers::{contract_payoff, minimal_wages};
use crate::truthnoise::TruthNoiseScenario;

pub const DEFAULT_TAU_POINTS: usize = 10_001;
pub const DEFAULT_KAPPA_POINTS: usize = 10_001;
pub const DEFAULT_BUDGET: usize = 10_000;
pub const DEFAULT_SEED: u64 = 7;
/// Coordinate sweeps in the local refinement of the best polytope sample.
pub const REFINE_SWEEPS: usize = 500;
const SCAN_SHARDS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_value: f64,
    /// `τ`, `κ`, `(x₁, x₂, τ)` or the row-major entries of `t`, by scan.
    pub best_point: Vec<f64>,
    /// Grid spacing, or 0 for sampled scans.
    pub resolution: f64,
    pub evaluations: usize,
}

/// `-Σ_ij f(i,j) (E_g[y|s_j] - θ_i)²` summed from the raw matrix `g`.
pub fn direct_payoff(sc: &Scenario, g: &DMatrix<f64>) -> f64 {
    let f = sc.joint();
    let y = sc.y();
    let theta = sc.states();
    let mut total = 0.0;
    for j in 0..g.ncols() {
        let mut mass = 0.0;
        let mut weighted = 0.0;
        for i in 0..g.nrows() {
            mass += g[(i, j)];
            weighted += g[(i, j)] * y[i];
        }
        let action = weighted / mass;
        for i in 0..g.nrows() {
            total -= f.get(i, j) * (action - theta[i]).powi(2);
        }
    }
    total
}

fn linspace(lower: f64, upper: f64, points: usize) -> impl IndexedParallelIterator<Item = f64> {
    let step = (upper - lower) / (points - 1) as f64;
    (0..points)
        .into_par_iter()
        .map(move |k| if k + 1 == points { upper } else { lower + step * k as f64 })
}

fn best_of(points: impl ParallelIterator<Item = (f64, Vec<f64>)>) -> Option<(f64, Vec<f64>)> {
    // ties go to the earliest point so results do not depend on scheduling
    points
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None, |best, (v, p)| match best {
            Some((bv, _)) if bv >= v => best,
            _ => Some((v, p)),
        })
}

/// `f + τbbᵀ` without any feasibility check.
fn perturbed_raw(sc: &Scenario, tau: f64) -> DMatrix<f64> {
    let mut g = sc.joint().probs().clone();
    g[(0, 0)] += tau;
    g[(1, 1)] += tau;
    g[(0, 1)] -= tau;
    g[(1, 0)] -= tau;
    g
}

/// Evaluates `U(f + τbbᵀ)` on an even grid over the feasible `τ` interval.
pub fn scan_tau(sc: &Scenario, points: usize) -> Result<OracleResult> {
    let (lower, upper) = tau_bounds(sc)?;
    if points < 3 {
        return Err(Error::InvalidInput("tau scan needs at least 3 points".into()));
    }
    let grid = linspace(lower, upper, points).map(|tau| (direct_payoff(sc, &perturbed_raw(sc, tau)), vec![tau]));
    let (best_value, best_point) = best_of(grid).expect("grid is nonempty");
    Ok(OracleResult {
        best_value,
        best_point,
        resolution: (upper - lower) / (points - 1) as f64,
        evaluations: points,
    })
}

/// Cell masses of `f` after applying `t`; `None` if any leaves `[0, 1]`.
fn apply_checked(f: &DMatrix<f64>, t: &TransformationMatrix) -> Option<DMatrix<f64>> {
    let (n, m) = f.shape();
    let mut g = f.clone();
    for i in 0..n {
        for j in 0..m {
            g[(i, j)] += t.cell_change(i, j);
            if !(g[(i, j)] >= 0.0 && g[(i, j)] <= 1.0) {
                return None;
            }
        }
    }
    Some(g)
}

/// Largest `λ ∈ [0, 1]` keeping `f + λ·Δ(t)` inside `[0, 1]` cell-wise.
fn max_feasible_scale(f: &DMatrix<f64>, t: &TransformationMatrix) -> f64 {
    let (n, m) = f.shape();
    let mut scale: f64 = 1.0;
    for i in 0..n {
        for j in 0..m {
            let e = t.cell_change(i, j);
            let p = f[(i, j)];
            if e < 0.0 {
                scale = scale.min(p / -e);
            } else if e > 0.0 {
                scale = scale.min((1.0 - p) / e);
            }
        }
    }
    scale.max(0.0)
}

/// Draws `t(k,l) = G(k,l) - F(k,l)` with the cumulative `G(k,l)` uniform in its
/// Fréchet bounds given the marginals.
fn random_t(rng: &mut ChaCha8Rng, f: &JointDistribution, cumulative_f: &DMatrix<f64>) -> TransformationMatrix {
    let rows: Vec<f64> = f
        .row_marginal()
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect();
    let cols: Vec<f64> = f
        .col_marginal()
        .iter()
        .scan(0.0, |acc, c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let (n, m) = (f.nrows(), f.ncols());
    TransformationMatrix::new(DMatrix::from_fn(n - 1, m - 1, |k, l| {
        let lo = (rows[k] + cols[l] - 1.0).max(0.0);
        let hi = rows[k].min(cols[l]);
        rng.gen_range(lo..=hi) - cumulative_f[(k, l)]
    }))
}

/// Random search over the feasible beliefs, then coordinate ascent on the winner.
///
/// Candidates are `t` matrices with each cumulative entry drawn within its
/// Fréchet bounds. Candidates that push a cell outside `[0, 1]` are rejected,
/// and the ray towards them is sampled instead (uniformly up to the boundary),
/// so every draw yields a feasible point. `f` itself is always a candidate.
pub fn scan_polytope(sc: &Scenario, budget: usize, seed: u64) -> Result<OracleResult> {
    let f = sc.joint();
    let (n, m) = (f.nrows(), f.ncols());
    let zero = TransformationMatrix::zeros(n, m);
    let cumulative_f = {
        let mut c = DMatrix::zeros(n - 1, m - 1);
        for k in 0..n - 1 {
            for l in 0..m - 1 {
                c[(k, l)] = f.get(k, l)
                    + if k > 0 { c[(k - 1, l)] } else { 0.0 }
                    + if l > 0 { c[(k, l - 1)] } else { 0.0 }
                    - if k > 0 && l > 0 { c[(k - 1, l - 1)] } else { 0.0 };
            }
        }
        c
    };
    let per_shard = budget / SCAN_SHARDS;
    let extra = budget % SCAN_SHARDS;
    let shard_bests: Vec<(f64, DMatrix<f64>)> = (0..SCAN_SHARDS)
        .into_par_iter()
        .map(|k| {
            let mut rng = shard_rng(seed, k);
            let mut best = (direct_payoff(sc, f.probs()), zero.matrix().clone());
            for _ in 0..per_shard + usize::from(k < extra) {
                let t = random_t(&mut rng, f, &cumulative_f);
                let t = match apply_checked(f.probs(), &t) {
                    Some(_) => t,
                    None => {
                        let s = max_feasible_scale(f.probs(), &t) * rng.gen::<f64>();
                        TransformationMatrix::new(t.matrix() * s)
                    }
                };
                let Some(g) = apply_checked(f.probs(), &t) else {
                    continue;
                };
                let value = direct_payoff(sc, &g);
                if value > best.0 {
                    best = (value, t.matrix().clone());
                }
            }
            best
        })
        .collect();
    let (mut best_value, best_t) = shard_bests
        .into_iter()
        .fold(None::<(f64, DMatrix<f64>)>, |acc, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one shard");
    let mut g = f.probs() + TransformationMatrix::new(best_t).difference();
    let mut evaluations = budget + SCAN_SHARDS;

    // coordinate ascent: U is quadratic along each elementary move
    for _ in 0..REFINE_SWEEPS {
        let before = best_value;
        for k in 0..n - 1 {
            for l in 0..m - 1 {
                let cells = [(k, l, 1.0), (k + 1, l, -1.0), (k, l + 1, -1.0), (k + 1, l + 1, 1.0)];
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for &(i, j, s) in &cells {
                    if s > 0.0 {
                        lo = lo.max(-g[(i, j)]);
                    } else {
                        hi = hi.min(g[(i, j)]);
                    }
                }
                let span = (hi - lo).max(0.0);
                if span <= 1e-15 {
                    continue;
                }
                let h1 = lo + span / 3.0;
                let h2 = lo + 2.0 * span / 3.0;
                let (u0, u1, u2) = (
                    direct_payoff(sc, &shift(&g, &cells, lo)),
                    direct_payoff(sc, &shift(&g, &cells, h1)),
                    direct_payoff(sc, &shift(&g, &cells, h2)),
                );
                evaluations += 3;
                // quadratic through three equally spaced points
                let d = span / 3.0;
                let curvature = (u2 - 2.0 * u1 + u0) / (d * d);
                let slope_at_h1 = (u2 - u0) / (2.0 * d);
                let mut candidates = vec![lo, hi];
                if curvature < 0.0 {
                    candidates.push((h1 - slope_at_h1 / curvature).clamp(lo, hi));
                }
                let base = g.clone();
                for h in candidates {
                    let q = shift(&base, &cells, h);
                    let v = direct_payoff(sc, &q);
                    evaluations += 1;
                    if v > best_value {
                        best_value = v;
                        g = q;
                    }
                }
            }
        }
        if best_value - before <= 1e-15 {
            break;
        }
    }
    let g = JointDistribution::new(g)?;
    let t = extract_transformation(f, &g)?;
    Ok(OracleResult {
        best_value,
        best_point: t.matrix().transpose().iter().copied().collect(),
        resolution: 0.0,
        evaluations,
    })
}

/// Elementary move of size `h` on the 2×2 block of `cells`.
fn shift(g: &DMatrix<f64>, cells: &[(usize, usize, f64); 4], h: f64) -> DMatrix<f64> {
    let mut q = g.clone();
    for &(i, j, s) in cells {
        q[(i, j)] = (q[(i, j)] + s * h).max(0.0);
    }
    q
}

/// Samples `(θ, s)` from `f`, plays `E_g[y|s]`, and averages `-(x - θ)²`.
pub fn simulate_payoff(
    sc: &Scenario,
    g: &JointDistribution,
    config: &MonteCarloConfig,
) -> Result<MonteCarloEstimate> {
    let f = sc.joint();
    let (n, m) = (f.nrows(), f.ncols());
    if g.nrows() != n || g.ncols() != m {
        return Err(Error::ShapeMismatch("beliefs and scenario differ in shape".into()));
    }
    let cells: Vec<f64> = (0..n * m).map(|c| f.get(c / m, c % m)).collect();
    let sampler = index_sampler(&cells)?;
    let actions = g.conditional_means(sc.y())?;
    let theta = sc.states();
    sharded_mean(config, |rng| {
        let c = draw_index(&sampler, rng);
        -(actions[c % m] - theta[c / m]).powi(2)
    })
}

/// Evaluates the truth-or-noise payoff, summed over every (state, signal) pair,
/// on an even `κ` grid.
pub fn scan_kappa(tn: &TruthNoiseScenario, points: usize) -> Result<OracleResult> {
    if points < 3 {
        return Err(Error::InvalidInput("kappa scan needs at least 3 points".into()));
    }
    let (lower, upper) = tn.kappa_range();
    let w = tn.weights();
    let y = tn.y();
    let theta = tn.states();
    let rho = tn.rho();
    let mean_y: f64 = w.iter().zip(y).map(|(a, b)| a * b).sum();
    let grid = linspace(lower, upper, points).map(|kappa| {
        let a = rho + kappa;
        let mut total = 0.0;
        for (j, &ws) in w.iter().enumerate() {
            let x = a * y[j] + (1.0 - a) * mean_y;
            for (i, &wt) in w.iter().enumerate() {
                let p = wt * ((1.0 - rho) * ws + if i == j { rho } else { 0.0 });
                total -= p * (x - theta[i]).powi(2);
            }
        }
        (total, vec![kappa])
    });
    let (best_value, best_point) = best_of(grid).expect("grid is nonempty");
    Ok(OracleResult {
        best_value,
        best_point,
        resolution: (upper - lower) / (points - 1) as f64,
        evaluations: points,
    })
}

/// Grid search over recommendations `(x₁, x₂)` and confidence `τ`, paying the
/// cheapest incentive-compatible wages at each point.
///
/// Recommendations range over the hull of the states and the bias values.
pub fn scan_contract(sc: &Scenario, x_points: usize, tau_points: usize) -> Result<OracleResult> {
    let (tau_lo, tau_hi) = tau_bounds(sc)?;
    if x_points < 2 || tau_points < 2 {
        return Err(Error::InvalidInput("contract scan needs at least 2 points per axis".into()));
    }
    let hull = sc.states().iter().chain(sc.y());
    let x_lo = hull.clone().copied().fold(f64::INFINITY, f64::min);
    let x_hi = hull.copied().fold(f64::NEG_INFINITY, f64::max);
    let x_step = (x_hi - x_lo) / (x_points - 1) as f64;
    let tau_step = (tau_hi - tau_lo) / (tau_points - 1) as f64;
    let x_at = |k: usize| if k + 1 == x_points { x_hi } else { x_lo + x_step * k as f64 };
    let evaluated = (0..tau_points * x_points * x_points)
        .into_par_iter()
        .filter_map(|idx| {
            let t = idx / (x_points * x_points);
            let tau = if t + 1 == tau_points { tau_hi } else { tau_lo + tau_step * t as f64 };
            let x = [x_at(idx / x_points % x_points), x_at(idx % x_points)];
            let g = perturbed_raw(sc, tau);
            let fs = sc.joint().col_marginal();
            let y = sc.y();
            let mu = [
                (g[(0, 0)] * y[0] + g[(1, 0)] * y[1]) / fs[0],
                (g[(0, 1)] * y[0] + g[(1, 1)] * y[1]) / fs[1],
            ];
            let w = minimal_wages(x, mu)?;
            Some((contract_payoff(sc, x, w), vec![x[0], x[1], tau]))
        });
    let (best_value, best_point) = best_of(evaluated).ok_or_else(|| {
        Error::InvalidInput("no incentive-compatible contract on the grid".into())
    })?;
    Ok(OracleResult {
        best_value,
        best_point,
        resolution: x_step.max(tau_step),
        evaluations: x_points * x_points * tau_points,
    })
}
