//! Conditional-gradient maximization of `U(g)` over the transportation polytope.
//!
//! Away-step variant: the iterate is kept as a convex combination of atoms
//! (the starting point plus polytope vertices returned by the linear oracle),
//! which gives linear convergence for this objective (strongly concave in the
//! induced actions). Step sizes come from exact line search, since `U` is
//! quadratic along any segment.

use nalgebra::DMatrix;

use super::transport::{ascending_order, northwest_corner};
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::model::{JointDistribution, Scenario};

/// Where the iteration starts.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// The true distribution `f`.
    Truth,
    /// The comonotone vertex for the given signal order.
    Vertex(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct FallbackOutcome {
    pub g: JointDistribution,
    /// `E_g[y | s_j]`
    pub actions: Vec<f64>,
    /// Frank-Wolfe duality gap at termination; bounds `U* - U(g)`.
    pub gap: f64,
    pub iterations: usize,
}

struct Atom {
    point: DMatrix<f64>,
    weight: f64,
}

/// Actions `Σ_i g(i,j) y_i / f_S(j)` for a matrix with the true signal marginal.
fn actions_of(g: &DMatrix<f64>, y: &[f64], fs: &[f64]) -> Vec<f64> {
    (0..g.ncols())
        .map(|j| (0..g.nrows()).map(|i| g[(i, j)] * y[i]).sum::<f64>() / fs[j])
        .collect()
}

/// Linear functional `Σ_ij y_i v_j h(i,j)`.
fn pairing(h: &DMatrix<f64>, y: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..h.ncols() {
        let col: f64 = (0..h.nrows()).map(|i| h[(i, j)] * y[i]).sum();
        acc += col * v[j];
    }
    acc
}

pub fn maximize(sc: &Scenario, start: Start, config: &SolverConfig) -> Result<FallbackOutcome> {
    let f = sc.joint();
    let y = sc.y();
    let fs = f.col_marginal();
    let rows = f.row_marginal();
    let post = sc.posterior_means();
    let m = sc.n_signals();

    let initial = match start {
        Start::Truth => f.probs().clone(),
        Start::Vertex(order) => {
            if order.len() != m {
                return Err(Error::InvalidInput(format!(
                    "vertex order has {} entries for {m} signals",
                    order.len()
                )));
            }
            northwest_corner(rows, fs, &order)
        }
    };
    let mut g = initial.clone();
    let mut atoms = vec![Atom {
        point: initial,
        weight: 1.0,
    }];
    let mut actions = actions_of(&g, y, fs);
    let mut gap = f64::INFINITY;

    for iteration in 0..config.max_iterations {
        if iteration % 64 == 0 {
            actions = actions_of(&g, y, fs);
        }
        // gradient of U is y_i * v_j
        let v: Vec<f64> = actions
            .iter()
            .zip(&post)
            .map(|(a, p)| -2.0 * (a - p))
            .collect();
        let vertex = northwest_corner(rows, fs, &ascending_order(&v));
        let at_g = pairing(&g, y, &v);
        gap = pairing(&vertex, y, &v) - at_g;
        if gap <= config.gap_tolerance {
            return finish(g, y, fs, gap, iteration);
        }

        let (away_index, away_value) = atoms
            .iter()
            .enumerate()
            .map(|(k, a)| (k, pairing(&a.point, y, &v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("active set is never empty");
        let away_gap = at_g - away_value;

        let toward = gap >= away_gap || atoms.len() == 1;
        let (direction, max_step) = if toward {
            (&vertex - &g, 1.0)
        } else {
            let w = atoms[away_index].weight;
            (&g - &atoms[away_index].point, w / (1.0 - w))
        };

        let shift = actions_of(&direction, y, fs);
        let slope: f64 = (0..m)
            .map(|j| -2.0 * fs[j] * (actions[j] - post[j]) * shift[j])
            .sum();
        let curvature: f64 = (0..m).map(|j| fs[j] * shift[j] * shift[j]).sum();
        let step = if curvature > 0.0 {
            (slope / (2.0 * curvature)).clamp(0.0, max_step)
        } else if slope > 0.0 {
            max_step
        } else {
            0.0
        };
        if step == 0.0 {
            // stalled in floating point above the requested gap
            return Err(Error::ConvergenceFailure {
                iterations: iteration,
                gap,
            });
        }

        g += &direction * step;
        for (a, d) in actions.iter_mut().zip(&shift) {
            *a += step * d;
        }
        if toward {
            if step >= 1.0 {
                atoms.clear();
                atoms.push(Atom {
                    point: vertex,
                    weight: 1.0,
                });
            } else {
                for a in atoms.iter_mut() {
                    a.weight *= 1.0 - step;
                }
                match atoms.iter_mut().find(|a| same_point(&a.point, &vertex)) {
                    Some(a) => a.weight += step,
                    None => atoms.push(Atom {
                        point: vertex,
                        weight: step,
                    }),
                }
            }
        } else {
            for a in atoms.iter_mut() {
                a.weight *= 1.0 + step;
            }
            atoms[away_index].weight -= step;
            if step >= max_step {
                atoms.swap_remove(away_index);
            }
        }
        atoms.retain(|a| a.weight > 0.0);
    }
    Err(Error::ConvergenceFailure {
        iterations: config.max_iterations,
        gap,
    })
}

fn same_point(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= 1e-15)
}

fn finish(
    g: DMatrix<f64>,
    y: &[f64],
    fs: &[f64],
    gap: f64,
    iterations: usize,
) -> Result<FallbackOutcome> {
    let actions = actions_of(&g, y, fs);
    Ok(FallbackOutcome {
        g: JointDistribution::new(g)?,
        actions,
        gap,
        iterations,
    })
}
