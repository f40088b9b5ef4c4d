//! The 2×2 closed form: payoff as a function of the confidence shift `τ`,
//! checked against a brute-force grid.
//!
//! Run with `cargo run --example binary_confidence`.

use belief_design::binary::{actions_at, payoff_at, solve_binary, tau_bounds};
use belief_design::model::{BiasFunction, JointDistribution, Scenario};
use belief_design::oracle::scan_tau;

fn main() -> belief_design::Result<()> {
    // an agent who over-reacts to the state: the principal wants less confidence
    let sc = Scenario::new(
        vec![0.0, 1.0],
        JointDistribution::from_rows(&[vec![0.35, 0.15], vec![0.15, 0.35]])?,
        BiasFunction::table(vec![-0.5, 1.5])?,
    )?;
    let (lower, upper) = tau_bounds(&sc)?;
    println!("feasible tau: [{lower:.4}, {upper:.4}]");
    for k in 0..=8 {
        let tau = lower + (upper - lower) * k as f64 / 8.0;
        let [a1, a2] = actions_at(&sc, tau);
        println!("tau {tau:+.4}  actions ({a1:+.4}, {a2:+.4})  payoff {:.5}", payoff_at(&sc, tau)?);
    }

    let sol = solve_binary(&sc)?;
    println!("closed form: tau* = {:.6}, payoff {:.6}, {}", sol.tau_star, sol.payoff, sol.classification);
    let grid = scan_tau(&sc, 10_001)?;
    println!(
        "grid oracle: tau = {:.6}, payoff {:.6} (step {:.2e})",
        grid.best_point[0], grid.best_value, grid.resolution
    );
    Ok(())
}
