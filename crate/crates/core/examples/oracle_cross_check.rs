//! Cross-checking the solver against brute force: random search over the
//! feasible beliefs and a Monte Carlo estimate of the designed payoff.
//!
//! Run with `cargo run --release --example oracle_cross_check`.

use belief_design::design::{solve_design, SolverConfig};
use belief_design::model::{BiasFunction, JointDistribution, Scenario};
use belief_design::montecarlo::MonteCarloConfig;
use belief_design::oracle::{scan_polytope, simulate_payoff};

fn main() -> belief_design::Result<()> {
    let sc = Scenario::new(
        vec![0.0, 1.0, 2.5],
        JointDistribution::from_rows(&[
            vec![0.15, 0.1, 0.05, 0.03],
            vec![0.07, 0.1, 0.1, 0.07],
            vec![0.03, 0.05, 0.1, 0.15],
        ])?,
        BiasFunction::table(vec![-1.0, 1.0, 4.0])?,
    )?;
    let sol = solve_design(&sc, &SolverConfig::default())?;
    println!("solver: {:?}, payoff {:.8}", sol.method, sol.payoff);

    let scan = scan_polytope(&sc, 20_000, 7)?;
    println!(
        "polytope scan: best {:.8} after {} evaluations (solver ahead by {:.2e})",
        scan.best_value,
        scan.evaluations,
        sol.payoff - scan.best_value
    );

    let mc = simulate_payoff(&sc, &sol.g_star, &MonteCarloConfig::default())?;
    println!(
        "Monte Carlo: {:.6} ± {:.6} over {} draws, z = {:.2}",
        mc.estimate,
        mc.std_error,
        mc.draws,
        mc.z_score(sol.payoff)
    );
    Ok(())
}
