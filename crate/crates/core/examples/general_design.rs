//! Belief design beyond two signals: the solver picks the cumulative-deviation
//! construction when it is feasible and falls back to a certified
//! conditional-gradient search otherwise.
//!
//! Run with `cargo run --example general_design`.

use belief_design::design::{ideal_deviation, solve_design, SolverConfig};
use belief_design::model::{payoff_terms, BiasFunction, JointDistribution, Scenario};

fn show(label: &str, sc: &Scenario) -> belief_design::Result<()> {
    let sol = solve_design(sc, &SolverConfig::default())?;
    let truth = payoff_terms(sc, sc.joint())?;
    println!("{label}");
    println!("  method {:?}, {} after {} iterations", sol.method, sol.classification.tag, sol.iterations);
    println!("  ideal deviation    {:?}", ideal_deviation(sc).delta);
    println!("  achieved deviation {:?}", sol.delta_star.delta);
    println!("  payoff {:.6} vs {:.6} under the truth", sol.payoff, truth.payoff());
    println!(
        "  losses: residual {:.5}, mean bias {:.5}, excess variance {:.5}",
        sol.payoff_terms.residual_uncertainty, sol.payoff_terms.mean_bias_sq, sol.payoff_terms.excess_variance
    );
    if let Some(gap) = sol.duality_gap {
        println!("  duality gap {gap:.2e}");
    }
    Ok(())
}

fn main() -> belief_design::Result<()> {
    let joint = JointDistribution::from_rows(&[
        vec![0.14, 0.12, 0.08],
        vec![0.11, 0.12, 0.11],
        vec![0.08, 0.10, 0.14],
    ])?;
    show(
        "mild compression: the ideal deviation is reachable",
        &Scenario::new(vec![0.0, 1.0, 2.0], joint, BiasFunction::table(vec![0.5, 1.1, 1.6])?)?,
    )?;
    let informative = JointDistribution::from_rows(&[
        vec![0.30, 0.02, 0.01],
        vec![0.02, 0.28, 0.03],
        vec![0.01, 0.03, 0.30],
    ])?;
    show(
        "strong compression of an informative signal: the optimum sits on the boundary",
        &Scenario::new(vec![0.0, 5.0, 10.0], informative, BiasFunction::table(vec![0.0, 0.5, 1.0])?)?,
    )?;
    Ok(())
}
