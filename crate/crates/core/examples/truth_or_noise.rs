//! The truth-or-noise family: the signal equals the state with probability
//! `ρ` and is independent noise otherwise; the designer picks the agent's
//! perceived reliability `κ`.
//!
//! Run with `cargo run --example truth_or_noise`.

use belief_design::model::BiasFunction;
use belief_design::montecarlo::MonteCarloConfig;
use belief_design::truthnoise::{
    simulate_truth_noise_payoff, solve_truth_noise, truth_noise_delegation, truth_noise_transfers,
    uniform_grid, TruthNoiseScenario,
};

fn main() -> belief_design::Result<()> {
    let (states, weights) = uniform_grid(0.0, 10.0, 101)?;
    for (slope, rho) in [(1.0 / 3.0, 0.5), (1.5, 0.5), (0.9, 0.2)] {
        let bias = BiasFunction::affine(3.0, slope, &states)?;
        let tn = TruthNoiseScenario::new(states.clone(), weights.clone(), rho, bias)?;
        let sol = solve_truth_noise(&tn)?;
        println!("bias 3 + {slope:.3}θ, ρ = {rho}:");
        println!(
            "  κ* = {:.4} ({:?}, {}), payoff {:.4}",
            sol.kappa_star, sol.regime, sol.classification, sol.payoff
        );
        let mc = simulate_truth_noise_payoff(&tn, sol.kappa_star, &MonteCarloConfig::default())?;
        println!("  simulated payoff {:.4} ± {:.4}", mc.estimate, mc.std_error);
        let d = truth_noise_delegation(&tn)?;
        println!(
            "  delegate {} (threshold {:.4}; direct comparison {:.4} vs {:.4})",
            d.delegate, d.threshold_rhs, d.delegation_payoff, d.centralization_payoff
        );
        let t = truth_noise_transfers(&tn)?;
        if t.applies {
            println!("  flat wage {:.4}, smallest IC slack {:.4}", t.wage, t.min_ic_slack);
        }
    }
    Ok(())
}
