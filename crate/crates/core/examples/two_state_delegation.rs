//! Two states, a symmetric signal and an agent whose preferred action is
//! `3 + θ/3`: solve for the best beliefs and decide whether to delegate.
//!
//! Run with `cargo run --example two_state_delegation`.

use belief_design::delegation::delegation_decision;
use belief_design::design::{solve_design, SolverConfig};
use belief_design::model::{BiasFunction, JointDistribution, Scenario};

fn main() -> belief_design::Result<()> {
    let states = vec![0.0, 10.0];
    let joint = JointDistribution::from_rows(&[vec![0.4, 0.1], vec![0.1, 0.4]])?;
    let bias = BiasFunction::affine(3.0, 1.0 / 3.0, &states)?;
    let sc = Scenario::new(states, joint, bias)?;

    let config = SolverConfig::default();
    let sol = solve_design(&sc, &config)?;
    let binary = sol.binary.as_ref().expect("two-by-two scenarios use the closed form");
    println!("confidence tau in [{:.4}, {:.4}]", binary.tau_lower, binary.tau_upper);
    println!("unconstrained optimum tau = {:.4}", binary.tau_star_interior);
    println!("chosen tau = {:.4} (clamped: {})", binary.tau_star, binary.clamped);
    println!("beliefs are {}", sol.classification.tag);
    println!("g* = {:?}", sol.g_star.to_rows());
    println!("principal payoff with designed beliefs = {:.4}", sol.payoff);

    let d = delegation_decision(&sc, &config)?;
    println!(
        "delegate: {} (delegation {:.4} vs centralization {:.4})",
        d.delegate, d.delegation_payoff, d.centralization_payoff
    );
    Ok(())
}
