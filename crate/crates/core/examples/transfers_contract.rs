//! Contracts with transfers: recommended actions and the wages that make
//! following them incentive compatible, against the calibrated benchmark.
//!
//! Run with `cargo run --example transfers_contract`.

use belief_design::model::{BiasFunction, JointDistribution, Scenario};
use belief_design::oracle::scan_contract;
use belief_design::transfers::{solve_with_transfers, verify_ic, well_calibrated_benchmark};

fn main() -> belief_design::Result<()> {
    let sc = Scenario::new(
        vec![0.0, 1.0],
        JointDistribution::from_rows(&[vec![0.3, 0.2], vec![0.2, 0.3]])?,
        BiasFunction::table(vec![-0.4, 1.6])?,
    )?;
    let contract = solve_with_transfers(&sc)?;
    let benchmark = well_calibrated_benchmark(&sc)?;
    for (label, c) in [("designed beliefs", &contract), ("calibrated beliefs", &benchmark)] {
        let ic = verify_ic(&sc, c)?;
        println!(
            "{label}: tau {:+.4}, actions {:?}, wages {:?}, {:?}, total payoff {:.6}, IC violated {}",
            c.tau, c.x, c.w, c.placement, c.total_payoff, ic.violated
        );
    }
    let grid = scan_contract(&sc, 201, 81)?;
    println!("grid oracle best total payoff {:.6} at {:?}", grid.best_value, grid.best_point);

    // two-state contracts need a conflict no larger than the signal's reach
    let wide = Scenario::new(
        vec![0.0, 1.0],
        JointDistribution::from_rows(&[vec![0.3, 0.2], vec![0.2, 0.3]])?,
        BiasFunction::table(vec![5.0, 6.0])?,
    )?;
    match solve_with_transfers(&wide) {
        Ok(_) => println!("unexpected contract for the wide-conflict scenario"),
        Err(e) => println!("wide conflict: {e}"),
    }
    Ok(())
}
