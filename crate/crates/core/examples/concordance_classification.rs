//! Ranking beliefs against the truth in the concordance order, and checking
//! them against the independent coupling.
//!
//! Run with `cargo run --example concordance_classification`.

use belief_design::model::JointDistribution;
use belief_design::order::{association_floor_check, concordance_compare, pearson};

fn main() -> belief_design::Result<()> {
    let f = JointDistribution::from_rows(&[vec![0.3, 0.2], vec![0.2, 0.3]])?;
    let independent = JointDistribution::independent(f.row_marginal(), f.col_marginal())?;
    let candidates = [
        ("sharper", JointDistribution::from_rows(&[vec![0.4, 0.1], vec![0.1, 0.4]])?),
        ("flatter", JointDistribution::from_rows(&[vec![0.27, 0.23], vec![0.23, 0.27]])?),
        ("the truth", f.clone()),
        ("independent", independent),
    ];
    for (label, g) in &candidates {
        let class = concordance_compare(&f, g)?;
        println!(
            "{label:>11}: {:<15} t = {:?}, correlation {:+.3}, above independence {}",
            class.tag.as_str(),
            class.evidence.to_rows(),
            pearson(g, &[0.0, 1.0], &[0.0, 1.0]),
            association_floor_check(&f, g)?
        );
    }

    // with three states and signals the order is partial
    let f3 = JointDistribution::from_rows(&[
        vec![0.2, 0.1, 0.05],
        vec![0.1, 0.1, 0.1],
        vec![0.05, 0.1, 0.2],
    ])?;
    // more concordant in the low corner, less in the high corner
    let crossing = JointDistribution::from_rows(&[
        vec![0.23, 0.07, 0.05],
        vec![0.07, 0.1, 0.13],
        vec![0.05, 0.13, 0.17],
    ])?;
    let class = concordance_compare(&f3, &crossing)?;
    println!("3x3: {} (first opposing cell {:?})", class.tag, class.violating_cell);
    Ok(())
}
