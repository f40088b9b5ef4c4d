//! Numerical toolkit for designing the beliefs of a biased agent.
//!
//! A principal delegates a decision to an agent whose preferred action `y(θ)`
//! differs from the state `θ`. Instead of (or alongside) transfers, the
//! principal can choose which joint distribution of states and signals the
//! agent believes, as long as the marginals stay correct. The modules cover
//! the general design problem, its closed form with two states and signals,
//! the concordance order used to call a belief over- or underconfident,
//! contracts with transfers, the delegation decision, a "truth or noise"
//! family of beliefs, and brute-force oracles for cross-checking.

pub mod binary;
pub mod cli;
pub mod delegation;
pub mod design;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod order;
pub mod report;
pub mod transfers;
pub mod truthnoise;

pub use error::{Error, Result};
