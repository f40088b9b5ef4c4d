//! Random instance generators shared by the integration tests.
//!
//! Each generator works from plain parameter vectors, so the same builders
//! back both the proptest strategies and the seeded loops of the acceptance
//! suite.

#![allow(dead_code)]

use belief_design::design::transport::northwest_corner;
use belief_design::model::{
    validate_document, BiasFunction, BiasSpec, JointDistribution, Scenario, ScenarioFile,
    ValidationOptions,
};
use belief_design::truthnoise::TruthNoiseScenario;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Raw ingredients of a joint-distribution scenario.
#[derive(Debug, Clone)]
pub struct RawScenario {
    pub n: usize,
    pub m: usize,
    /// Unnormalized cell weights, row-major, all positive.
    pub cells: Vec<f64>,
    pub state_start: f64,
    /// Positive gaps between consecutive states.
    pub state_gaps: Vec<f64>,
    pub bias_start: f64,
    /// Positive gaps between consecutive bias values.
    pub bias_gaps: Vec<f64>,
}

fn cumulative(start: f64, gaps: &[f64]) -> Vec<f64> {
    std::iter::once(start)
        .chain(gaps.iter().scan(start, |acc, g| {
            *acc += g;
            Some(*acc)
        }))
        .collect()
}

impl RawScenario {
    pub fn states(&self) -> Vec<f64> {
        cumulative(self.state_start, &self.state_gaps)
    }

    pub fn bias(&self) -> Vec<f64> {
        cumulative(self.bias_start, &self.bias_gaps)
    }

    pub fn joint_rows(&self) -> Vec<Vec<f64>> {
        let total: f64 = self.cells.iter().sum();
        self.cells
            .chunks(self.m)
            .map(|r| r.iter().map(|x| x / total).collect())
            .collect()
    }

    /// Validated scenario with signals relabeled by posterior mean; `None` on ties.
    pub fn build(&self) -> Option<Scenario> {
        build_scenario(self.states(), self.joint_rows(), self.bias())
    }
}

pub fn build_scenario(states: Vec<f64>, joint: Vec<Vec<f64>>, y: Vec<f64>) -> Option<Scenario> {
    let doc = ScenarioFile {
        name: None,
        states,
        joint,
        bias: BiasSpec::Table(y),
    };
    validate_document(doc, ValidationOptions { relabel_signals: true })
        .ok()
        .map(|v| v.scenario)
}

/// Scenario with the same joint and states but bias `y`.
pub fn with_bias(sc: &Scenario, y: Vec<f64>) -> Option<Scenario> {
    Scenario::new(
        sc.states().to_vec(),
        sc.joint().clone(),
        BiasFunction::table(y).ok()?,
    )
    .ok()
}

pub fn random_raw(rng: &mut ChaCha8Rng, n: usize, m: usize) -> RawScenario {
    RawScenario {
        n,
        m,
        cells: (0..n * m).map(|_| rng.gen_range(0.05..1.0)).collect(),
        state_start: rng.gen_range(-2.0..2.0),
        state_gaps: (0..n - 1).map(|_| rng.gen_range(0.2..2.0)).collect(),
        bias_start: rng.gen_range(-2.0..2.0),
        bias_gaps: (0..n - 1).map(|_| rng.gen_range(0.05..2.5)).collect(),
    }
}

/// Random valid scenario of the given shape.
pub fn random_scenario(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Scenario {
    loop {
        if let Some(sc) = random_raw(rng, n, m).build() {
            return sc;
        }
    }
}

pub fn raw_strategy(n: std::ops::RangeInclusive<usize>, m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = RawScenario> {
    (n, m).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(0.05f64..1.0, n * m),
            -2.0f64..2.0,
            prop::collection::vec(0.2f64..2.0, n - 1),
            -2.0f64..2.0,
            prop::collection::vec(0.05f64..2.5, n - 1),
        )
            .prop_map(move |(cells, state_start, state_gaps, bias_start, bias_gaps)| RawScenario {
                n,
                m,
                cells,
                state_start,
                state_gaps,
                bias_start,
                bias_gaps,
            })
    })
}

pub fn scenario_strategy(
    n: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Scenario> {
    raw_strategy(n, m).prop_filter_map("tied posterior means", |raw| raw.build())
}

pub fn binary_strategy() -> impl Strategy<Value = Scenario> {
    scenario_strategy(2..=2, 2..=2)
}

/// Convex combination of `f` and north-west-corner vertices visited in `orders`.
pub fn mix_with_vertices(f: &JointDistribution, orders: &[Vec<usize>], weights: &[f64]) -> JointDistribution {
    let total: f64 = weights.iter().sum();
    let mut g: DMatrix<f64> = f.probs() * (weights[0] / total);
    for (order, w) in orders.iter().zip(&weights[1..]) {
        g += northwest_corner(f.row_marginal(), f.col_marginal(), order) * (w / total);
    }
    JointDistribution::new(g).expect("convex combinations stay feasible")
}

/// Random feasible beliefs for `f`: mixtures of `f` with up to three vertices.
pub fn random_feasible(rng: &mut ChaCha8Rng, f: &JointDistribution) -> JointDistribution {
    let k = rng.gen_range(1..=3);
    let orders: Vec<Vec<usize>> = (0..k)
        .map(|_| {
            let mut o: Vec<usize> = (0..f.ncols()).collect();
            o.shuffle(rng);
            o
        })
        .collect();
    let weights: Vec<f64> = (0..=k).map(|_| rng.gen_range(0.0..1.0)).collect();
    mix_with_vertices(f, &orders, &weights)
}

/// A scenario together with feasible beliefs for it.
pub fn scenario_with_beliefs(
    n: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Scenario, JointDistribution)> {
    scenario_strategy(n, m).prop_flat_map(|sc| {
        let m = sc.n_signals();
        let orders = prop::collection::vec(Just((0..m).collect::<Vec<usize>>()).prop_shuffle(), 1..=3);
        (Just(sc), orders).prop_flat_map(|(sc, orders)| {
            let k = orders.len();
            (Just(sc), Just(orders), prop::collection::vec(0.01f64..1.0, k + 1)).prop_map(
                |(sc, orders, weights)| {
                    let g = mix_with_vertices(sc.joint(), &orders, &weights);
                    (sc, g)
                },
            )
        })
    })
}

/// Raw ingredients of a truth-or-noise scenario.
#[derive(Debug, Clone)]
pub struct RawTruthNoise {
    pub state_start: f64,
    pub state_gaps: Vec<f64>,
    pub weights: Vec<f64>,
    pub rho: f64,
    pub bias_start: f64,
    pub bias_gaps: Vec<f64>,
}

impl RawTruthNoise {
    pub fn build(&self) -> TruthNoiseScenario {
        let total: f64 = self.weights.iter().sum();
        TruthNoiseScenario::new(
            cumulative(self.state_start, &self.state_gaps),
            self.weights.iter().map(|w| w / total).collect(),
            self.rho,
            BiasFunction::table(cumulative(self.bias_start, &self.bias_gaps)).expect("increasing bias"),
        )
        .expect("valid truth-or-noise scenario")
    }
}

pub fn random_truth_noise(rng: &mut ChaCha8Rng) -> TruthNoiseScenario {
    let n = rng.gen_range(2..=12);
    RawTruthNoise {
        state_start: rng.gen_range(-5.0..5.0),
        state_gaps: (0..n - 1).map(|_| rng.gen_range(0.1..2.0)).collect(),
        weights: (0..n).map(|_| rng.gen_range(0.05..1.0)).collect(),
        rho: rng.gen_range(0.05..0.95),
        bias_start: rng.gen_range(-5.0..5.0),
        bias_gaps: (0..n - 1).map(|_| rng.gen_range(0.02..3.0)).collect(),
    }
    .build()
}

pub fn truth_noise_strategy() -> impl Strategy<Value = TruthNoiseScenario> {
    (2usize..=12)
        .prop_flat_map(|n| {
            (
                -5.0f64..5.0,
                prop::collection::vec(0.1f64..2.0, n - 1),
                prop::collection::vec(0.05f64..1.0, n),
                0.05f64..0.95,
                -5.0f64..5.0,
                prop::collection::vec(0.02f64..3.0, n - 1),
            )
        })
        .prop_map(|(state_start, state_gaps, weights, rho, bias_start, bias_gaps)| {
            RawTruthNoise {
                state_start,
                state_gaps,
                weights,
                rho,
                bias_start,
                bias_gaps,
            }
            .build()
        })
}

/// Random truth-or-noise scenario whose bias is affine with slope below `rho`,
/// so the agent under-reacts relative to the truth.
pub fn random_compressed_truth_noise(rng: &mut ChaCha8Rng) -> TruthNoiseScenario {
    let n = rng.gen_range(2..=12);
    let state_gaps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.1..2.0)).collect();
    let rho = rng.gen_range(0.1..0.95);
    let slope = rng.gen_range(0.05..rho);
    RawTruthNoise {
        state_start: rng.gen_range(-5.0..5.0),
        bias_gaps: state_gaps.iter().map(|g| slope * g).collect(),
        state_gaps,
        weights: (0..n).map(|_| rng.gen_range(0.05..1.0)).collect(),
        rho,
        bias_start: rng.gen_range(-1.0..1.0),
    }
    .build()
}
