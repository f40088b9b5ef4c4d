//! JSON scenario documents.
//!
//! ```json
//! {
//!   "states": [0, 10],
//!   "joint": [[0.4, 0.1], [0.1, 0.4]],
//!   "bias": { "affine": { "intercept": 3, "slope": 0.3333333333333333 } }
//! }
//! ```
//!
//! `bias` is either `{"table": [y1, ..., yn]}` or
//! `{"affine": {"intercept": a, "slope": b}}` with `b > 0`. An optional
//! `name` string is carried through to reports.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BiasFunction, BiasRepr, JointDistribution, Scenario, MASS_TOLERANCE, SUPPORT_TOLERANCE};
use crate::error::{Error, Result};

/// Totals off by less than this are renormalized; larger deviations are rejected.
pub const RENORMALIZE_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasSpec {
    Table(Vec<f64>),
    Affine { intercept: f64, slope: f64 },
}

/// The on-disk form of a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub states: Vec<f64>,
    pub joint: Vec<Vec<f64>>,
    pub bias: BiasSpec,
}

impl ScenarioFile {
    pub fn from_scenario(sc: &Scenario, name: Option<String>) -> Self {
        let bias = match sc.bias().repr() {
            BiasRepr::Affine { intercept, slope } => BiasSpec::Affine { intercept, slope },
            BiasRepr::Table => BiasSpec::Table(sc.y().to_vec()),
        };
        Self {
            name,
            states: sc.states().to_vec(),
            joint: sc.joint().to_rows(),
            bias,
        }
    }

    /// Parses a document, reporting the offending key on failure.
    pub fn parse(raw: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(raw).map_err(|e| Error::parse("<document>", e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::parse("<document>", "expected a JSON object"))?;
        let name = match obj.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::parse("name", "expected a string")),
        };
        let states = number_array(obj.get("states"), "states")?;
        let joint_value = obj
            .get("joint")
            .ok_or_else(|| Error::parse("joint", "missing key"))?;
        let rows = joint_value
            .as_array()
            .ok_or_else(|| Error::parse("joint", "expected an array of rows"))?;
        let joint = rows
            .iter()
            .enumerate()
            .map(|(i, row)| number_array(Some(row), &format!("joint[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let bias = parse_bias(obj.get("bias"))?;
        Ok(Self {
            name,
            states,
            joint,
            bias,
        })
    }
}

pub(crate) fn number(value: &Value, key: &str) -> Result<f64> {
    value
        .as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::parse(key, format!("expected a finite number, found {value}")))
}

pub(crate) fn number_array(value: Option<&Value>, key: &str) -> Result<Vec<f64>> {
    let arr = value
        .ok_or_else(|| Error::parse(key, "missing key"))?
        .as_array()
        .ok_or_else(|| Error::parse(key, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| number(v, &format!("{key}[{i}]")))
        .collect()
}

pub(crate) fn parse_bias(value: Option<&Value>) -> Result<BiasSpec> {
    let obj = value
        .ok_or_else(|| Error::parse("bias", "missing key"))?
        .as_object()
        .ok_or_else(|| Error::parse("bias", "expected {\"table\": [...]} or {\"affine\": {...}}"))?;
    match (obj.get("table"), obj.get("affine")) {
        (Some(table), None) => Ok(BiasSpec::Table(number_array(Some(table), "bias.table")?)),
        (None, Some(affine)) => {
            let a = affine
                .as_object()
                .ok_or_else(|| Error::parse("bias.affine", "expected an object"))?;
            let intercept = number(
                a.get("intercept")
                    .ok_or_else(|| Error::parse("bias.affine.intercept", "missing key"))?,
                "bias.affine.intercept",
            )?;
            let slope = number(
                a.get("slope")
                    .ok_or_else(|| Error::parse("bias.affine.slope", "missing key"))?,
                "bias.affine.slope",
            )?;
            if slope <= 0.0 {
                return Err(Error::parse("bias.affine.slope", "slope must be positive"));
            }
            Ok(BiasSpec::Affine { intercept, slope })
        }
        (Some(_), Some(_)) => Err(Error::parse("bias", "give exactly one of `table` or `affine`")),
        (None, None) => Err(Error::parse("bias", "expected `table` or `affine`")),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Permute signal columns into increasing posterior-mean order instead of failing.
    pub relabel_signals: bool,
}

/// A scenario together with what validation changed.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario {
    pub scenario: Scenario,
    /// Normalized document that re-validates to `scenario` without options.
    pub document: ScenarioFile,
    /// `permutation[j]` is the original column now at position `j` (0-based).
    pub permutation: Option<Vec<usize>>,
    pub renormalized: bool,
}

/// Parses and validates a scenario document.
pub fn validate_scenario(raw: &str, options: ValidationOptions) -> Result<ValidatedScenario> {
    let doc = ScenarioFile::parse(raw)?;
    validate_document(doc, options)
}

pub fn validate_document(doc: ScenarioFile, options: ValidationOptions) -> Result<ValidatedScenario> {
    let n = doc.states.len();
    if n < 2 {
        return Err(Error::parse("states", "need at least two states"));
    }
    if doc.joint.len() != n {
        return Err(Error::parse(
            "joint",
            format!("expected {n} rows (one per state), found {}", doc.joint.len()),
        ));
    }
    let m = doc.joint[0].len();
    if m < 2 {
        return Err(Error::parse("joint[0]", "need at least two signals"));
    }
    if let Some(i) = doc.joint.iter().position(|r| r.len() != m) {
        return Err(Error::parse(
            format!("joint[{i}]"),
            format!("expected {m} entries, found {}", doc.joint[i].len()),
        ));
    }
    for (i, row) in doc.joint.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            if value <= SUPPORT_TOLERANCE {
                return Err(Error::ZeroEntry { row: i, col: j, value });
            }
        }
    }

    let mut probs = DMatrix::from_fn(n, m, |i, j| doc.joint[i][j]);
    let total: f64 = probs.iter().sum();
    let deviation = (total - 1.0).abs();
    let renormalized = deviation > MASS_TOLERANCE;
    if deviation >= RENORMALIZE_LIMIT {
        return Err(Error::MarginalMismatch {
            what: "total probability mass".into(),
            expected: 1.0,
            found: total,
        });
    }
    if renormalized {
        probs /= total;
    }

    let bias = match &doc.bias {
        BiasSpec::Table(values) => {
            if values.len() != n {
                return Err(Error::parse(
                    "bias.table",
                    format!("expected {n} values, found {}", values.len()),
                ));
            }
            BiasFunction::table(values.clone())?
        }
        BiasSpec::Affine { intercept, slope } => {
            BiasFunction::affine(*intercept, *slope, &doc.states)?
        }
    };

    let mut joint = JointDistribution::new(probs)?;
    let mut permutation = None;
    if options.relabel_signals {
        let means = joint.conditional_means(&doc.states)?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| means[a].total_cmp(&means[b]));
        if order.iter().enumerate().any(|(k, &j)| k != j) {
            let p = joint.probs();
            joint = JointDistribution::new(DMatrix::from_fn(n, m, |i, j| p[(i, order[j])]))?;
            permutation = Some(order);
        }
    }

    let scenario = Scenario::new(doc.states.clone(), joint, bias)?;
    let document = ScenarioFile::from_scenario(&scenario, doc.name.clone());
    Ok(ValidatedScenario {
        scenario,
        document,
        permutation,
        renormalized,
    })
}
