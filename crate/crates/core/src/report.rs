//! Versioned, machine-readable reports.
//!
//! Every section is optional; which ones appear depends on the command and on
//! the scenario shape. Numbers are reproducible from the scenario file and the
//! flags alone.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::binary::BinarySolution;
use crate::delegation::{delegation_decision, DelegationReport};
use crate::design::{floor_representative, ideal_deviation, solve_design, DesignSolution, Method, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{payoff_terms, JointDistribution, PayoffTerms, Scenario, ValidatedScenario};
use crate::montecarlo::{MonteCarloConfig, MonteCarloEstimate};
use crate::oracle::{self, OracleResult};
use crate::order::{self, association_floor_check, ConfidenceClass, ConfidenceTag};
use crate::transfers::{self, ContractSolution, IcReport};
use crate::truthnoise::{
    self, TruthNoiseDelegation, TruthNoiseFile, TruthNoiseMoments, TruthNoiseScenario,
    TruthNoiseSolution, TruthNoiseTransfers,
};

pub const SCHEMA: &str = "belief-design/report/v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Payoff slack allowed when an oracle sample beats the solver.
pub const ORACLE_PAYOFF_TOLERANCE: f64 = 1e-6;
/// Monte Carlo estimates further than this many standard errors fail.
pub const MONTE_CARLO_Z: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub scenario: ScenarioEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinarySolution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfers: Option<TransfersSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delegation: Option<DelegationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truthnoise: Option<TruthNoiseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Joint,
    TruthNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEcho {
    pub kind: ScenarioKind,
    /// SHA-256 of the compact JSON of `document`.
    pub sha256: String,
    pub n_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_signals: Option<usize>,
    /// Normalized document; re-validates to the same scenario without flags.
    pub document: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSection {
    pub valid: bool,
    /// `permutation[j]` is the original signal column now at position `j` (0-based).
    pub permutation: Option<Vec<usize>>,
    pub renormalized: bool,
    pub posterior_means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub tag: ConfidenceTag,
    /// The elementary-transformation matrix `t`, row by row.
    pub evidence: Vec<Vec<f64>>,
    pub violating_cell: Option<(usize, usize)>,
}

impl From<&ConfidenceClass> for ClassSummary {
    fn from(c: &ConfidenceClass) -> Self {
        Self {
            tag: c.tag,
            evidence: c.evidence.to_rows(),
            violating_cell: c.violating_cell,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSection {
    pub method: Method,
    pub classification: ClassSummary,
    pub g_star: Vec<Vec<f64>>,
    pub delta_star: Vec<f64>,
    pub ideal_delta: Vec<f64>,
    pub payoff: f64,
    pub payoff_terms: PayoffTerms,
    pub truth_payoff: f64,
    pub foc_residual: f64,
    pub interior: bool,
    pub phi: Option<Vec<f64>>,
    pub duality_gap: Option<f64>,
    pub iterations: usize,
    /// Whether `g_star` weakly dominates the independent coupling.
    pub above_independence: bool,
    /// An optimum inducing the same actions that does dominate it, when the
    /// returned one does not and such beliefs exist.
    pub floor_representative: Option<Vec<Vec<f64>>>,
}

impl DesignSection {
    pub fn new(sc: &Scenario, sol: &DesignSolution) -> Result<Self> {
        let above_independence = association_floor_check(sc.joint(), &sol.g_star)?;
        let floor_representative = if above_independence {
            None
        } else {
            floor_representative(sc, &sol.g_star)?.map(|h| h.to_rows())
        };
        Ok(Self {
            method: sol.method,
            classification: (&sol.classification).into(),
            g_star: sol.g_star.to_rows(),
            delta_star: sol.delta_star.delta.clone(),
            ideal_delta: ideal_deviation(sc).delta,
            payoff: sol.payoff,
            payoff_terms: sol.payoff_terms,
            truth_payoff: payoff_terms(sc, sc.joint())?.payoff(),
            foc_residual: sol.foc_residual,
            interior: sol.interior,
            phi: sol.phi.as_ref().map(|p| p.as_slice().to_vec()),
            duality_gap: sol.duality_gap,
            iterations: sol.iterations,
            above_independence,
            floor_representative,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSection {
    /// `design_optimum` or `beliefs_file`.
    pub against: String,
    pub class: ClassSummary,
    /// Whether the beliefs weakly dominate the independent coupling.
    pub above_independence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
            exit_code: e.exit_code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransfersSection {
    pub contract: Option<ContractSolution>,
    pub contract_ic: Option<IcReport>,
    /// Why no contract was produced.
    pub error: Option<ErrorInfo>,
    pub benchmark: ContractSolution,
    pub benchmark_ic: IcReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthNoiseSection {
    pub rho: f64,
    pub moments: TruthNoiseMoments,
    pub solution: TruthNoiseSolution,
    pub transfers: TruthNoiseTransfers,
    pub delegation: TruthNoiseDelegation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub solver: f64,
    pub oracle: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_scan: Option<OracleResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polytope_scan: Option<OracleResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulated_payoff: Option<MonteCarloEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contract_scan: Option<OracleResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_scan: Option<OracleResult>,
    pub checks: Vec<OracleCheck>,
}

impl OracleSection {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sign: f64,
    pub gap: f64,
    pub foc: f64,
    pub max_iterations: usize,
    pub ic: f64,
    pub oracle_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub tolerances: Tolerances,
    pub methods: Vec<String>,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// Settings shared by every report builder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub solver: SolverConfig,
    pub oracle_check: bool,
    pub budget: usize,
    pub monte_carlo: MonteCarloConfig,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            oracle_check: false,
            budget: oracle::DEFAULT_BUDGET,
            monte_carlo: MonteCarloConfig::default(),
        }
    }
}

/// Which sections a joint-scenario report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sections {
    pub validation: bool,
    pub design: bool,
    pub transfers: bool,
    pub delegation: bool,
}

impl Sections {
    pub const ALL: Self = Self {
        validation: true,
        design: true,
        transfers: true,
        delegation: true,
    };
    pub const NONE: Self = Self {
        validation: false,
        design: false,
        transfers: false,
        delegation: false,
    };
}

fn sha256_hex(document: &Value) -> String {
    let digest = Sha256::digest(document.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn echo_joint(v: &ValidatedScenario) -> ScenarioEcho {
    let document = serde_json::to_value(&v.document).expect("scenario documents serialize");
    ScenarioEcho {
        kind: ScenarioKind::Joint,
        sha256: sha256_hex(&document),
        n_states: v.scenario.n_states(),
        n_signals: Some(v.scenario.n_signals()),
        document,
    }
}

pub fn echo_truth_noise(file: &TruthNoiseFile, tn: &TruthNoiseScenario) -> ScenarioEcho {
    let document = serde_json::to_value(file).expect("truth-noise documents serialize");
    ScenarioEcho {
        kind: ScenarioKind::TruthNoise,
        sha256: sha256_hex(&document),
        n_states: tn.states().len(),
        n_signals: None,
        document,
    }
}

fn diagnostics(options: &ReportOptions) -> Diagnostics {
    Diagnostics {
        tolerances: Tolerances {
            sign: options.solver.sign_tolerance,
            gap: options.solver.gap_tolerance,
            foc: options.solver.foc_tolerance,
            max_iterations: options.solver.max_iterations,
            ic: transfers::IC_TOLERANCE,
            oracle_payoff: ORACLE_PAYOFF_TOLERANCE,
        },
        methods: Vec::new(),
        seed: options.monte_carlo.seed,
        notes: Vec::new(),
    }
}

fn empty_report(command: &str, scenario: ScenarioEcho, options: &ReportOptions) -> Report {
    Report {
        schema: SCHEMA.into(),
        tool_version: TOOL_VERSION.into(),
        command: command.into(),
        scenario,
        validation: None,
        design: None,
        binary: None,
        classification: None,
        transfers: None,
        delegation: None,
        truthnoise: None,
        oracle: None,
        diagnostics: diagnostics(options),
    }
}

fn check(name: &str, solver: f64, oracle: f64, tolerance: f64, pass: bool) -> OracleCheck {
    OracleCheck {
        name: name.into(),
        solver,
        oracle,
        delta: oracle - solver,
        tolerance,
        pass,
    }
}

/// Report on a joint-distribution scenario with the requested sections.
pub fn joint_report(
    command: &str,
    v: &ValidatedScenario,
    sections: Sections,
    options: &ReportOptions,
) -> Result<Report> {
    let sc = &v.scenario;
    let mut report = empty_report(command, echo_joint(v), options);
    if sections.validation {
        report.validation = Some(ValidationSection {
            valid: true,
            permutation: v.permutation.clone(),
            renormalized: v.renormalized,
            posterior_means: sc.posterior_means(),
        });
        if v.renormalized {
            report
                .diagnostics
                .notes
                .push("joint probabilities renormalized to unit mass".into());
        }
    }
    let design = if sections.design || sections.delegation || options.oracle_check {
        Some(solve_design(sc, &options.solver)?)
    } else {
        None
    };
    if let (true, Some(sol)) = (sections.design, &design) {
        report.design = Some(DesignSection::new(sc, sol)?);
        report.binary = sol.binary.clone();
        report.diagnostics.methods.push(format!("design:{:?}", sol.method));
        if let Some(b) = &sol.binary {
            if b.clamped {
                report.diagnostics.notes.push(format!(
                    "ideal confidence {} lies outside [{}, {}]; optimum is on the boundary",
                    b.tau_star_interior, b.tau_lower, b.tau_upper
                ));
            }
        }
    }
    if sections.transfers {
        report.transfers = Some(transfers_section(sc)?);
    }
    if sections.delegation {
        let d = delegation_decision(sc, &options.solver)?;
        if d.threshold_agrees == Some(false) {
            report
                .diagnostics
                .notes
                .push("delegation threshold disagrees with the direct payoff comparison".into());
        }
        report.delegation = Some(d);
    }
    if options.oracle_check {
        let sol = design.as_ref().expect("design solved when oracle checks are on");
        report.oracle = Some(joint_oracle(sc, sol, sections.transfers, options)?);
    }
    Ok(report)
}

fn transfers_section(sc: &Scenario) -> Result<TransfersSection> {
    let benchmark = transfers::well_calibrated_benchmark(sc)?;
    let benchmark_ic = transfers::verify_ic(sc, &benchmark)?;
    let (contract, contract_ic, error) = match transfers::solve_with_transfers(sc) {
        Ok(c) => {
            let ic = transfers::verify_ic(sc, &c)?;
            (Some(c), Some(ic), None)
        }
        Err(e @ Error::HypothesisViolated { .. }) => (None, None, Some(ErrorInfo::from(&e))),
        Err(e) => return Err(e),
    };
    Ok(TransfersSection {
        contract,
        contract_ic,
        error,
        benchmark,
        benchmark_ic,
    })
}

/// Oracle cross-checks of the design (and, for 2×2, of the contract).
pub fn joint_oracle(
    sc: &Scenario,
    sol: &DesignSolution,
    with_contract: bool,
    options: &ReportOptions,
) -> Result<OracleSection> {
    let mut section = OracleSection::default();
    let poly = oracle::scan_polytope(sc, options.budget, options.monte_carlo.seed)?;
    section.checks.push(check(
        "polytope_scan_not_above_solver",
        sol.payoff,
        poly.best_value,
        ORACLE_PAYOFF_TOLERANCE,
        poly.best_value <= sol.payoff + ORACLE_PAYOFF_TOLERANCE,
    ));
    section.polytope_scan = Some(poly);
    if let Some(b) = &sol.binary {
        let scan = oracle::scan_tau(sc, oracle::DEFAULT_TAU_POINTS)?;
        section.checks.push(check(
            "tau_scan_argmax",
            b.tau_star,
            scan.best_point[0],
            scan.resolution,
            (scan.best_point[0] - b.tau_star).abs() <= scan.resolution,
        ));
        section.tau_scan = Some(scan);
        if with_contract {
            if let Ok(c) = transfers::solve_with_transfers(sc) {
                let scan = oracle::scan_contract(sc, 101, 41)?;
                section.checks.push(check(
                    "contract_scan_not_above_closed_form",
                    c.total_payoff,
                    scan.best_value,
                    1e-9,
                    scan.best_value <= c.total_payoff + 1e-9,
                ));
                section.contract_scan = Some(scan);
            }
        }
    }
    let mc = oracle::simulate_payoff(sc, &sol.g_star, &options.monte_carlo)?;
    section.checks.push(check(
        "simulated_payoff",
        sol.payoff,
        mc.estimate,
        MONTE_CARLO_Z * mc.std_error,
        mc.z_score(sol.payoff) <= MONTE_CARLO_Z,
    ));
    section.simulated_payoff = Some(mc);
    Ok(section)
}

/// Classification of `beliefs` (or of the design optimum) against the truth.
pub fn classification_section(
    sc: &Scenario,
    beliefs: Option<&JointDistribution>,
    options: &ReportOptions,
) -> Result<ClassificationSection> {
    let (g, against) = match beliefs {
        Some(g) => (g.clone(), "beliefs_file"),
        None => (solve_design(sc, &options.solver)?.g_star, "design_optimum"),
    };
    let class = order::concordance_compare_with_tolerance(sc.joint(), &g, options.solver.sign_tolerance)?;
    Ok(ClassificationSection {
        against: against.into(),
        class: (&class).into(),
        above_independence: order::association_floor_check(sc.joint(), &g)?,
    })
}

pub fn classify_report(
    v: &ValidatedScenario,
    beliefs: Option<&JointDistribution>,
    options: &ReportOptions,
) -> Result<Report> {
    let mut report = empty_report("classify", echo_joint(v), options);
    report.classification = Some(classification_section(&v.scenario, beliefs, options)?);
    Ok(report)
}

pub fn truth_noise_section(tn: &TruthNoiseScenario) -> Result<TruthNoiseSection> {
    Ok(TruthNoiseSection {
        rho: tn.rho(),
        moments: tn.moments(),
        solution: truthnoise::solve_truth_noise(tn)?,
        transfers: truthnoise::truth_noise_transfers(tn)?,
        delegation: truthnoise::truth_noise_delegation(tn)?,
    })
}

pub fn truth_noise_report(
    command: &str,
    file: &TruthNoiseFile,
    tn: &TruthNoiseScenario,
    options: &ReportOptions,
) -> Result<Report> {
    let mut report = empty_report(command, echo_truth_noise(file, tn), options);
    let section = truth_noise_section(tn)?;
    report
        .diagnostics
        .methods
        .push(format!("truthnoise:{:?}", section.solution.regime));
    if !section.delegation.agrees {
        report
            .diagnostics
            .notes
            .push("threshold decision disagrees with the direct payoff comparison".into());
    }
    if section.transfers.applies && !section.transfers.ic_holds {
        report
            .diagnostics
            .notes
            .push("flat wage fails incentive compatibility on this grid".into());
    }
    if options.oracle_check {
        report.oracle = Some(truth_noise_oracle(tn, &section.solution, options)?);
    }
    report.truthnoise = Some(section);
    Ok(report)
}

pub fn truth_noise_oracle(
    tn: &TruthNoiseScenario,
    sol: &TruthNoiseSolution,
    options: &ReportOptions,
) -> Result<OracleSection> {
    let mut section = OracleSection::default();
    let scan = oracle::scan_kappa(tn, oracle::DEFAULT_KAPPA_POINTS)?;
    section.checks.push(check(
        "kappa_scan_argmax",
        sol.kappa_star,
        scan.best_point[0],
        scan.resolution,
        (scan.best_point[0] - sol.kappa_star).abs() <= scan.resolution,
    ));
    section.kappa_scan = Some(scan);
    let mc = truthnoise::simulate_truth_noise_payoff(tn, sol.kappa_star, &options.monte_carlo)?;
    section.checks.push(check(
        "simulated_payoff",
        sol.payoff,
        mc.estimate,
        MONTE_CARLO_Z * mc.std_error,
        mc.z_score(sol.payoff) <= MONTE_CARLO_Z,
    ));
    section.simulated_payoff = Some(mc);
    Ok(section)
}

/// `true` when the raw JSON looks like a truth-or-noise document.
pub fn is_truth_noise_document(value: &Value) -> bool {
    value.get("rho").is_some()
}
