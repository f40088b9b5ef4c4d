//! Command-line front end.
//!
//! Every command reads one scenario file and writes one JSON report. Errors go
//! to stderr as JSON and set the exit code: 1 usage, 2 invalid input,
//! 3 hypothesis violation, 4 convergence failure.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::design::SolverConfig;
use crate::error::{Error, Result};
use crate::model::{number_array, validate_document, JointDistribution, ScenarioFile, ValidatedScenario, ValidationOptions};
use crate::montecarlo::{self, MonteCarloConfig};
use crate::oracle;
use crate::order::SIGN_TOLERANCE;
use crate::report::{
    classify_report, is_truth_noise_document, joint_report, truth_noise_report, ErrorInfo, Report,
    ReportOptions, Sections,
};
use crate::transfers;
use crate::truthnoise::TruthNoiseFile;

#[derive(Debug, Parser)]
#[command(name = "belief-design", version, about = "Design the beliefs of a biased agent")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Sign tolerance used when classifying confidence.
    #[arg(long, global = true, default_value_t = SIGN_TOLERANCE)]
    pub tolerance: f64,
    /// Frank-Wolfe duality-gap tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub gap_tolerance: f64,
    /// Frank-Wolfe iteration cap.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_iterations: usize,
    /// Tolerance on the first-order-condition residual.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub foc_tolerance: f64,
    /// Seed for every random oracle.
    #[arg(long, global = true, default_value_t = montecarlo::DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo draws.
    #[arg(long, global = true, default_value_t = montecarlo::DEFAULT_DRAWS)]
    pub draws: u64,
    /// Random samples for the polytope scan.
    #[arg(long, global = true, default_value_t = oracle::DEFAULT_BUDGET)]
    pub budget: usize,
    /// Reorder signals by posterior mean instead of rejecting the file.
    #[arg(long, global = true)]
    pub relabel_signals: bool,
    /// Cross-check solver output against brute-force oracles.
    #[arg(long, global = true)]
    pub oracle_check: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file and echo its normalized form.
    Validate { input: PathBuf },
    /// Solve the belief-design problem.
    Solve { input: PathBuf },
    /// Classify beliefs (the design optimum unless --beliefs is given) against the truth.
    Classify {
        input: PathBuf,
        /// JSON file with a `joint` matrix to classify.
        #[arg(long)]
        beliefs: Option<PathBuf>,
    },
    /// Optimal contract with transfers (two states, two signals).
    Transfers { input: PathBuf },
    /// Delegate or centralize.
    Delegate { input: PathBuf },
    /// Solve a truth-or-noise scenario.
    TruthNoise { input: PathBuf },
    /// Run the brute-force oracles and compare.
    Oracle { input: PathBuf },
    /// Every applicable section in one report.
    Report { input: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Solve { .. } => "solve",
            Command::Classify { .. } => "classify",
            Command::Transfers { .. } => "transfers",
            Command::Delegate { .. } => "delegate",
            Command::TruthNoise { .. } => "truth-noise",
            Command::Oracle { .. } => "oracle",
            Command::Report { .. } => "report",
        }
    }

    fn input(&self) -> &Path {
        match self {
            Command::Validate { input }
            | Command::Solve { input }
            | Command::Classify { input, .. }
            | Command::Transfers { input }
            | Command::Delegate { input }
            | Command::TruthNoise { input }
            | Command::Oracle { input }
            | Command::Report { input } => input,
        }
    }
}

impl GlobalArgs {
    fn options(&self) -> ReportOptions {
        ReportOptions {
            solver: SolverConfig {
                gap_tolerance: self.gap_tolerance,
                max_iterations: self.max_iterations,
                foc_tolerance: self.foc_tolerance,
                sign_tolerance: self.tolerance,
            },
            oracle_check: self.oracle_check,
            budget: self.budget,
            monte_carlo: MonteCarloConfig {
                draws: self.draws,
                seed: self.seed,
                ..MonteCarloConfig::default()
            },
        }
    }

    fn validation(&self) -> ValidationOptions {
        ValidationOptions {
            relabel_signals: self.relabel_signals,
        }
    }
}

/// A parsed input file of either kind.
enum Input {
    Joint(ValidatedScenario),
    TruthNoise(TruthNoiseFile),
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut raw = String::new();
        std::io::stdin()
            .read_to_string(&mut raw)
            .map_err(|e| Error::Io(format!("stdin: {e}")))?;
        return Ok(raw);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse {
        key: "<document>".into(),
        message: e.to_string(),
    })
}

fn load(path: &Path, options: ValidationOptions) -> Result<Input> {
    let value = read_json(path)?;
    if is_truth_noise_document(&value) {
        let doc = TruthNoiseFile::from_value(&value)?;
        doc.to_scenario()?;
        Ok(Input::TruthNoise(doc))
    } else {
        Ok(Input::Joint(validate_document(ScenarioFile::from_value(&value)?, options)?))
    }
}

fn load_beliefs(path: &Path) -> Result<JointDistribution> {
    let value = read_json(path)?;
    let rows = value
        .get("joint")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse {
            key: "joint".into(),
            message: "missing key or not an array".into(),
        })?;
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| number_array(Some(r), &format!("joint[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    JointDistribution::from_rows(&rows)
}

fn require_joint(input: Input, command: &str) -> Result<ValidatedScenario> {
    match input {
        Input::Joint(v) => Ok(v),
        Input::TruthNoise(_) => Err(Error::InvalidInput(format!(
            "`{command}` needs a joint-distribution scenario, not a truth-or-noise document"
        ))),
    }
}

fn truth_noise(command: &str, doc: &TruthNoiseFile, options: &ReportOptions) -> Result<Report> {
    truth_noise_report(command, doc, &doc.to_scenario()?, options)
}

/// Builds the report for an already parsed command line.
pub fn execute(cli: &Cli) -> Result<Report> {
    let command = cli.command.name();
    let mut options = cli.global.options();
    let input = load(cli.command.input(), cli.global.validation())?;
    match (&cli.command, input) {
        (Command::Validate { .. }, Input::Joint(v)) => joint_report(
            command,
            &v,
            Sections {
                validation: true,
                ..Sections::NONE
            },
            &ReportOptions {
                oracle_check: false,
                ..options
            },
        ),
        (Command::Validate { .. }, Input::TruthNoise(doc)) => {
            let tn = doc.to_scenario()?;
            let mut r = truth_noise_report(command, &doc, &tn, &ReportOptions {
                oracle_check: false,
                ..options
            })?;
            r.truthnoise = None;
            r.diagnostics.methods.clear();
            r.diagnostics.notes.clear();
            Ok(r)
        }
        (Command::Solve { .. }, Input::Joint(v)) => joint_report(
            command,
            &v,
            Sections {
                design: true,
                ..Sections::NONE
            },
            &options,
        ),
        (Command::Classify { beliefs, .. }, input) => {
            let v = require_joint(input, command)?;
            let beliefs = beliefs.as_deref().map(load_beliefs).transpose()?;
            classify_report(&v, beliefs.as_ref(), &options)
        }
        (Command::Transfers { .. }, input) => {
            let v = require_joint(input, command)?;
            // surface hypothesis violations as errors
            transfers::solve_with_transfers(&v.scenario)?;
            joint_report(
                command,
                &v,
                Sections {
                    transfers: true,
                    ..Sections::NONE
                },
                &options,
            )
        }
        (Command::Delegate { .. }, Input::Joint(v)) => joint_report(
            command,
            &v,
            Sections {
                delegation: true,
                ..Sections::NONE
            },
            &options,
        ),
        (Command::TruthNoise { .. }, Input::Joint(_)) => Err(Error::Parse {
            key: "rho".into(),
            message: "missing key; not a truth-or-noise document".into(),
        }),
        (Command::Oracle { .. }, Input::Joint(v)) => {
            options.oracle_check = true;
            joint_report(
                command,
                &v,
                Sections {
                    transfers: v.scenario.is_binary(),
                    ..Sections::NONE
                },
                &options,
            )
        }
        (Command::Oracle { .. }, Input::TruthNoise(doc)) => {
            options.oracle_check = true;
            truth_noise(command, &doc, &options)
        }
        (Command::Report { .. }, Input::Joint(v)) => {
            let mut r = joint_report(
                command,
                &v,
                Sections {
                    transfers: v.scenario.is_binary(),
                    ..Sections::ALL
                },
                &options,
            )?;
            r.classification = Some(crate::report::classification_section(&v.scenario, None, &options)?);
            Ok(r)
        }
        (_, Input::TruthNoise(doc)) => truth_noise(command, &doc, &options),
    }
}

fn render(report: &Report, pretty: bool) -> String {
    let text = if pretty {
        serde_json::to_string_pretty(report)
    } else {
        serde_json::to_string(report)
    };
    text.expect("reports serialize")
}

fn emit(report: &Report, global: &GlobalArgs) -> Result<()> {
    let mut text = render(report, global.pretty);
    text.push('\n');
    match &global.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(format!("stdout: {e}"))),
    }
}

fn report_error(e: &Error) -> i32 {
    let body = serde_json::json!({ "error": ErrorInfo::from(e) });
    eprintln!("{body}");
    e.exit_code()
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|r| emit(&r, &cli.global)) {
        Ok(()) => 0,
        Err(e) => report_error(&e),
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
