//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::identities::{
    check_identity, CheckReport, FreeScalars, IdentityId, IdentityInstance, IdentityPolicy, Lemma,
};
use crate::numerics::{Backend, Number, Scalar, TruncationPolicy};
use crate::params::ParameterSet;
use crate::series::{eval_f3, ArgumentTriple};
use crate::special::{check_special_case, SpecialCase, SpecialCaseId};
use crate::suite::{run_suite, SuiteConfig, SUITE_SHELL_CAP};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "trihyp", version, about = "Evaluate F^(3) and check its summation formulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate F^(3) for a parameter file at (x1, x2, x3).
    Eval(EvalArgs),
    /// Check one summation formula on an instance file.
    Check(CheckArgs),
    /// Run the seeded randomized suite.
    Suite(SuiteArgs),
    /// List the known identities, special cases and lemmas.
    List,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesFlags {
    /// Largest total degree m1+m2+m3 summed.
    #[arg(long, default_value_t = TruncationPolicy::default().max_total_degree)]
    pub max_degree: usize,
    /// Consecutive negligible shells needed to stop.
    #[arg(long, default_value_t = TruncationPolicy::default().stall_window)]
    pub stall_window: usize,
    #[arg(long, default_value = "float64")]
    pub backend: Backend,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    pub params: PathBuf,
    #[arg(allow_hyphen_values = true)]
    pub x1: String,
    #[arg(allow_hyphen_values = true)]
    pub x2: String,
    #[arg(allow_hyphen_values = true)]
    pub x3: String,
    /// Relative size below which a shell counts as negligible.
    #[arg(long, default_value_t = TruncationPolicy::default().tol)]
    pub tol: f64,
    #[command(flatten)]
    pub series: SeriesFlags,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Identity (e.g. T5c) or special case (FA3, FD3, HA).
    pub id: String,
    pub instance: PathBuf,
    /// Largest accepted relative residual.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Cap on the outer summation index.
    #[arg(long, default_value_t = IdentityPolicy::default().outer_max_degree)]
    pub outer_max_degree: usize,
    #[command(flatten)]
    pub series: SeriesFlags,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = SuiteConfig::default().instances_per_identity)]
    pub instances: usize,
    /// Largest accepted relative residual.
    #[arg(long, default_value_t = SuiteConfig::default().tol)]
    pub tol: f64,
    #[arg(long, default_value_t = IdentityPolicy::default().outer_max_degree)]
    pub outer_max_degree: usize,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Where to write the per-check CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest total degree m1+m2+m3 summed.
    #[arg(long, default_value_t = SUITE_SHELL_CAP)]
    pub max_degree: usize,
    #[arg(long, default_value_t = TruncationPolicy::default().stall_window)]
    pub stall_window: usize,
    #[arg(long, default_value = "float64")]
    pub backend: Backend,
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, CliError>;

impl SeriesFlags {
    fn policy(&self, tol: f64) -> Result<TruncationPolicy, CliError> {
        Ok(TruncationPolicy::new(tol, self.max_degree, self.stall_window)?)
    }
}

/// Runs the parsed command, writing its report to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(&args, out),
        Command::Check(args) => cmd_check(&args, out),
        Command::Suite(args) => cmd_suite(&args, out),
        Command::List => cmd_list(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn parse_number(text: &str) -> Result<Number, CliError> {
    text.parse::<Number>().map_err(|e| CliError::input(format!("'{text}': {e}")))
}

fn emit(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::input(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| CliError::input(e.to_string()))
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult {
    let policy = args.series.policy(args.tol)?;
    let ps: ParameterSet<Number> = serde_json::from_value(read_json(&args.params)?)
        .map_err(|e| CliError::input(format!("{}: {e}", args.params.display())))?;
    let x = ArgumentTriple::new(parse_number(&args.x1)?, parse_number(&args.x2)?, parse_number(&args.x3)?);
    let result = match args.series.backend {
        Backend::Float64 => eval_typed::<f64>(&ps, &x, &policy)?,
        Backend::Rational => eval_typed::<BigRational>(&ps, &x, &policy)?,
    };
    emit(
        out,
        &json!({
            "value": result.value,
            "shells_used": result.shells_used,
            "converged": result.converged,
            "terminated_exactly": result.terminated_exactly,
        }),
    )?;
    Ok(if result.converged { EXIT_PASS } else { EXIT_NOT_CONVERGED })
}

fn eval_typed<S: Scalar>(
    ps: &ParameterSet<Number>,
    x: &ArgumentTriple<Number>,
    policy: &TruncationPolicy,
) -> Result<crate::numerics::EvaluationResult<Number>, CliError> {
    let ps = ParameterSet::<S>::from_number(ps)?;
    let x = ArgumentTriple::<S>::from_number(x)?;
    Ok(eval_f3(&ps, &x, policy)?.to_number())
}

/// Instance file of `check`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    /// A parameter-set object for identities; the function's parameter
    /// list for special cases.
    params: Value,
    #[serde(default)]
    i: Option<usize>,
    #[serde(default)]
    t: Option<Number>,
    #[serde(default)]
    r: Option<Number>,
    #[serde(default)]
    d: Option<Number>,
    x: ArgumentTriple<Number>,
}

enum Target {
    Identity(IdentityId),
    Special(SpecialCaseId),
}

fn valid_ids() -> String {
    IdentityId::ALL
        .iter()
        .map(|id| id.to_string())
        .chain(SpecialCaseId::ALL.iter().map(|id| id.to_string()))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> CliResult {
    let target = if let Ok(id) = args.id.parse::<IdentityId>() {
        Target::Identity(id)
    } else if let Ok(id) = args.id.parse::<SpecialCaseId>() {
        Target::Special(id)
    } else {
        return Err(CliError::input(format!("unknown id '{}'; valid ids: {}", args.id, valid_ids())));
    };
    let policy = IdentityPolicy {
        series: args.series.policy(TruncationPolicy::default().tol)?,
        outer_max_degree: args.outer_max_degree,
    };
    if policy.outer_max_degree < 1 {
        return Err(CliError::input("--outer-max-degree must be at least 1"));
    }
    let file: InstanceFile = serde_json::from_value(read_json(&args.instance)?)
        .map_err(|e| CliError::input(format!("{}: {e}", args.instance.display())))?;
    let report = match args.series.backend {
        Backend::Float64 => check_typed::<f64>(&target, &file, &policy, args.tol)?,
        Backend::Rational => check_typed::<BigRational>(&target, &file, &policy, args.tol)?,
    };
    emit(out, &report)?;
    Ok(report_code(&report))
}

fn report_code(report: &CheckReport<Number>) -> i32 {
    if report.pass {
        return EXIT_PASS;
    }
    match (&report.lhs_diag, &report.rhs_diag) {
        (Some(l), Some(r)) if !(l.converged && r.converged) => EXIT_NOT_CONVERGED,
        (Some(_), Some(_)) => EXIT_FAILED,
        _ => EXIT_INPUT,
    }
}

fn scalar<S: Scalar>(value: &Option<Number>) -> Result<Option<S>, CliError> {
    Ok(value.as_ref().map(S::from_number).transpose()?)
}

fn check_typed<S: Scalar>(
    target: &Target,
    file: &InstanceFile,
    policy: &IdentityPolicy,
    tol: f64,
) -> Result<CheckReport<Number>, CliError> {
    let args = ArgumentTriple::<S>::from_number(&file.x)?;
    let report = match *target {
        Target::Identity(id) => {
            let ps: ParameterSet<Number> = serde_json::from_value(file.params.clone())
                .map_err(|e| CliError::input(format!("params: {e}")))?;
            let inst = IdentityInstance {
                id,
                ps: ParameterSet::<S>::from_number(&ps)?,
                i: file.i,
                scalars: FreeScalars {
                    t: scalar(&file.t)?,
                    r: scalar(&file.r)?,
                    d: scalar(&file.d)?,
                },
                args,
            };
            inst.validate()?;
            check_identity(&inst, policy, tol)
        }
        Target::Special(id) => {
            let values: Vec<Number> = serde_json::from_value(file.params.clone())
                .map_err(|e| CliError::input(format!("params: {e}")))?;
            let values = values.iter().map(S::from_number).collect::<crate::Result<Vec<S>>>()?;
            let case = special_case(id, values)?;
            if file.i.is_some_and(|i| i != 1) || file.r.is_some() || file.d.is_some() {
                return Err(CliError::input(format!("{id} takes only t and x")));
            }
            let t = scalar::<S>(&file.t)?.ok_or_else(|| CliError::input(format!("{id} requires t")))?;
            check_special_case(&case, t, args, policy, tol)
        }
    };
    Ok(report.to_number())
}

fn special_case<S: Scalar>(id: SpecialCaseId, v: Vec<S>) -> Result<SpecialCase<S>, CliError> {
    let expected = match id {
        SpecialCaseId::FA3 => 7,
        SpecialCaseId::FD3 => 5,
        SpecialCaseId::HA => 5,
    };
    let [a, rest @ ..] = v.as_slice() else {
        return Err(CliError::input(format!("{id} expects {expected} parameters")));
    };
    if v.len() != expected {
        return Err(CliError::input(format!("{id} expects {expected} parameters, got {}", v.len())));
    }
    let a = a.clone();
    let r = |k: usize| rest[k].clone();
    Ok(match id {
        SpecialCaseId::FA3 => SpecialCase::FA3 {
            a,
            b: [r(0), r(1), r(2)],
            c: [r(3), r(4), r(5)],
        },
        SpecialCaseId::FD3 => SpecialCase::FD3 {
            a,
            b: [r(0), r(1), r(2)],
            c: r(3),
        },
        SpecialCaseId::HA => SpecialCase::HA {
            a,
            b1: r(0),
            b2: r(1),
            c1: r(2),
            c2: r(3),
        },
    })
}

pub fn cmd_suite(args: &SuiteArgs, out: &mut dyn Write) -> CliResult {
    let config = SuiteConfig {
        seed: args.seed,
        instances_per_identity: args.instances,
        tol: args.tol,
        policy: IdentityPolicy {
            series: TruncationPolicy::new(TruncationPolicy::default().tol, args.max_degree, args.stall_window)?,
            outer_max_degree: args.outer_max_degree,
        },
        backend: args.backend,
        ..SuiteConfig::default()
    };
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::input(e.to_string()))?;
    let report = pool.install(|| run_suite(&config))?;
    if let Some(path) = &args.out {
        let file = fs::File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        report.write_csv(file)?;
    }
    emit(out, &report.summary)?;
    Ok(if report.summary.all_pass {
        EXIT_PASS
    } else if report.only_convergence_failures() {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_FAILED
    })
}

pub fn cmd_list(out: &mut dyn Write) -> CliResult {
    let identities: Vec<Value> = IdentityId::ALL
        .iter()
        .map(|id| {
            json!({
                "id": id.as_str(),
                "label": id.label(),
                "family": id.family().map(|f| f.name()),
                "scalars": id.scalars().iter().map(|s| s.name()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let special: Vec<Value> = SpecialCaseId::ALL
        .iter()
        .map(|id| json!({ "id": id.as_str(), "identity": id.identity().as_str() }))
        .collect();
    let lemmas: Vec<&str> = Lemma::ALL.iter().map(|l| l.name()).collect();
    emit(
        out,
        &json!({ "identities": identities, "special_cases": special, "lemmas": lemmas }),
    )?;
    Ok(EXIT_PASS)
}
