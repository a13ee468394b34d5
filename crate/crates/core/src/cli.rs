//! `nlpot` command line: argument parsing, dispatch and report output.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{
    dyadic_upper, exact_radial, integral_estimate, variational_radial, CapacityMethod, CapacityQuery,
    VariationalOptions,
};
use crate::classify::{classify, Question, Verdict};
use crate::error::{Error, Result};
use crate::examples::{run_suite, ExampleId, ExampleReport, SuiteConfig};
use crate::exponents::{
    analytic_exponents, critical_exponents, empirical_exponents, CriticalExponents, ExponentReport,
};
use crate::green::{lnorm_gradient, lnorm_u, GreenProfile, NormResult};
use crate::measures::{AssumptionProfile, Model, ModelSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nlpot", version, about = "Capacities, Green profiles and integrability verdicts at a point")]
pub struct Cli {
    /// Model spec: a JSON file path, or inline JSON starting with '{'.
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative tolerance for value comparisons.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponent endpoints at the origin and critical exponents at p.
    Exponents(ExponentsArgs),
    /// Annulus capacities over a sweep of radii.
    Capacity(CapacityArgs),
    /// Green profile u and gradient g on a log grid in (0, 1].
    GreenProfile(GreenProfileArgs),
    /// L^tau norms of u and L^t norms of its gradient.
    GreenNorms(GreenNormsArgs),
    /// Verdicts for the classification questions.
    Classify(ClassifyArgs),
    /// Re-run the worked-example tables; exit 1 on any failing row.
    VerifyExamples(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub p: Option<f64>,
    /// Append a least-squares fit of ln f against ln ρ.
    #[arg(long)]
    pub empirical: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub r_lo: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub r_hi: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Integral,
    Exact,
    Dyadic,
    Variational,
    All,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub p: f64,
    /// Inner radii (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<f64>,
    /// Outer radii (comma separated); pairs with r ≥ R are skipped.
    #[arg(long = "R", value_delimiter = ',', required = true)]
    pub big_r: Vec<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Elements of the variational grid.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct GreenProfileArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Scale u by ω^{1/(1-p)} so superlevel sets have capacity b^{1-p}.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Args)]
pub struct GreenNormsArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_delimiter = ',')]
    pub tau: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuestionArg {
    SingletonZero,
    IsParabolic,
    GreenBounded,
    GreenInLtau,
    GradientInLt,
}

impl From<QuestionArg> for Question {
    fn from(q: QuestionArg) -> Self {
        match q {
            QuestionArg::SingletonZero => Question::SingletonZero,
            QuestionArg::IsParabolic => Question::IsParabolic,
            QuestionArg::GreenBounded => Question::GreenBounded,
            QuestionArg::GreenInLtau => Question::GreenInLtau,
            QuestionArg::GradientInLt => Question::GradientInLt,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum, required = true)]
    pub question: Vec<QuestionArg>,
    /// Exponent for green-in-ltau ("inf" allowed).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Exponent for gradient-in-lt.
    #[arg(long)]
    pub t: Option<f64>,
    /// Declared Poincaré exponent at the origin (repeatable).
    #[arg(long)]
    pub poincare: Vec<f64>,
    /// Declared Poincaré exponent for large radii (repeatable).
    #[arg(long)]
    pub poincare_large: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run a single example: ex-power, ex-log, ex-log-2, newtonian, parabolicity-grid.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, hide = true)]
    pub inject_beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentsOutput {
    pub report: ExponentReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<CriticalExponents>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical: Option<ExponentReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub p: f64,
    pub method: CapacityMethod,
    /// Absent when the method cannot produce a value for this annulus.
    pub value: Option<f64>,
    pub error_estimate: Option<f64>,
    pub hypothesis_ok: bool,
    /// Value divided by the preferred method's value on the same annulus.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub rho: f64,
    pub u: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(flatten)]
    pub norm: NormResult,
    pub verdict_basis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub pass: bool,
    pub examples: Vec<ExampleReport>,
}

/// Parses `args`, runs the command and writes the report. Returns the exit
/// code; diagnostics go to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok((text, ok)) => {
            if let Err(e) = emit(&cli, &text) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            if ok {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Invalid(_) | Error::Spec(_) | Error::UnsupportedAsymptotics(_) => EXIT_USAGE,
        Error::Quadrature(_) | Error::SolverDivergence(_) => EXIT_VERIFY_FAILED,
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs the parsed command, returning the rendered report and whether it
/// counts as success.
pub fn execute(cli: &Cli) -> Result<(String, bool)> {
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::invalid(format!("--tol must be positive, got {tol}")));
        }
    }
    match &cli.command {
        Command::VerifyExamples(a) => verify(cli, a),
        cmd => {
            let model = load_model(cli.model.as_deref())?;
            let text = match cmd {
                Command::Exponents(a) => exponents(cli.format, &model, a)?,
                Command::Capacity(a) => capacity(cli.format, &model, a)?,
                Command::GreenProfile(a) => green_profile(cli.format, &model, a)?,
                Command::GreenNorms(a) => green_norms(cli.format, &model, a)?,
                Command::Classify(a) => classify_cmd(cli.format, &model, a)?,
                Command::VerifyExamples(_) => unreachable!(),
            };
            Ok((text, true))
        }
    }
}

pub fn load_model(spec: Option<&str>) -> Result<Model> {
    let spec = spec.ok_or_else(|| Error::invalid("--model is required for this command"))?;
    let text = if spec.trim_start().starts_with('{') {
        spec.to_owned()
    } else {
        std::fs::read_to_string(spec).map_err(|e| Error::Spec(format!("cannot read {spec}: {e}")))?
    };
    ModelSpec::from_json(&text)?.build()
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn exponents(format: Format, model: &Model, a: &ExponentsArgs) -> Result<String> {
    let report = analytic_exponents(&model.growth)?;
    let critical = a.p.map(|p| critical_exponents(&report, p)).transpose()?;
    let empirical =
        if a.empirical { Some(empirical_exponents(&model.growth, a.r_lo, a.r_hi, a.samples)?) } else { None };
    let out = ExponentsOutput { report, critical, empirical };
    match format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = String::from("source,ls0,us0,lq0,uq0,p,tau_p,t_p,q_hat\n");
            let crit = out.critical;
            for rep in std::iter::once(&out.report).chain(out.empirical.as_ref()) {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    serde_json::to_value(rep.source).unwrap().as_str().unwrap_or(""),
                    rep.ls0,
                    rep.us0,
                    rep.lq0,
                    rep.uq0,
                    opt(crit.map(|c| c.p)),
                    opt(crit.and_then(|c| c.tau_p)),
                    opt(crit.map(|c| c.t_p)),
                    opt(crit.map(|c| c.q_hat)),
                );
            }
            Ok(s)
        }
    }
}

fn methods_for(model: &Model, arg: MethodArg) -> Vec<CapacityMethod> {
    let radial = model.radial.is_some();
    match arg {
        MethodArg::Auto if radial => vec![CapacityMethod::ExactRadial],
        MethodArg::Auto => vec![CapacityMethod::IntegralEstimate],
        MethodArg::Integral => vec![CapacityMethod::IntegralEstimate],
        MethodArg::Exact => vec![CapacityMethod::ExactRadial],
        MethodArg::Dyadic => vec![CapacityMethod::DyadicUpper],
        MethodArg::Variational => vec![CapacityMethod::Variational],
        MethodArg::All if radial => vec![
            CapacityMethod::IntegralEstimate,
            CapacityMethod::ExactRadial,
            CapacityMethod::DyadicUpper,
            CapacityMethod::Variational,
        ],
        MethodArg::All => vec![CapacityMethod::IntegralEstimate, CapacityMethod::DyadicUpper],
    }
}

fn capacity_value(
    model: &Model,
    method: CapacityMethod,
    q: &CapacityQuery,
    grid: usize,
) -> Result<Option<(f64, f64, bool)>> {
    let need_radial =
        || model.radial.ok_or_else(|| Error::invalid(format!("method {} needs a radial model", method.tag())));
    let res = match method {
        CapacityMethod::IntegralEstimate => integral_estimate(&model.growth, q)?,
        CapacityMethod::ExactRadial => exact_radial(&need_radial()?, q)?,
        CapacityMethod::DyadicUpper => {
            if !q.separated() {
                return Ok(None);
            }
            dyadic_upper(&model.growth, q)?
        }
        CapacityMethod::Variational => {
            variational_radial(&need_radial()?, q, &VariationalOptions::with_n(grid))?.result
        }
        CapacityMethod::InterpolationLower => unreachable!("not offered on the command line"),
    };
    Ok(Some((res.value, res.abs_error_estimate, res.hypothesis_ok)))
}

pub fn capacity_rows(model: &Model, a: &CapacityArgs) -> Result<Vec<CapacityRow>> {
    if a.grid < 16 {
        return Err(Error::invalid(format!("--grid must be at least 16, got {}", a.grid)));
    }
    let methods = methods_for(model, a.method);
    let mut queries = Vec::new();
    for &r in &a.r {
        for &big_r in &a.big_r {
            if r < big_r {
                queries.push(CapacityQuery::new(a.p, r, big_r)?);
            }
        }
    }
    if queries.is_empty() {
        return Err(Error::invalid("no (r, R) pair with r < R in the sweep"));
    }
    let reference = if model.radial.is_some() { CapacityMethod::ExactRadial } else { CapacityMethod::IntegralEstimate };
    let blocks: Vec<Vec<CapacityRow>> = queries
        .par_iter()
        .map(|q| {
            let ref_value =
                if methods.len() > 1 { capacity_value(model, reference, q, a.grid)?.map(|v| v.0) } else { None };
            methods
                .iter()
                .map(|&method| {
                    let v = capacity_value(model, method, q, a.grid)?;
                    Ok(CapacityRow {
                        r: q.r,
                        big_r: q.big_r,
                        p: q.p,
                        method,
                        value: v.map(|x| x.0),
                        error_estimate: v.map(|x| x.1),
                        hypothesis_ok: v.map(|x| x.2).unwrap_or(false),
                        ratio: match (v, ref_value) {
                            (Some(x), Some(r)) => Some(x.0 / r),
                            _ => None,
                        },
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

fn capacity(format: Format, model: &Model, a: &CapacityArgs) -> Result<String> {
    let rows = capacity_rows(model, a)?;
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("r,R,p,method,value,error_estimate,hypothesis_ok,ratio\n");
            for row in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    row.r,
                    row.big_r,
                    row.p,
                    row.method.tag(),
                    opt(row.value),
                    opt(row.error_estimate),
                    row.hypothesis_ok,
                    opt(row.ratio)
                );
            }
            Ok(s)
        }
    }
}

fn green_profile(format: Format, model: &Model, a: &GreenProfileArgs) -> Result<String> {
    let m = model.radial.ok_or_else(|| Error::invalid("green-profile needs a radial model"))?;
    if a.points < 2 {
        return Err(Error::invalid("--points must be at least 2"));
    }
    if !(a.rho_min > 0.0 && a.rho_min < 1.0) {
        return Err(Error::invalid(format!("--rho-min must lie in (0, 1), got {}", a.rho_min)));
    }
    let profile = GreenProfile::new(m, a.p)?;
    let lo = a.rho_min.ln();
    let rows: Vec<ProfileRow> = (0..a.points)
        .into_par_iter()
        .map(|i| {
            let rho = if i + 1 == a.points { 1.0 } else { (lo * (1.0 - i as f64 / (a.points - 1) as f64)).exp() };
            let u = if a.normalized { profile.normalized_value(rho)? } else { profile.value(rho)? };
            Ok(ProfileRow { rho, u, g: profile.gradient(rho)? })
        })
        .collect::<Result<_>>()?;
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("rho,u,g\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{}", r.rho, r.u, r.g);
            }
            Ok(s)
        }
    }
}

fn green_norms(format: Format, model: &Model, a: &GreenNormsArgs) -> Result<String> {
    let m = model.radial.ok_or_else(|| Error::invalid("green-norms needs a radial model"))?;
    if a.tau.is_empty() && a.t.is_empty() {
        return Err(Error::invalid("give at least one --tau or --t"));
    }
    let jobs: Vec<(bool, f64)> = a.tau.iter().map(|&x| (true, x)).chain(a.t.iter().map(|&x| (false, x))).collect();
    let rows: Vec<NormRow> = jobs
        .par_iter()
        .map(|&(is_tau, x)| {
            let norm = if is_tau { lnorm_u(&m, a.p, x)? } else { lnorm_gradient(&m, a.p, x)? };
            let verdict_basis = if norm.borderline { "power-log-rule-borderline" } else { "power-log-rule" }.to_owned();
            Ok(NormRow { tau: is_tau.then_some(x), t: (!is_tau).then_some(x), norm, verdict_basis })
        })
        .collect::<Result<_>>()?;
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("kind,exponent,value,verdict_basis,numeric_decay\n");
            for r in &rows {
                let kind = if r.tau.is_some() { "tau" } else { "t" };
                let value = r.norm.value.map(|v| v.to_string()).unwrap_or_else(|| "divergent".into());
                let _ = writeln!(
                    s,
                    "{kind},{},{value},{},{}",
                    r.norm.exponent, r.verdict_basis, r.norm.numeric.decay_exponent
                );
            }
            Ok(s)
        }
    }
}

fn classify_cmd(format: Format, model: &Model, a: &ClassifyArgs) -> Result<String> {
    let hyp = AssumptionProfile {
        poincare_at_x0: a.poincare.clone(),
        poincare_large_radii: a.poincare_large.clone(),
        ..AssumptionProfile::default()
    };
    let verdicts: Vec<Verdict> = a
        .question
        .iter()
        .map(|&q| {
            let q = Question::from(q);
            let exponent = match q {
                Question::GreenInLtau => a.tau,
                Question::GradientInLt => a.t,
                _ => None,
            };
            classify(q, &model.growth, a.p, exponent, &hyp)
        })
        .collect::<Result<_>>()?;
    match format {
        Format::Json => {
            if verdicts.len() == 1 {
                to_json(&verdicts[0])
            } else {
                to_json(&verdicts)
            }
        }
        Format::Csv => {
            let mut s = String::from("question,state,basis,hypotheses_used\n");
            for v in &verdicts {
                use erased::Tag;
                let hyps: Vec<String> =
                    v.hypotheses_used.iter().map(|h| format!("{}:{}", h.kind.tag(), h.exponent)).collect();
                let _ = writeln!(s, "{},{},{},{}", v.question.tag(), v.state.tag(), v.basis.tag(), hyps.join(";"));
            }
            Ok(s)
        }
    }
}

mod erased {
    /// Serde tag of a unit enum variant.
    pub trait Tag {
        fn tag(&self) -> String;
    }

    impl<T: serde::Serialize> Tag for T {
        fn tag(&self) -> String {
            serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
        }
    }
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<(String, bool)> {
    let ids = match &a.only {
        Some(id) => vec![ExampleId::parse(id)?],
        None => ExampleId::ALL.to_vec(),
    };
    let mut cfg = SuiteConfig { inject_beta: a.inject_beta, ..SuiteConfig::default() };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.tolerance = tol;
    }
    let examples = run_suite(&ids, &cfg)?;
    let pass = examples.iter().all(|e| e.pass);
    let text = match cli.format {
        Format::Json => to_json(&VerifyOutput { pass, examples })?,
        Format::Csv => {
            let mut s = String::from("example,row,expected,observed,pass\n");
            for e in &examples {
                for r in &e.rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        e.id.tag(),
                        r.label,
                        outcome(&r.expected),
                        outcome(&r.observed),
                        r.pass
                    );
                }
            }
            s
        }
    };
    Ok((text, pass))
}

fn outcome(o: &crate::examples::Outcome) -> String {
    use crate::examples::Outcome;
    match o {
        Outcome::State { state } => erased::Tag::tag(state),
        Outcome::Value { value } => value.to_string(),
    }
}
