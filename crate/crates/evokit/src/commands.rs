//! Subcommands and the batch driver.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use evokit_core::algebra::{AnyAlgebra, AnyChangeOfBasis, EvolutionAlgebra};
use evokit_core::classify2::classify_2d;
use evokit_core::enveloping::{classify_rank_cases, enveloping_closure, RankCaseLabel};
use evokit_core::error::Error;
use evokit_core::period::{
    check_derived_identities, check_fourth_power, check_third_power, classify_3d_zero_case, period_criterion_test, recurrence_report,
    verify_recurrences, IdentityCheck, ThreeDimCoefficients, DEFAULT_BITCAP,
};
use evokit_core::scalar::{Domain, Field, Scalar, DEFAULT_TOL};
use evokit_core::special::{absolute_nilpotent, idempotents_numeric, markov_real_nilpotent_check, DEFAULT_ATTEMPTS};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::input::{parse_input, parse_vector, Input};
use crate::report::{self, element, matrix, number, object, scalars};

pub const BITCAP_ENV: &str = "EVOKIT_BITCAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

/// Computations on evolution algebras given as JSON files.
#[derive(Debug, Parser)]
#[command(name = "evokit", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Relative pivot tolerance for complex inputs.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Plenary-power depth K.
    #[arg(long, global = true, default_value_t = 12)]
    pub depth: usize,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Random restarts for the numeric searches.
    #[arg(long, global = true, default_value_t = DEFAULT_ATTEMPTS)]
    pub attempts: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Run on every `*.json` file in this directory instead of one input.
    #[arg(long, global = true)]
    pub batch: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Product x·y.
    Mul {
        input: Option<PathBuf>,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Plenary power x^[k].
    Plenary {
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        k: usize,
    },
    /// Canonical two-dimensional form with its change of basis.
    Classify2 { input: Option<PathBuf> },
    /// Normal form of a permutation evolution algebra.
    PermNormalForm { input: Option<PathBuf> },
    /// Nonzero x with x·x = 0.
    Nilpotent { input: Option<PathBuf> },
    /// Nonzero idempotents by Newton multistart.
    Idempotent { input: Option<PathBuf> },
    /// Enveloping algebra of the right multiplications.
    Envelope {
        input: Option<PathBuf>,
        /// Include the basis matrices.
        #[arg(long)]
        basis: bool,
    },
    /// Depths at which e_j reappears in its plenary powers.
    Period {
        input: Option<PathBuf>,
        /// Generator (1-based); all generators when omitted.
        #[arg(long)]
        j: Option<usize>,
    },
    /// Identities, recurrences and reductions for a three-dimensional
    /// algebra with zero diagonal.
    #[command(name = "check-3d")]
    Check3d { input: Option<PathBuf> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mul { .. } => "mul",
            Command::Plenary { .. } => "plenary",
            Command::Classify2 { .. } => "classify2",
            Command::PermNormalForm { .. } => "perm-normal-form",
            Command::Nilpotent { .. } => "nilpotent",
            Command::Idempotent { .. } => "idempotent",
            Command::Envelope { .. } => "envelope",
            Command::Period { .. } => "period",
            Command::Check3d { .. } => "check-3d",
        }
    }

    fn input(&self) -> Option<&PathBuf> {
        match self {
            Command::Mul { input, .. }
            | Command::Plenary { input, .. }
            | Command::Classify2 { input }
            | Command::PermNormalForm { input }
            | Command::Nilpotent { input }
            | Command::Idempotent { input }
            | Command::Envelope { input, .. }
            | Command::Period { input, .. }
            | Command::Check3d { input } => input.as_ref(),
        }
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
struct Settings {
    tol: f64,
    depth: usize,
    seed: u64,
    attempts: usize,
    bitcap: u64,
}

#[derive(Debug, Clone, PartialEq)]
enum Failure {
    Parse(String),
    Precondition(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Precondition(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Parse(e.to_string()),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

/// Exit code and rendered report of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub value: Value,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => report::machine(&self.value) + "\n",
            Format::Text => report::text(&self.value),
        }
    }
}

fn bitcap_from_env() -> Result<u64, Failure> {
    match std::env::var(BITCAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Parse(format!("{BITCAP_ENV}={v:?} is not a bit count"))),
        Err(_) => Ok(DEFAULT_BITCAP),
    }
}

macro_rules! on_field {
    ($alg:expr, $e:ident => $body:expr) => {
        match $alg {
            AnyAlgebra::Rational($e) => $body,
            AnyAlgebra::Complex($e) => $body,
        }
    };
}

fn identity_check(c: &IdentityCheck) -> Value {
    object([
        ("holds", json!(c.holds)),
        ("residuals", Value::Array(c.residuals.iter().map(|&r| number(r)).collect())),
    ])
}

fn any_witness(w: &AnyChangeOfBasis) -> Value {
    object([
        ("domain", json!(w.domain().name())),
        ("rows", Value::Array(w.basis_rows().iter().map(|r| json!(r.iter().map(Scalar::to_string).collect::<Vec<_>>())).collect())),
        ("inverse_residual", number(w.residual())),
    ])
}

fn elements(a: &AnyAlgebra, text: &str) -> Result<Vec<Scalar>, Failure> {
    parse_vector(text, a.domain()).map_err(Failure::Parse)
}

fn nilpotent<F: Field>(e: &EvolutionAlgebra<F>, s: Settings) -> Value {
    let r = absolute_nilpotent(e, s.tol);
    object([
        ("exists_nontrivial", json!(r.exists_nontrivial)),
        ("witness", r.witness.as_ref().map_or(Value::Null, element)),
        ("residual", number(r.residual)),
    ])
}

fn envelope<F: Field>(e: &EvolutionAlgebra<F>, s: Settings, with_basis: bool) -> Value {
    let tol = if F::DOMAIN.is_exact() { 0.0 } else { s.tol };
    let r = enveloping_closure(e, tol);
    let cases = classify_rank_cases(e, tol);
    let label = match cases.label {
        RankCaseLabel::NotApplicable => Value::Null,
        l => json!(l.to_string()),
    };
    let mut out = object([
        ("dim", json!(r.dim)),
        ("per_row_ranks", json!(r.per_row_ranks)),
        ("sum_ranks", json!(r.sum_ranks)),
        ("formula_agrees", json!(r.formula_agrees)),
        ("closure_residual", number(r.closure_residual)),
        (
            "rank_case",
            object([
                ("label", label),
                ("premise_failure", cases.premise_failure.map_or(Value::Null, |p| json!(p.to_string()))),
                ("witness", cases.witness.as_ref().map_or(Value::Null, |w| matrix(w.basis()))),
                ("residual", number(cases.residual)),
            ]),
        ),
    ]);
    if with_basis {
        out["basis"] = Value::Array(r.basis.iter().map(matrix).collect());
    }
    out
}

fn period<F: Field>(e: &EvolutionAlgebra<F>, s: Settings, j: Option<usize>) -> Result<Value, Failure> {
    let n = e.dim();
    let generators: Vec<usize> = match j {
        Some(j) if j == 0 || j > n => {
            return Err(Failure::Precondition(format!("generator {j} out of range 1..={n}")));
        }
        Some(j) => vec![j - 1],
        None => (0..n).collect(),
    };
    let reports = generators
        .into_iter()
        .map(|g| {
            let r = recurrence_report(e, g, s.depth, s.bitcap)?;
            Ok(object([
                ("generator", json!(g + 1)),
                ("recurrence_set", json!(r.recurrence_set)),
                ("infinite_up_to_depth", json!(r.infinite_up_to_depth)),
                ("truncated_at", json!(r.truncated_at)),
            ]))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(object([("depth", json!(s.depth)), ("generators", Value::Array(reports))]))
}

fn check_3d<F: Field>(e: &EvolutionAlgebra<F>, s: Settings) -> Result<Value, Failure> {
    let c = ThreeDimCoefficients::from_algebra(e)?;
    let not_applicable = |e: Error| object([("not_applicable", json!(e.to_string()))]);
    let recurrences = match verify_recurrences(&c, s.depth, s.bitcap) {
        Ok(states) => {
            let failed = states.iter().find(|st| !st.passes()).map(|st| st.k);
            object([
                ("depth_reached", json!(states.last().map(|st| st.k))),
                ("all_pass", json!(failed.is_none())),
                ("first_failure", json!(failed)),
            ])
        }
        Err(e) => not_applicable(e),
    };
    let criterion = match period_criterion_test(&c, s.depth, s.bitcap) {
        Ok(r) => object([
            ("verdict", json!(r.verdict.to_string())),
            ("recurrence_sets", json!(r.reports.iter().map(|p| p.recurrence_set.clone()).collect::<Vec<_>>())),
        ]),
        Err(e) => not_applicable(e),
    };
    let zero_case = match classify_3d_zero_case(&c) {
        Ok((form, w)) => object([
            ("form", object([("a2", json!(form.a2.into_scalar().to_string())), ("a3", json!(form.a3.into_scalar().to_string())), ("b3", json!(form.b3.into_scalar().to_string()))])),
            ("witness", matrix(w.basis())),
            ("residual", number(e.apply_change_of_basis(&w)?.1)),
        ]),
        Err(e) => not_applicable(e),
    };
    Ok(object([
        ("third_power", identity_check(&check_third_power(&c)?)),
        ("fourth_power", identity_check(&check_fourth_power(&c)?)),
        ("derived", identity_check(&check_derived_identities(&c)?)),
        ("recurrences", recurrences),
        ("criterion", criterion),
        ("zero_case", zero_case),
    ]))
}

fn classify2<F: Field>(e: &EvolutionAlgebra<F>) -> Result<Value, Failure> {
    let r = classify_2d(e)?;
    Ok(object([
        ("label", json!(r.label.name())),
        ("form", json!(r.label.to_string())),
        ("params", scalars(&r.label.params())),
        ("witness", matrix(r.witness.basis())),
        ("inverse_residual", number(r.witness.residual())),
        ("residual", number(r.residual)),
        (
            "invariants",
            r.invariants.map_or(Value::Null, |i| {
                object([
                    ("has_idempotent", json!(i.has_idempotent)),
                    ("annihilator_dim", json!(i.annihilator_dim)),
                    ("acts_on_square", json!(i.acts_on_square)),
                ])
            }),
        ),
    ]))
}

fn execute(command: &Command, input: &Input, s: Settings) -> Result<Value, Failure> {
    if s.tol.is_nan() || s.tol <= 0.0 {
        return Err(Failure::Precondition(format!("tolerance must be positive, got {}", s.tol)));
    }
    let a = input.algebra();
    Ok(match command {
        Command::Mul { x, y, .. } => {
            let (x, y) = (elements(&a, x)?, elements(&a, y)?);
            let p = a.multiply(&x, &y)?;
            object([("product", json!(p.iter().map(Scalar::to_string).collect::<Vec<_>>()))])
        }
        Command::Plenary { x, k, .. } => {
            let x = elements(&a, x)?;
            let p = a.plenary_power(&x, *k)?;
            object([("k", json!(k)), ("power", json!(p.iter().map(Scalar::to_string).collect::<Vec<_>>()))])
        }
        Command::Classify2 { .. } => on_field!(&a, e => classify2(e)?),
        Command::PermNormalForm { .. } => {
            let Input::Permutation(p) = input else {
                return Err(Failure::Precondition("perm-normal-form needs a {\"perm\", \"coeffs\"} input".into()));
            };
            let r = p.normal_form()?;
            object([
                ("components", json!(r.components.iter().map(|c| c.to_string()).collect::<Vec<_>>())),
                (
                    "multiset",
                    Value::Array(r.multiset().iter().map(|(c, m)| json!({"component": c.to_string(), "multiplicity": m})).collect()),
                ),
                ("witness", any_witness(&r.witness)),
                ("residual", number(r.residual)),
            ])
        }
        Command::Nilpotent { .. } => {
            let mut out = on_field!(&a, e => nilpotent(e, s));
            if let AnyAlgebra::Rational(e) = &a {
                if e.is_markov() {
                    out["markov_real_check"] = json!(markov_real_nilpotent_check(e, s.seed)?);
                }
            }
            out
        }
        Command::Idempotent { .. } => {
            let e = a.to_complex();
            let set = idempotents_numeric(&e, s.attempts, s.seed);
            let defect = set
                .elements
                .iter()
                .map(|x| e.square(x).map(|sq| sq.sub(x).max_abs()))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(0.0, f64::max);
            object([
                ("attempts", json!(s.attempts)),
                ("seed", json!(s.seed)),
                ("count", json!(set.elements.len())),
                ("elements", Value::Array(set.elements.iter().map(element).collect())),
                ("max_defect", number(defect)),
            ])
        }
        Command::Envelope { basis, .. } => on_field!(&a, e => envelope(e, s, *basis)),
        Command::Period { j, .. } => on_field!(&a, e => period(e, s, *j)?),
        Command::Check3d { .. } => on_field!(&a, e => check_3d(e, s)?),
    })
}

fn with_header(command: &Command, file: Option<&Path>, domain: Option<Domain>, body: Value) -> Value {
    let mut out = object([("command", json!(command.name()))]);
    if let Some(f) = file {
        out["input"] = json!(f.display().to_string());
    }
    if let Some(d) = domain {
        out["domain"] = json!(d.name());
    }
    match body {
        Value::Object(map) => out.as_object_mut().expect("object").extend(map),
        other => out["result"] = other,
    }
    out
}

fn failure_value(f: &Failure) -> Value {
    let (kind, message) = match f {
        Failure::Parse(m) => ("parse", m),
        Failure::Precondition(m) => ("precondition", m),
    };
    object([("error", object([("kind", json!(kind)), ("message", json!(message))]))])
}

fn run_file(command: &Command, path: &Path, s: Settings) -> Outcome {
    let parsed = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
        .and_then(|text| parse_input(&text).map_err(|e| Failure::Parse(e.to_string())));
    let (domain, result) = match parsed {
        Ok(input) => (Some(input.algebra().domain()), execute(command, &input, s)),
        Err(f) => (None, Err(f)),
    };
    match result {
        Ok(body) => Outcome {
            code: 0,
            value: with_header(command, Some(path), domain, body),
        },
        Err(f) => Outcome {
            code: f.code(),
            value: with_header(command, Some(path), domain, failure_value(&f)),
        },
    }
}

fn batch_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let fail = |f: Failure| Outcome {
        code: f.code(),
        value: with_header(&cli.command, None, None, failure_value(&f)),
    };
    let bitcap = match bitcap_from_env() {
        Ok(b) => b,
        Err(f) => return fail(f),
    };
    let s = Settings {
        tol: cli.tol,
        depth: cli.depth,
        seed: cli.seed,
        attempts: cli.attempts,
        bitcap,
    };
    let Some(dir) = &cli.batch else {
        return match cli.command.input() {
            Some(path) => run_file(&cli.command, path, s),
            None => fail(Failure::Parse("no input file given".into())),
        };
    };
    let files = match batch_files(dir) {
        Ok(f) => f,
        Err(f) => return fail(f),
    };
    // each file gets its own report; order follows the sorted file names
    let outcomes: Vec<Outcome> = files.par_iter().map(|f| run_file(&cli.command, f, s)).collect();
    let code = outcomes.iter().map(|o| o.code).max().unwrap_or(0);
    let results = outcomes
        .into_iter()
        .zip(&files)
        .map(|(o, f)| object([("file", json!(f.display().to_string())), ("exit", json!(o.code)), ("report", o.value)]))
        .collect();
    Outcome {
        code,
        value: object([
            ("command", json!(cli.command.name())),
            ("batch", json!(dir.display().to_string())),
            ("results", Value::Array(results)),
        ]),
    }
}
