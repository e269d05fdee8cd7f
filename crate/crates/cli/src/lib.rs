//! Command-line front end: input language, pipeline driver and reporters.

pub mod elaborate;
pub mod parse;
pub mod report;

use mahler::fields::Rational;
use mahler::frobenius::{frobenius_basis, BasisOptions, FrobeniusOutput};
use mahler::newton::{analyze, frobenius_plan};
use mahler::random::{GeneratorConfig, OperatorGenerator};
use mahler::MahlerError;
use serde_json::json;
use thiserror::Error;

pub use elaborate::elaborate;
pub use parse::{parse_expr, parse_spec, EquationSpec, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: exponents of z must be rational literals such as 3 or (-1/2)")]
    NonRationalExponentLiteral { line: usize, col: usize },
    #[error("missing radix line 'p = <int>'")]
    MissingRadix,
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
    #[error("cannot evaluate a[{index}]: {source}")]
    Elaboration { index: usize, source: MahlerError },
}

impl InputError {
    pub fn syntax(line: usize, col: usize, message: impl Into<String>) -> Self {
        InputError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            InputError::Syntax { .. } => "syntax",
            InputError::NonRationalExponentLiteral { .. } => "non_rational_exponent_literal",
            InputError::MissingRadix => "missing_radix",
            InputError::InvalidEquation(_) => "invalid_equation",
            InputError::Elaboration { .. } => "elaboration",
        };
        let mut v = json!({ "kind": kind, "message": self.to_string() });
        if let InputError::Syntax { line, col, .. } | InputError::NonRationalExponentLiteral { line, col } = self {
            v["line"] = json!(line);
            v["col"] = json!(col);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    VerificationFailed,
    InputError,
    Partial,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::VerificationFailed => 1,
            Status::InputError => 2,
            Status::Partial => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::VerificationFailed => "failure",
            Status::InputError => "input_error",
            Status::Partial => "partial_basis",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Exponent ceiling of the solutions.
    pub precision: Rational,
    pub depth: usize,
    pub verify: bool,
    pub epsilon: Option<Rational>,
    /// Ceiling at which the coefficients are expanded; `2·precision + 8` by default.
    pub expansion: Option<Rational>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            precision: Rational::from_integer(8.into()),
            depth: 8,
            verify: false,
            epsilon: None,
            expansion: None,
        }
    }
}

impl RunOptions {
    pub fn expansion_ceiling(&self) -> Rational {
        self.expansion
            .clone()
            .unwrap_or_else(|| &self.precision * Rational::from_integer(2.into()) + Rational::from_integer(8.into()))
    }

    fn basis_options(&self) -> BasisOptions {
        let mut o = BasisOptions::new(self.precision.clone(), self.depth);
        o.verify = self.verify;
        o.epsilon = self.epsilon.clone();
        o
    }
}

/// Outcome of a command: a JSON document, its pretty rendering and the status.
#[derive(Clone, Debug)]
pub struct Report {
    pub status: Status,
    pub json: serde_json::Value,
    pub pretty: String,
}

impl Report {
    fn new(status: Status, mut json: serde_json::Value, pretty: String) -> Self {
        json["status"] = json!(status.name());
        json["exit_code"] = json!(status.exit_code());
        Report { status, json, pretty }
    }

    fn input_error(err: &InputError) -> Self {
        Report::new(
            Status::InputError,
            json!({ "error": err.to_json() }),
            format!("error: {err}\n"),
        )
    }

    fn solver_error(stage: &str, err: &MahlerError) -> Self {
        let body = json!({ "error": { "kind": "solver", "stage": stage, "message": err.to_string() } });
        Report::new(
            Status::VerificationFailed,
            body,
            format!("error during {stage}: {err}\n"),
        )
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

fn status_of(out: &FrobeniusOutput) -> Status {
    match (&out.verification, &out.partial) {
        (Some(v), _) if !v.passed() => Status::VerificationFailed,
        (_, Some(_)) => Status::Partial,
        _ => Status::Success,
    }
}

/// `solve`: Newton data, factorization, basis and (on request) verification.
pub fn run_solve(text: &str, opts: &RunOptions) -> Report {
    let spec = match parse_spec(text) {
        Ok(s) => s,
        Err(e) => return Report::input_error(&e),
    };
    let l = match elaborate(&spec, &opts.expansion_ceiling()) {
        Ok(l) => l,
        Err(e) => return Report::input_error(&e),
    };
    let out = match frobenius_basis(&l, &opts.basis_options()) {
        Ok(out) => out,
        Err(e) => return Report::solver_error("solve", &e),
    };
    let status = status_of(&out);
    Report::new(
        status,
        report::solve_json(&spec, opts, &out),
        report::solve_pretty(&spec, opts, &out),
    )
}

/// `newton`: Newton polygon, slopes, characteristic polynomials, exponents and plan.
pub fn run_newton(text: &str, opts: &RunOptions) -> Report {
    let spec = match parse_spec(text) {
        Ok(s) => s,
        Err(e) => return Report::input_error(&e),
    };
    let l = match elaborate(&spec, &opts.expansion_ceiling()) {
        Ok(l) => l,
        Err(e) => return Report::input_error(&e),
    };
    let data = match analyze(&l) {
        Ok(d) => d,
        Err(e) => return Report::solver_error("newton", &e),
    };
    let plan = match frobenius_plan(&l, &data) {
        Ok(p) => p,
        Err(e) => return Report::solver_error("plan", &e),
    };
    let status = if data.all_rational() {
        Status::Success
    } else {
        Status::Partial
    };
    Report::new(
        status,
        report::newton_json(&spec, &data, &plan),
        report::newton_pretty(&spec, &data, &plan),
    )
}

/// `selftest`: random operators with known factorizations, each solved and verified.
pub fn run_selftest(seed: u64, count: usize, opts: &RunOptions) -> Report {
    let mut gen = OperatorGenerator::new(seed, GeneratorConfig::default());
    let mut rows = Vec::with_capacity(count);
    let mut pretty = format!("self-test: {count} random operators, seed {seed}\n");
    let mut all_ok = true;
    let mut bopts = opts.basis_options();
    bopts.verify = true;
    for i in 0..count {
        let f = gen.factored();
        let top = f
            .nus()
            .into_iter()
            .max()
            .unwrap_or_else(|| Rational::from_integer(0.into()));
        let ceiling = &opts.precision + top * Rational::from_integer(2.into()) + Rational::from_integer(8.into());
        let result = f.expand(&ceiling).and_then(|l| frobenius_basis(&l, &bopts));
        let (ok, row) = match result {
            Ok(out) => {
                let v = out.verification.as_ref().expect("verification requested");
                let ok = v.passed() && out.partial.is_none() && v.count == f.order();
                let row = json!({
                    "index": i,
                    "p": f.p,
                    "order": f.order(),
                    "solutions": out.solution_count(),
                    "passed": ok,
                });
                (ok, row)
            }
            Err(e) => (
                false,
                json!({ "index": i, "p": f.p, "order": f.order(), "error": e.to_string(), "passed": false }),
            ),
        };
        all_ok &= ok;
        pretty += &format!(
            "  #{i:<4} p = {}  order {}  {}\n",
            f.p,
            f.order(),
            if ok {
                "ok".to_string()
            } else {
                format!("FAILED {}", row.get("error").map_or(String::new(), |e| e.to_string()))
            }
        );
        rows.push(row);
    }
    let passed = rows.iter().filter(|r| r["passed"] == json!(true)).count();
    pretty += &format!("{passed}/{count} passed\n");
    let status = if all_ok {
        Status::Success
    } else {
        Status::VerificationFailed
    };
    let body = json!({
        "seed": seed,
        "precision": opts.precision.to_string(),
        "depth": opts.depth,
        "operators": rows,
        "passed": passed,
        "count": count,
    });
    Report::new(status, body, pretty)
}
