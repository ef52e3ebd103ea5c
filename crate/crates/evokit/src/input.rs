//! Input files: an algebra `{"dim", "field", "rows"}` or a permutation
//! algebra `{"perm", "coeffs", "field"?}`.

use std::fmt;

use evokit_core::algebra::AnyAlgebra;
use evokit_core::normal_form::AnyPermutationAlgebra;
use evokit_core::permutation::Permutation;
use evokit_core::scalar::{parse_complex, parse_rational, promote, Domain, Scalar};
use serde::de::{self, IgnoredAny};
use serde::{Deserialize, Deserializer};

/// A malformed input, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub field: String,
    pub message: String,
    pub line: Option<usize>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)?;
        if let Some(line) = self.line {
            write!(f, " (line {line})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FieldName {
    Rational,
    Complex,
}

impl From<FieldName> for Domain {
    fn from(f: FieldName) -> Domain {
        match f {
            FieldName::Rational => Domain::Rational,
            FieldName::Complex => Domain::Complex,
        }
    }
}

/// A string that parses as a scalar in at least one domain.
#[derive(Debug, Clone)]
struct ScalarText(String);

impl<'de> Deserialize<'de> for ScalarText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if parse_rational(&s).is_err() && parse_complex(&s).is_err() {
            return Err(de::Error::custom(format!("{s:?} is not a scalar")));
        }
        Ok(ScalarText(s))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    dim: usize,
    field: FieldName,
    rows: Vec<Vec<ScalarText>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PermFile {
    perm: Vec<usize>,
    coeffs: Vec<ScalarText>,
    #[serde(default)]
    field: Option<FieldName>,
}

#[derive(Deserialize)]
struct Probe {
    #[serde(default)]
    perm: Option<IgnoredAny>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Algebra(AnyAlgebra),
    Permutation(AnyPermutationAlgebra),
}

impl Input {
    /// The plain algebra, expanding a permutation algebra to its table.
    pub fn algebra(&self) -> AnyAlgebra {
        match self {
            Input::Algebra(a) => a.clone(),
            Input::Permutation(AnyPermutationAlgebra::Rational(p)) => AnyAlgebra::Rational(p.algebra()),
            Input::Permutation(AnyPermutationAlgebra::Complex(p)) => AnyAlgebra::Complex(p.algebra()),
        }
    }
}

fn line_of(text: &str, token: &str) -> Option<usize> {
    let quoted = format!("\"{token}\"");
    text.find(&quoted).map(|pos| text[..pos].matches('\n').count() + 1)
}

fn structured<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ParseError {
            field: if path == "." { "document".into() } else { path },
            message: inner.to_string(),
            line: Some(inner.line()),
        }
    })
}

/// Parses `text` in `domain`. Complex inputs also accept `p/q`.
pub fn parse_scalar(text: &str, domain: Domain) -> Result<Scalar, String> {
    match Scalar::parse(text, domain) {
        Ok(s) => Ok(s),
        Err(e) if domain == Domain::Complex => parse_rational(text).map(|q| Scalar::Complex(promote(&q).0)).map_err(|_| e.to_string()),
        Err(e) => Err(e.to_string()),
    }
}

/// Comma-separated scalars, e.g. `1,-1/2,0`.
pub fn parse_vector(text: &str, domain: Domain) -> Result<Vec<Scalar>, String> {
    text.split(',').map(|s| parse_scalar(s.trim(), domain)).collect()
}

fn convert(text: &str, field: String, raw: &ScalarText, domain: Domain) -> Result<Scalar, ParseError> {
    parse_scalar(&raw.0, domain).map_err(|message| ParseError {
        field,
        message,
        line: line_of(text, &raw.0),
    })
}

pub fn parse_input(text: &str) -> Result<Input, ParseError> {
    let probe: Probe = structured(text)?;
    if probe.perm.is_some() {
        let raw: PermFile = structured(text)?;
        let domain = raw.field.map_or(Domain::Rational, Domain::from);
        let perm = Permutation::from_one_based(&raw.perm).map_err(|e| ParseError {
            field: "perm".into(),
            message: e.to_string(),
            line: None,
        })?;
        if raw.coeffs.len() != perm.len() {
            return Err(ParseError {
                field: "coeffs".into(),
                message: format!("expected {} coefficients, found {}", perm.len(), raw.coeffs.len()),
                line: None,
            });
        }
        let coeffs = raw
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| convert(text, format!("coeffs[{i}]"), c, domain))
            .collect::<Result<Vec<_>, _>>()?;
        let p = AnyPermutationAlgebra::from_scalars(perm, &coeffs, domain).map_err(|e| ParseError {
            field: "coeffs".into(),
            message: e.to_string(),
            line: None,
        })?;
        return Ok(Input::Permutation(p));
    }
    let raw: AlgebraFile = structured(text)?;
    let domain = Domain::from(raw.field);
    if raw.dim == 0 {
        return Err(ParseError {
            field: "dim".into(),
            message: "must be at least 1".into(),
            line: None,
        });
    }
    if raw.rows.len() != raw.dim {
        return Err(ParseError {
            field: "rows".into(),
            message: format!("expected {} rows, found {}", raw.dim, raw.rows.len()),
            line: None,
        });
    }
    let mut rows = Vec::with_capacity(raw.dim);
    for (i, r) in raw.rows.iter().enumerate() {
        if r.len() != raw.dim {
            return Err(ParseError {
                field: format!("rows[{i}]"),
                message: format!("expected {} entries, found {}", raw.dim, r.len()),
                line: r.first().and_then(|s| line_of(text, &s.0)),
            });
        }
        rows.push(
            r.iter()
                .enumerate()
                .map(|(k, s)| convert(text, format!("rows[{i}][{k}]"), s, domain))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let algebra = AnyAlgebra::from_scalars(&rows, domain).map_err(|e| ParseError {
        field: "rows".into(),
        message: e.to_string(),
        line: None,
    })?;
    Ok(Input::Algebra(algebra))
}
