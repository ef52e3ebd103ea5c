//! JSON values for reports and their plain-text rendering.

use evokit_core::algebra::Element;
use evokit_core::matrix::Matrix;
use evokit_core::scalar::{format_field, Field};
use serde_json::{Map, Value};

pub fn scalars<F: Field>(v: &[F]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_field(x))).collect())
}

pub fn element<F: Field>(x: &Element<F>) -> Value {
    scalars(x.coords())
}

pub fn matrix<F: Field>(m: &Matrix<F>) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| scalars(r)).collect())
}

/// Non-finite values have no JSON number form and become strings.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

pub fn object(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

/// The machine format: one JSON object on one line.
pub fn machine(v: &Value) -> String {
    serde_json::to_string(v).expect("values serialize")
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::String(s) => Some(s.clone()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        Value::Array(items) if items.is_empty() => Some("[]".into()),
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::Array(_) | Value::Object(_) => None,
                _ => inline(x),
            })
            .collect::<Option<Vec<_>>>()
            .map(|parts| format!("[{}]", parts.join(", "))),
        Value::Object(_) => None,
    }
}

fn render_into(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_into(x, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_into(x, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other).unwrap_or_default())),
    }
}

/// Indented `key: value` lines; rows of scalars stay on one line.
pub fn text(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out
}
