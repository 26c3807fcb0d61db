//! Text formats: decimal-string JSON records and CSV tables.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::scalar::{parse_rational, Scalar};

/// Parses a real literal written as a decimal or as `p/q`.
pub fn parse_real_literal(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    parse_rational(s).map(|q| Scalar::to_f64(&q))
}

/// Replaces every JSON number by its decimal string, recursively.
pub fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(decimal(&n)),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_numbers(v))).collect()),
        other => other,
    }
}

fn decimal(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        return i.to_string();
    }
    if let Some(u) = n.as_u64() {
        return u.to_string();
    }
    // shortest representation that round-trips
    n.as_f64().map(|x| format!("{x:?}")).unwrap_or_else(|| n.to_string())
}

/// Pretty JSON of `value` with all numbers written as decimal strings.
/// Non-finite floats, which serde writes as `null`, stay `null`.
pub fn to_decimal_json<S: Serialize>(value: &S) -> Result<String> {
    let v = stringify_numbers(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)?)
}

/// CSV with a header row; fields are written verbatim.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Writes `text` to `path`, or to stdout when `path` is `None` or `-`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, text)?,
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn real_literals() {
        assert_eq!(parse_real_literal("1/2"), Some(0.5));
        assert_eq!(parse_real_literal(" -1.5 "), Some(-1.5));
        assert_eq!(parse_real_literal("x"), None);
    }

    #[test]
    fn numbers_become_strings() {
        let v = stringify_numbers(json!({"a": 1, "b": [0.1, -2.5e-30], "c": {"d": true, "e": null}}));
        assert_eq!(v, json!({"a": "1", "b": ["0.1", "-2.5e-30"], "c": {"d": true, "e": null}}));
    }

    #[test]
    fn csv_rows() {
        let t = csv_table(&["n", "W"], &[vec!["0".into(), "1.5".into()]]);
        assert_eq!(t, "n,W\n0,1.5\n");
    }
}
