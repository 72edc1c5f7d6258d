//! Byte-stable rendering: every float is rounded to 15 significant digits.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::HarnessError;

/// Rounds to 15 significant digits; any such decimal round-trips through
/// `f64`, so the shortest printed form has at most 15 digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round15(x);
        if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) { format!("{r:e}") } else { r.to_string() }
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("checked is_f64");
            Number::from_f64(round15(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// Serializes `value` with rounded floats and a provenance header.
pub fn json_report<T: Serialize, C: Serialize>(command: &str, config: &C, value: &T) -> Result<String, HarnessError> {
    let doc = serde_json::json!({
        "tool": "calkin",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": serde_json::to_value(config)?,
        "result": serde_json::to_value(value)?,
    });
    let mut out = serde_json::to_string_pretty(&round_value(doc))?;
    out.push('\n');
    Ok(out)
}

/// CSV with a header row; numeric cells go through [`fmt_num`].
pub fn csv_report(headers: &[&str], rows: &[Vec<String>]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
