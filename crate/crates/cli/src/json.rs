//! JSON output with every float written to 17 significant digits.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = String::new();
    write_value(&mut out, &serde_json::to_value(value)?, 0);
    out.push('\n');
    Ok(out)
}

fn indent(out: &mut String, depth: usize) {
    out.push('\n');
    out.extend(std::iter::repeat_n("  ", depth));
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let _ = write!(out, "{:.16e}", n.as_f64().unwrap());
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(|v| !v.is_array() && !v.is_object()) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, depth);
            }
            out.push(']');
        }
        Value::Array(items) if !items.is_empty() => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                indent(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, v, depth + 1);
            }
            indent(out, depth);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}
