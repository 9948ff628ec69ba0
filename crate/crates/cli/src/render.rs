//! Human-readable rendering of the JSON results.

use serde_json::Value;

pub fn pretty(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out
}

fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn inline_list(items: &[Value]) -> Option<String> {
    items
        .iter()
        .map(scalar)
        .collect::<Option<Vec<_>>>()
        .map(|parts| format!("[{}]", parts.join(", ")))
}

/// `{order, probabilities}` pairs print as a two-column table.
fn distribution_table(map: &serde_json::Map<String, Value>, indent: usize) -> Option<String> {
    let order = map.get("order")?.as_array()?;
    let probs = map.get("probabilities")?.as_array()?;
    if order.len() != probs.len() {
        return None;
    }
    let pad = " ".repeat(indent);
    let mut out = String::new();
    if let Some(vars) = map
        .get("variables")
        .and_then(|v| v.as_array())
        .and_then(|v| inline_list(v))
    {
        out.push_str(&format!("{pad}variables {vars}\n"));
    }
    for (label, p) in order.iter().zip(probs) {
        out.push_str(&format!("{pad}{}  {}\n", scalar(label)?, scalar(p)?));
    }
    Some(out)
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(map) => {
            if let Some(table) = distribution_table(map, indent) {
                out.push_str(&table);
                return;
            }
            for (key, v) in map {
                match v {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        write_value(out, v, indent + 2);
                    }
                    Value::Array(items) => match inline_list(items) {
                        Some(line) => out.push_str(&format!("{pad}{key}: {line}\n")),
                        None => {
                            out.push_str(&format!("{pad}{key}:\n"));
                            write_value(out, v, indent + 2);
                        }
                    },
                    _ => out.push_str(&format!("{pad}{key}: {}\n", scalar(v).unwrap_or_default())),
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                match (scalar(item), item) {
                    (Some(s), _) => out.push_str(&format!("{pad}- {s}\n")),
                    (None, Value::Array(row)) if inline_list(row).is_some() => out.push_str(
                        &format!("{pad}- {}\n", inline_list(row).unwrap_or_default()),
                    ),
                    _ => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        write_value(out, item, indent + 2);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
