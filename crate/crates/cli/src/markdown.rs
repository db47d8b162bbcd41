//! Markdown view of a JSON report. Purely derived from the JSON document.

use serde_json::Value;

pub fn render(doc: &Value) -> String {
    let command = doc["config"]["command"]["name"].as_str().unwrap_or("?");
    let mut out = format!("# thomhom {command}\n\nversion {}\n\n", scalar(&doc["version"]));
    out.push_str("## Configuration\n\n");
    block(&doc["config"], 3, &mut out);
    out.push_str("## Result\n\n");
    block(&doc["result"], 3, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(is_scalar) => items.iter().map(scalar).collect::<Vec<_>>().join(", "),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => serde_json::to_string(v).expect("value serializes"),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn cell(v: &Value) -> String {
    scalar(v).replace('|', "\\|").replace('\n', " ")
}

/// Rows of objects whose fields are all flat render as a table.
fn as_table(items: &[Value]) -> Option<Vec<String>> {
    let first = items.first()?.as_object()?;
    let cols: Vec<String> = first.keys().cloned().collect();
    let flat = |v: &Value| is_scalar(v) || v.as_array().is_some_and(|a| a.iter().all(is_scalar));
    items
        .iter()
        .all(|it| {
            it.as_object()
                .is_some_and(|o| o.keys().eq(cols.iter()) && o.values().all(flat))
        })
        .then_some(cols)
}

fn block(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Object(map) => {
            let mut bullets = false;
            for (key, val) in map {
                if is_scalar(val) || val.as_array().is_some_and(|a| a.iter().all(is_scalar)) {
                    out.push_str(&format!("- **{key}**: {}\n", scalar(val)));
                    bullets = true;
                }
            }
            if bullets {
                out.push('\n');
            }
            for (key, val) in map {
                if !(is_scalar(val) || val.as_array().is_some_and(|a| a.iter().all(is_scalar))) {
                    out.push_str(&format!("{} {key}\n\n", "#".repeat(depth.min(6))));
                    block(val, depth + 1, out);
                }
            }
        }
        Value::Array(items) => {
            if let Some(cols) = as_table(items) {
                out.push_str(&format!("| {} |\n", cols.join(" | ")));
                out.push_str(&format!("|{}\n", "---|".repeat(cols.len())));
                for it in items {
                    let row: Vec<String> = cols.iter().map(|c| cell(&it[c])).collect();
                    out.push_str(&format!("| {} |\n", row.join(" | ")));
                }
                out.push('\n');
            } else {
                for (i, it) in items.iter().enumerate() {
                    if is_scalar(it) {
                        out.push_str(&format!("- {}\n", scalar(it)));
                    } else {
                        out.push_str(&format!("{} item {}\n\n", "#".repeat(depth.min(6)), i + 1));
                        block(it, depth + 1, out);
                    }
                }
                out.push('\n');
            }
        }
        other => out.push_str(&format!("{}\n\n", scalar(other))),
    }
}
