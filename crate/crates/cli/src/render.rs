//! JSON (one object per line), CSV (header row) and plain-text rendering of
//! any serializable record, with field order taken from the type.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

fn to_object<T: Serialize>(row: &T) -> Map<String, Value> {
    match serde_json::to_value(row).expect("records serialize") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

/// Renders `rows`; `header` names the CSV columns when there are no rows.
pub fn render<T: Serialize>(rows: &[T], header: &[&str], format: Format) -> String {
    match format {
        Format::Json => rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect(),
        Format::Csv => {
            let objects: Vec<Map<String, Value>> = rows.iter().map(to_object).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            let columns: Vec<String> = match objects.first() {
                Some(first) => first.keys().cloned().collect(),
                None => header.iter().map(|s| s.to_string()).collect(),
            };
            w.write_record(&columns).expect("in-memory write");
            for obj in &objects {
                w.write_record(columns.iter().map(|c| obj.get(c).map(cell).unwrap_or_default()))
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        Format::Text if rows.len() == 1 => {
            let mut s = String::new();
            for (key, v) in to_object(&rows[0]) {
                let c = cell(&v);
                if c.contains('\n') {
                    s += &format!("{key}:\n{c}");
                    if !c.ends_with('\n') {
                        s.push('\n');
                    }
                } else {
                    s += &format!("{key}: {c}\n");
                }
            }
            s
        }
        Format::Text => rows
            .iter()
            .map(|r| {
                let fields: Vec<String> = to_object(r)
                    .iter()
                    .map(|(k, v)| format!("{k}={}", cell(v).replace('\n', ";")))
                    .collect();
                fields.join(" ") + "\n"
            })
            .collect(),
    }
}
