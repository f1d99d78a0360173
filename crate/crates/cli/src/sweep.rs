//! Parameter sweeps: one task per grid point, rows in grid order.

use rayon::prelude::*;
use serde_json::Value;

use crate::cache::{execute, Cache};
use crate::descriptor::Descriptor;
use crate::error::CliError;
use crate::task::Task;

pub const MAX_GRID: usize = 100_000;

struct Row {
    label: String,
    lambda_value: Option<Value>,
    result: Result<Value, CliError>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs `template` at every grid point and renders the CSV table.
pub fn sweep(template: &Task, grid: &[Descriptor], cache: Option<&Cache>) -> Result<String, CliError> {
    if grid.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    let tasks = grid.iter().map(|d| template.with_lambda(d.clone())).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Row> = tasks
        .par_iter()
        .zip(grid.par_iter())
        .map(|(t, d)| {
            let result = execute(t, cache);
            let lambda_value = match &result {
                Ok(v) => v.get("lambda_value").cloned(),
                Err(_) => None,
            };
            Row { label: d.label(), lambda_value, result }
        })
        .collect();
    // columns: scalar fields of the first successful row, in output order
    let columns: Vec<String> = rows
        .iter()
        .find_map(|r| r.result.as_ref().ok())
        .and_then(|v| v.as_object())
        .map(|m| {
            m.iter()
                .filter(|(k, x)| !x.is_array() && !x.is_object() && !matches!(k.as_str(), "lambda" | "lambda_value"))
                .map(|(k, _)| k.clone())
                .collect()
        })
        .unwrap_or_default();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["index".to_string(), "lambda".into(), "lambda_value".into(), "status".into(), "message".into()];
    header.extend(columns.iter().cloned());
    w.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    for (i, r) in rows.iter().enumerate() {
        let mut rec = vec![i.to_string(), r.label.clone(), r.lambda_value.as_ref().map(cell).unwrap_or_default()];
        match &r.result {
            Ok(v) => {
                rec.push("ok".into());
                rec.push(String::new());
                rec.extend(columns.iter().map(|c| v.get(c).map(cell).unwrap_or_default()));
            }
            Err(e) => {
                rec.push(e.kind().into());
                rec.push(e.to_string());
                rec.extend(columns.iter().map(|_| String::new()));
            }
        }
        w.write_record(&rec).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}
