//! Output files: JSON documents `{meta, inputs, results}` and `k,l,value` CSV tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sicwig::numerics::ComplexMatrix;

pub const TOOL: &str = "sicwig";

#[derive(Debug)]
pub struct IoFailure(pub String);

/// Metadata block embedded in every output.
pub fn meta(command: &str, seed: Option<u64>) -> Value {
    json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "stream_algorithm": sicwig::sim::STREAM_ALGORITHM,
        "session_streams": sicwig::qkd::SESSION_STREAMS,
        "command": command,
        "seed": seed,
    })
}

pub fn document(meta: Value, inputs: impl Serialize, results: Value) -> Value {
    json!({
        "meta": meta,
        "inputs": serde_json::to_value(inputs).expect("serializable inputs"),
        "results": results,
    })
}

pub fn real_rows(m: &[[f64; 4]; 4]) -> Value {
    json!(m)
}

pub fn count_rows(m: &[[u64; 4]; 4]) -> Value {
    json!(m)
}

/// Rows of `[re, im]` pairs.
pub fn complex_rows(m: &ComplexMatrix) -> Value {
    Value::Array(
        m.rows()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn ensure_parent(path: &Path) -> Result<(), IoFailure> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| IoFailure(format!("{}: {e}", dir.display())))?;
        }
    }
    Ok(())
}

pub fn write_json(path: &Path, doc: &Value) -> Result<PathBuf, IoFailure> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(doc).expect("serializable document");
    text.push('\n');
    fs::write(path, text).map_err(|e| IoFailure(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

/// `# meta <json>` and `# inputs <json>` comment lines, then `header` and the rows.
pub fn write_csv(path: &Path, meta: &Value, inputs: &Value, header: &str, rows: &[String]) -> Result<PathBuf, IoFailure> {
    ensure_parent(path)?;
    let mut text = String::new();
    writeln!(text, "# meta {}", serde_json::to_string(meta).expect("json")).unwrap();
    writeln!(text, "# inputs {}", serde_json::to_string(inputs).expect("json")).unwrap();
    writeln!(text, "{header}").unwrap();
    for r in rows {
        writeln!(text, "{r}").unwrap();
    }
    fs::write(path, text).map_err(|e| IoFailure(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

/// Rows `k,l,value` of a 4x4 table; floats use the shortest exact round-trip form.
pub fn table_rows<T: std::fmt::Display>(m: &[[T; 4]; 4]) -> Vec<String> {
    let mut out = Vec::with_capacity(16);
    for (k, row) in m.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            out.push(format!("{k},{l},{v}"));
        }
    }
    out
}
