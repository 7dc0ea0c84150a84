use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// Relative output paths resolve against this directory when it is set.
pub const OUTPUT_DIR_ENV: &str = "BAYES_OUTPUT_DIR";

/// A finished report in all three formats. Text and CSV are views of the
/// same numbers that go into `result`.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub settings: Vec<(&'static str, Value)>,
    pub result: Value,
    pub text: String,
    pub csv: String,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let header: Vec<String> = self.settings.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
                format!("# bayes {}: {}\n{}", self.command, header.join(" "), self.text)
            }
            Format::Json => {
                let settings: Map<String, Value> = self.settings.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
                let doc = json!({ "command": self.command, "settings": settings, "result": self.result });
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Create `path` (after [`resolve_output`]) and hand a buffered writer to `f`.
pub fn write_file<F>(path: &Path, f: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let target = resolve_output(path);
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", target.display()));
    let file = File::create(&target).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(target)
}

/// Two-column `key,value` CSV.
pub fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut records = vec![vec!["key".to_string(), "value".to_string()]];
    records.extend(rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]));
    csv_string(&records)
}

/// Quote-aware CSV from string records.
pub fn csv_string(records: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV of UTF-8 fields")
}

/// Aligned `key: value` lines.
pub fn key_value_text(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}
