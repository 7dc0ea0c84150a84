//! CSV ingestion. Every reader reports problems with the file and line.

use std::path::Path;

use crate::error::CliError;

/// One row of a survival contingency table (`stratum,group,survived,total`).
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyRow {
    pub stratum: String,
    pub group: String,
    pub survived: u64,
    pub total: u64,
}

pub const CONTINGENCY_HEADER: [&str; 4] = ["stratum", "group", "survived", "total"];

fn open(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn headers(path: &Path, reader: &mut csv::Reader<std::fs::File>) -> Result<Vec<String>, CliError> {
    let h = reader.headers().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(h.iter().map(str::to_string).collect())
}

fn records(path: &Path, reader: csv::Reader<std::fs::File>) -> Result<Vec<(u64, csv::StringRecord)>, CliError> {
    let mut out = Vec::new();
    for rec in reader.into_records() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push((line, rec));
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, raw: &str, what: &str) -> Result<T, CliError> {
    raw.parse()
        .map_err(|_| CliError::Input(format!("{}:{line}: column {name}: expected {what}, got {raw:?}", path.display())))
}

/// Rows of a contingency CSV, optionally restricted to one group.
pub fn read_contingency(path: &Path, group: Option<&str>) -> Result<Vec<ContingencyRow>, CliError> {
    let mut reader = open(path)?;
    let head = headers(path, &mut reader)?;
    if head != CONTINGENCY_HEADER {
        return Err(CliError::Input(format!(
            "{}: expected header {}, got {}",
            path.display(),
            CONTINGENCY_HEADER.join(","),
            head.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in records(path, reader)? {
        let survived: u64 = parse_field(path, line, "survived", &rec[2], "a non-negative integer")?;
        let total: u64 = parse_field(path, line, "total", &rec[3], "a non-negative integer")?;
        if survived > total {
            return Err(CliError::Input(format!(
                "{}:{line}: survived ({survived}) exceeds total ({total})",
                path.display()
            )));
        }
        rows.push(ContingencyRow { stratum: rec[0].to_string(), group: rec[1].to_string(), survived, total });
    }
    if let Some(g) = group {
        rows.retain(|r| r.group == g);
        if rows.is_empty() {
            return Err(CliError::Input(format!("{}: no rows for group {g:?}", path.display())));
        }
    }
    Ok(rows)
}

/// True if the file's header is the contingency schema.
pub fn is_contingency(path: &Path) -> Result<bool, CliError> {
    let mut reader = open(path)?;
    Ok(headers(path, &mut reader)? == CONTINGENCY_HEADER)
}

/// One numeric column. `column` may be omitted for single-column files.
pub fn read_column(path: &Path, column: Option<&str>) -> Result<Vec<f64>, CliError> {
    let (names, rows) = read_numeric_table(path)?;
    let j = match column {
        Some(c) => names
            .iter()
            .position(|n| n == c)
            .ok_or_else(|| CliError::Input(format!("{}: no column {c:?} (have {})", path.display(), names.join(","))))?,
        None if names.len() == 1 => 0,
        None => {
            return Err(CliError::Input(format!(
                "{}: several columns ({}); pick one with --column",
                path.display(),
                names.join(",")
            )))
        }
    };
    Ok(rows.into_iter().map(|r| r[j]).collect())
}

/// Header names and all rows of a CSV whose every field is a finite number.
pub fn read_numeric_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut reader = open(path)?;
    let names = headers(path, &mut reader)?;
    let mut rows = Vec::new();
    for (line, rec) in records(path, reader)? {
        if rec.len() != names.len() {
            return Err(CliError::Input(format!(
                "{}:{line}: expected {} fields, found {}",
                path.display(),
                names.len(),
                rec.len()
            )));
        }
        let mut row = Vec::with_capacity(rec.len());
        for (name, raw) in names.iter().zip(rec.iter()) {
            let v: f64 = parse_field(path, line, name, raw, "a number")?;
            if !v.is_finite() {
                return Err(CliError::Input(format!("{}:{line}: column {name}: value is not finite", path.display())));
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok((names, rows))
}
