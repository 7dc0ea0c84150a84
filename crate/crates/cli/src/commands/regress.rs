use bayes_core::regression::{regression_report_with_g, CoefficientRow, RegressionData};
use bayes_core::testing::EVIDENCE_LEGEND;
use serde_json::json;

use crate::args::RegressArgs;
use crate::error::CliError;
use crate::input::read_numeric_table;
use crate::output::{csv_string, Report};

pub fn run(args: &RegressArgs, seed: u64) -> Result<Report, CliError> {
    let (names, rows) = read_numeric_table(&args.data_file)?;
    let response = names.iter().position(|n| *n == args.response).ok_or_else(|| {
        CliError::Input(format!(
            "{}: no response column {:?} (have {})",
            args.data_file.display(),
            args.response,
            names.join(",")
        ))
    })?;
    let y: Vec<f64> = rows.iter().map(|r| r[response]).collect();
    let columns: Vec<(String, Vec<f64>)> = names
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != response)
        .map(|(j, name)| (name.clone(), rows.iter().map(|r| r[j]).collect()))
        .collect();
    let data = RegressionData::from_columns(y, columns, !args.no_intercept)?;
    let g = args.g.unwrap_or(data.n() as f64);
    let summary = regression_report_with_g(&data, g)?;

    let mut text = format!(
        "n = {}, p = {}, g = {}{}; Estimate is the posterior mean g/(g+1) * least squares\n\n",
        data.n(),
        data.p(),
        g,
        if args.g.is_none() { " (n)" } else { "" }
    );
    text.push_str(&format_table(&summary.rows));
    text.push('\n');
    text.push_str(EVIDENCE_LEGEND);
    text.push('\n');

    let mut records = vec![["name", "estimate", "bf10", "log10_bf10", "stars"].map(String::from).to_vec()];
    for r in &summary.rows {
        records.push(vec![
            r.name.clone(),
            r.estimate.to_string(),
            r.bf10.map_or(String::new(), |v| v.to_string()),
            r.log10_bf10.map_or(String::new(), |v| v.to_string()),
            r.evidence.map_or("", |e| e.stars()).to_string(),
        ]);
    }
    let settings = vec![
        ("response", json!(args.response)),
        ("g", json!(g)),
        ("intercept", json!(!args.no_intercept)),
        ("estimate", json!("posterior_mean")),
        ("seed", json!(seed)),
    ];
    Ok(Report { command: "regress", settings, result: json!(summary), text, csv: csv_string(&records) })
}

/// Aligned table with columns Estimate, BF, log10(BF) and the star label.
pub fn format_table(rows: &[CoefficientRow]) -> String {
    let name_w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(4);
    let mut out = format!("{:<name_w$}  {:>10}  {:>10}  {:>10}\n", "", "Estimate", "BF", "log10(BF)");
    for r in rows {
        let bf = r.bf10.map_or("-".to_string(), fmt_bf);
        let lbf = r.log10_bf10.map_or("-".to_string(), |v| format!("{v:.4}"));
        let stars = r.evidence.map_or("", |e| e.stars());
        let line = format!("{:<name_w$}  {:>10.4}  {:>10}  {:>10} {}", r.name, r.estimate, bf, lbf, stars);
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn fmt_bf(v: f64) -> String {
    if (1e-4..1e6).contains(&v) {
        format!("{v:.4}")
    } else {
        format!("{v:.4e}")
    }
}
