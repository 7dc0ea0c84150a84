use bayes_core::conjugate::update_normal_inverse_gamma;
use bayes_core::hpd::normalize;
use bayes_core::predictive::{detect_outliers_with, predictive_from_posterior, TailRule};
use bayes_core::quadrature::linspace;
use bayes_core::hpd::GridDensity;
use serde_json::json;

use super::{nig_prior, sample_from, stats_from};
use crate::args::{OutliersArgs, PredictArgs, TailRuleArg};
use crate::error::CliError;
use crate::output::{csv_string, key_value_csv, key_value_text, write_file, Report};

/// Half-width of the default predictive grid, in predictive scales.
const PREDICTIVE_GRID_SCALES: f64 = 30.0;

pub fn run_predict(args: &PredictArgs, seed: u64) -> Result<Report, CliError> {
    let stats = stats_from(&args.data)?;
    let prior = nig_prior(&args.nig)?;
    let posterior = update_normal_inverse_gamma(&prior, &stats)?;
    let pred = predictive_from_posterior(&posterior)?;

    let grid_file = match &args.grid.grid_csv {
        Some(path) => {
            if args.grid.grid_points < 3 {
                return Err(CliError::Input("--grid-points must be at least 3".into()));
            }
            let half = PREDICTIVE_GRID_SCALES * pred.scale;
            let lo = args.grid.grid_min.unwrap_or(pred.location - half);
            let hi = args.grid.grid_max.unwrap_or(pred.location + half);
            if !(lo < hi) {
                return Err(CliError::Input(format!("empty grid range [{lo}, {hi}]")));
            }
            let g = normalize(&GridDensity::from_fn(linspace(lo, hi, args.grid.grid_points), |x| pred.log_density(x))?)?;
            Some(write_file(path, |w| g.write_csv(w))?)
        }
        None => None,
    };

    let mut rows = vec![
        ("n", stats.n.to_string()),
        ("location", pred.location.to_string()),
        ("scale", pred.scale.to_string()),
        ("df", pred.df.to_string()),
    ];
    if let Some(p) = &grid_file {
        rows.push(("grid csv", p.display().to_string()));
    }
    let result = json!({
        "predictive": pred,
        "posterior": posterior,
        "n": stats.n,
        "grid_csv": grid_file.as_ref().map(|p| p.display().to_string()),
    });
    Ok(Report {
        command: "predict",
        settings: vec![
            ("prior", json!(prior)),
            ("grid_points", json!(args.grid.grid_points)),
            ("seed", json!(seed)),
        ],
        result,
        text: key_value_text(&rows),
        csv: key_value_csv(&rows),
    })
}

pub fn run_outliers(args: &OutliersArgs, seed: u64) -> Result<Report, CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Input(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let data = sample_from(&args.data)?;
    let rule = match args.tail_rule {
        TailRuleArg::Split => TailRule::Split,
        TailRuleArg::PerTail => TailRule::PerTail,
    };
    let report = detect_outliers_with(&data, args.alpha, rule)?;

    let flagged = report.flagged_indices();
    let mut text = format!(
        "n = {}, bound a = {}, flag when F_i < {} or F_i > 1 - {}\n\n",
        report.n,
        report.bound_a,
        match rule {
            TailRule::Split => "a/2",
            TailRule::PerTail => "a",
        },
        match rule {
            TailRule::Split => "a/2",
            TailRule::PerTail => "a",
        },
    );
    text.push_str(&format!("{:>6}  {:>24}  {:>24}  flagged\n", "index", "value", "F_i"));
    for r in &report.rows {
        let mark = match (r.flagged, r.degenerate) {
            (true, _) => "yes",
            (false, true) => "no (degenerate)",
            (false, false) => "no",
        };
        text.push_str(&format!("{:>6}  {:>24}  {:>24}  {mark}\n", r.index, r.value, r.loo_cdf));
    }
    text.push_str(&format!("\nflagged: {flagged:?}\n"));

    let mut records = vec![["index", "value", "F_i", "flagged"].map(String::from).to_vec()];
    for r in &report.rows {
        records.push(vec![r.index.to_string(), r.value.to_string(), r.loo_cdf.to_string(), r.flagged.to_string()]);
    }
    Ok(Report {
        command: "outliers",
        settings: vec![
            ("alpha", json!(args.alpha)),
            ("tail_rule", json!(rule)),
            ("seed", json!(seed)),
        ],
        result: json!(report),
        text,
        csv: csv_string(&records),
    })
}
