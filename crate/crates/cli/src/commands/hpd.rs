use bayes_core::conjugate::sample_joint_posterior;
use bayes_core::hpd::{hpd_from_grid, hpd_from_sample};
use bayes_core::Error;
use serde_json::json;

use super::{build_posterior, grid_target, posterior_grid, Posterior};
use crate::args::HpdArgs;
use crate::error::CliError;
use crate::output::{csv_string, write_file, Report};

/// Largest accepted gap between the achieved and requested coverage.
const COVERAGE_SLACK: f64 = 1e-4;

pub fn run(args: &HpdArgs, seed: u64) -> Result<Report, CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Input(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let posterior = build_posterior(&args.model)?;
    let settings = vec![
        ("model", json!(args.model.model.label())),
        ("alpha", json!(args.alpha)),
        ("grid_points", json!(args.grid.grid_points)),
        ("seed", json!(seed)),
    ];
    match args.sample {
        Some(count) => sample_region(args, &posterior, count, seed, settings),
        None => grid_region(args, &posterior, settings),
    }
}

fn grid_region(
    args: &HpdArgs,
    posterior: &Posterior,
    settings: Vec<(&'static str, serde_json::Value)>,
) -> Result<Report, CliError> {
    let target = 1.0 - args.alpha;
    let grid = posterior_grid(posterior, &args.grid)?;
    if let Some(d) = grid_target(posterior)? {
        let (lo, hi) = (grid.xs()[0], grid.xs()[grid.len() - 1]);
        let inside = d.cdf(hi) - d.cdf(lo);
        if inside < target {
            return Err(Error::Numerical(format!(
                "grid [{lo}, {hi}] holds only {inside} of the posterior mass, below the requested {target}; widen the grid"
            ))
            .into());
        }
    }
    let region = hpd_from_grid(&grid, args.alpha)?;
    if (region.coverage - target).abs() > COVERAGE_SLACK {
        return Err(Error::Numerical(format!(
            "coverage {} could not be brought within {COVERAGE_SLACK} of {target} on this grid; refine or widen it",
            region.coverage
        ))
        .into());
    }
    let grid_file = match &args.grid.grid_csv {
        Some(path) => Some(write_file(path, |w| grid.write_csv(w))?),
        None => None,
    };

    let mut text = String::new();
    for (lo, hi) in &region.intervals {
        text.push_str(&format!("interval  [{lo}, {hi}]\n"));
    }
    text.push_str(&format!("k_alpha   {}\n", region.k_alpha));
    text.push_str(&format!("coverage  {}\n", region.coverage));
    text.push_str(&format!("length    {}\n", region.total_length()));
    text.push_str(&format!("grid      [{}, {}]\n", grid.xs()[0], grid.xs()[grid.len() - 1]));
    if region.touches_grid_edge {
        text.push_str("warning   the region reaches the end of the grid\n");
    }
    if let Some(p) = &grid_file {
        text.push_str(&format!("grid csv  {}\n", p.display()));
    }

    let mut records = vec![["lower", "upper", "k_alpha", "coverage"].map(String::from).to_vec()];
    for (lo, hi) in &region.intervals {
        records.push(vec![lo.to_string(), hi.to_string(), region.k_alpha.to_string(), region.coverage.to_string()]);
    }

    let result = json!({
        "intervals": region.intervals,
        "k_alpha": region.k_alpha,
        "coverage": region.coverage,
        "total_length": region.total_length(),
        "touches_grid_edge": region.touches_grid_edge,
        "grid": { "min": grid.xs()[0], "max": grid.xs()[grid.len() - 1], "points": grid.len() },
        "grid_csv": grid_file.as_ref().map(|p| p.display().to_string()),
    });
    Ok(Report { command: "hpd", settings, result, text, csv: csv_string(&records) })
}

fn sample_region(
    args: &HpdArgs,
    posterior: &Posterior,
    count: usize,
    seed: u64,
    settings: Vec<(&'static str, serde_json::Value)>,
) -> Result<Report, CliError> {
    let Posterior::Nig(model) = posterior else {
        return Err(CliError::Input("--sample needs a normal-nig or normal-jeffreys model".into()));
    };
    if count == 0 {
        return Err(CliError::Input("--sample must be at least 1".into()));
    }
    let draws = sample_joint_posterior(model, count, seed)?;
    let log_post = |p: &(f64, f64)| model.joint_log_density(p.0, p.1).unwrap_or(f64::NEG_INFINITY);
    let kept = hpd_from_sample(&draws, log_post, args.alpha)?;
    let threshold = kept.iter().map(|&i| log_post(&draws[i])).fold(f64::INFINITY, f64::min);
    let range = |f: fn(&(f64, f64)) -> f64| {
        kept.iter()
            .map(|&i| f(&draws[i]))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mu_lo, mu_hi) = range(|p| p.0);
    let (s2_lo, s2_hi) = range(|p| p.1);

    let text = format!(
        "draws               {count}\nretained            {}\nlog-density cut     {threshold}\nmu range            [{mu_lo}, {mu_hi}]\nsigma2 range        [{s2_lo}, {s2_hi}]\n",
        kept.len()
    );
    let mut records = vec![["index", "mu", "sigma2"].map(String::from).to_vec()];
    for &i in &kept {
        records.push(vec![i.to_string(), draws[i].0.to_string(), draws[i].1.to_string()]);
    }
    let points: Vec<_> = kept.iter().map(|&i| json!({ "index": i, "mu": draws[i].0, "sigma2": draws[i].1 })).collect();
    let result = json!({
        "draws": count,
        "retained": kept.len(),
        "log_density_threshold": threshold,
        "points": points,
    });
    Ok(Report { command: "hpd", settings, result, text, csv: csv_string(&records) })
}
