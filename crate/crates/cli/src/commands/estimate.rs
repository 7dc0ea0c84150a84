use bayes_core::conjugate::{map_estimate, map_estimate_grid, posterior_mean};
use bayes_core::distributions::Mode;
use serde_json::json;

use super::{build_posterior, describe_posterior, grid_target, opt_num, posterior_grid, Posterior};
use crate::args::EstimateArgs;
use crate::error::CliError;
use crate::output::{key_value_csv, key_value_text, write_file, Report};

pub fn run(args: &EstimateArgs, seed: u64) -> Result<Report, CliError> {
    let posterior = build_posterior(&args.model)?;
    let (posterior_json, mut rows) = describe_posterior(&posterior)?;

    let (mean, map, basis) = match &posterior {
        Posterior::CauchyNormal { .. } => {
            let g = posterior_grid(&posterior, &args.grid)?;
            (Some(g.moments().0), map_estimate_grid(&g), "grid")
        }
        _ => {
            let d = grid_target(&posterior)?.expect("named posterior");
            (posterior_mean(&d).ok(), map_estimate(&d), "closed_form")
        }
    };
    let sigma2_mean = match &posterior {
        Posterior::Nig(m) => m.sigma2_marginal()?.mean().ok(),
        _ => None,
    };

    let grid_file = match &args.grid.grid_csv {
        Some(path) => {
            let g = posterior_grid(&posterior, &args.grid)?;
            Some(write_file(path, |w| g.write_csv(w))?)
        }
        None => None,
    };

    let Mode { value: map_value, at_boundary } = map;
    rows.push(("posterior mean", opt_num(mean)));
    rows.push(("MAP", map_value.to_string()));
    rows.push(("MAP at boundary", at_boundary.to_string()));
    if let Posterior::Nig(_) = posterior {
        rows.push(("sigma2 posterior mean", opt_num(sigma2_mean)));
    }
    if let Some(p) = &grid_file {
        rows.push(("grid csv", p.display().to_string()));
    }

    let result = json!({
        "posterior": posterior_json,
        "posterior_mean": mean,
        "map": { "value": map_value, "at_boundary": at_boundary },
        "sigma2_posterior_mean": sigma2_mean,
        "basis": basis,
        "grid_csv": grid_file.as_ref().map(|p| p.display().to_string()),
    });
    Ok(Report {
        command: "estimate",
        settings: vec![
            ("model", json!(args.model.model.label())),
            ("grid_points", json!(args.grid.grid_points)),
            ("seed", json!(seed)),
        ],
        result,
        text: key_value_text(&rows),
        csv: key_value_csv(&rows),
    })
}
