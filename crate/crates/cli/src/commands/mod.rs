//! One module per subcommand, plus the model and data plumbing they share.

pub mod estimate;
pub mod hpd;
pub mod predict;
pub mod regress;

use bayes_core::conjugate::{
    jeffreys_normal_posterior, update_beta_binomial, update_gamma_poisson, update_normal_inverse_gamma,
    update_normal_known_var, BetaBinomialModel, GammaPoissonModel, NormalInvGammaModel, NormalKnownVarModel,
    SummaryStats,
};
use bayes_core::distributions::Distribution;
use bayes_core::hpd::{cauchy_normal_default_grid, cauchy_normal_log_posterior, normalize, GridDensity};
use bayes_core::quadrature::linspace;
use serde_json::{json, Value};

use crate::args::{DataArgs, GridArgs, Model, ModelArgs, NigPriorArgs};
use crate::error::CliError;
use crate::input;

/// Tail mass left off each end of the default grid for a named posterior.
const DEFAULT_GRID_TAIL: f64 = 1e-10;

pub enum Posterior {
    Univariate(Distribution),
    Nig(NormalInvGammaModel),
    CauchyNormal { data: Vec<f64>, prior_var: f64 },
}

fn missing(flag: &str, model: Model) -> CliError {
    CliError::Input(format!("model {} needs {flag}", model.label()))
}

/// The raw sample behind --data or --data-file.
pub fn sample_from(d: &DataArgs) -> Result<Vec<f64>, CliError> {
    match (&d.data, &d.data_file) {
        (Some(_), Some(_)) => Err(CliError::Input("give --data or --data-file, not both".into())),
        (Some(xs), None) => {
            if xs.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Input("--data values must be finite".into()));
            }
            Ok(xs.clone())
        }
        (None, Some(path)) => input::read_column(path, d.column.as_deref()),
        (None, None) => Err(CliError::Input("no data: give --data or --data-file".into())),
    }
}

/// Summary statistics from --stats or from the raw sample.
pub fn stats_from(d: &DataArgs) -> Result<SummaryStats, CliError> {
    match (d.stats, d.data.is_some() || d.data_file.is_some()) {
        (Some(_), true) => Err(CliError::Input("give --stats or a sample, not both".into())),
        (Some(s), false) => Ok(s),
        (None, _) => Ok(SummaryStats::from_sample(&sample_from(d)?)?),
    }
}

pub fn nig_prior(a: &NigPriorArgs) -> Result<NormalInvGammaModel, CliError> {
    Ok(NormalInvGammaModel::new(a.xi, a.lambda_mu, a.lambda_sigma, a.prior_alpha)?)
}

pub fn build_posterior(m: &ModelArgs) -> Result<Posterior, CliError> {
    let contingency = || -> Result<Option<Vec<input::ContingencyRow>>, CliError> {
        match &m.data.data_file {
            Some(path) if input::is_contingency(path)? => Ok(Some(input::read_contingency(path, m.group.as_deref())?)),
            Some(path) => Err(CliError::Input(format!(
                "{}: model {} reads a contingency CSV with header {}",
                path.display(),
                m.model.label(),
                input::CONTINGENCY_HEADER.join(",")
            ))),
            None => Ok(None),
        }
    };
    match m.model {
        Model::BetaBinomial => {
            let prior = BetaBinomialModel::new(m.prior_a, m.prior_b)?;
            let (s, n) = match (m.successes, m.trials, contingency()?) {
                (Some(s), Some(n), None) => (s, n),
                (None, None, Some(rows)) => {
                    (rows.iter().map(|r| r.survived).sum(), rows.iter().map(|r| r.total).sum())
                }
                _ => return Err(missing("--successes and --trials, or a contingency --data-file", m.model)),
            };
            Ok(Posterior::Univariate(update_beta_binomial(&prior, s, n)?))
        }
        Model::GammaPoisson => {
            let shape = m.prior_shape.ok_or_else(|| missing("--prior-shape", m.model))?;
            let rate = m.prior_rate.ok_or_else(|| missing("--prior-rate", m.model))?;
            let prior = GammaPoissonModel::new(shape, rate)?;
            let (counts, exposures) = match (&m.counts, contingency()?) {
                (Some(c), None) => {
                    let e = m.exposures.clone().unwrap_or_else(|| vec![1.0; c.len()]);
                    (c.clone(), e)
                }
                (None, Some(rows)) => (
                    rows.iter().map(|r| r.survived).collect(),
                    rows.iter().map(|r| r.total as f64).collect(),
                ),
                _ => return Err(missing("--counts or a contingency --data-file", m.model)),
            };
            Ok(Posterior::Univariate(update_gamma_poisson(&prior, &counts, &exposures)?))
        }
        Model::NormalKnownVar => {
            let var = m.known_var.ok_or_else(|| missing("--known-var", m.model))?;
            let prior = NormalKnownVarModel::new(m.prior_mean * m.prior_precision, m.prior_precision)?;
            Ok(Posterior::Univariate(update_normal_known_var(&prior, &stats_from(&m.data)?, var)?))
        }
        Model::NormalNig => {
            let post = update_normal_inverse_gamma(&nig_prior(&m.nig)?, &stats_from(&m.data)?)?;
            Ok(Posterior::Nig(post))
        }
        Model::NormalJeffreys => Ok(Posterior::Nig(jeffreys_normal_posterior(&stats_from(&m.data)?)?)),
        Model::CauchyNormal => {
            let prior_var = m.prior_var.ok_or_else(|| missing("--prior-var", m.model))?;
            Ok(Posterior::CauchyNormal { data: sample_from(&m.data)?, prior_var })
        }
    }
}

/// The univariate density a grid report is about: the posterior itself, or
/// the marginal of μ for normal–inverse-gamma posteriors.
pub fn grid_target(p: &Posterior) -> Result<Option<Distribution>, CliError> {
    Ok(match p {
        Posterior::Univariate(d) => Some(*d),
        Posterior::Nig(m) => Some(m.mu_marginal()?),
        Posterior::CauchyNormal { .. } => None,
    })
}

fn check_grid_args(g: &GridArgs) -> Result<(), CliError> {
    if g.grid_points < 3 {
        return Err(CliError::Input(format!("--grid-points must be at least 3, got {}", g.grid_points)));
    }
    match (g.grid_min, g.grid_max) {
        (Some(lo), Some(hi)) if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
            Err(CliError::Input(format!("need finite --grid-min < --grid-max, got {lo} and {hi}")))
        }
        _ => Ok(()),
    }
}

/// Normalized density grid for the posterior (μ marginal for NIG).
pub fn posterior_grid(p: &Posterior, g: &GridArgs) -> Result<GridDensity, CliError> {
    check_grid_args(g)?;
    let raw = match p {
        Posterior::CauchyNormal { data, prior_var } => {
            let xs = match (g.grid_min, g.grid_max) {
                (None, None) => cauchy_normal_default_grid(data, *prior_var, g.grid_points)?,
                (lo, hi) => {
                    let auto = cauchy_normal_default_grid(data, *prior_var, g.grid_points)?;
                    let lo = lo.unwrap_or(auto[0]);
                    let hi = hi.unwrap_or(auto[auto.len() - 1]);
                    if lo >= hi {
                        return Err(CliError::Input(format!("empty grid range [{lo}, {hi}]")));
                    }
                    linspace(lo, hi, g.grid_points)
                }
            };
            cauchy_normal_log_posterior(data, *prior_var, &xs)?
        }
        _ => {
            let d = grid_target(p)?.expect("named posterior");
            let (lo, hi) = grid_range(&d, g)?;
            GridDensity::from_fn(linspace(lo, hi, g.grid_points), |x| d.log_density(x))?
        }
    };
    Ok(normalize(&raw)?)
}

/// User-given ends, else the 1e-10 and 1 − 1e-10 quantiles clipped to the support.
pub fn grid_range(d: &Distribution, g: &GridArgs) -> Result<(f64, f64), CliError> {
    let lo = match g.grid_min {
        Some(v) => v,
        None => d.quantile(DEFAULT_GRID_TAIL)?,
    };
    let hi = match g.grid_max {
        Some(v) => v,
        None => d.quantile(1.0 - DEFAULT_GRID_TAIL)?,
    };
    let (s_lo, s_hi) = d.support();
    let (lo, hi) = (lo.max(s_lo), hi.min(s_hi));
    if !(lo < hi) {
        return Err(CliError::Input(format!("grid range [{lo}, {hi}] misses the support")));
    }
    Ok((lo, hi))
}

/// JSON and text descriptions of a posterior.
pub fn describe_posterior(p: &Posterior) -> Result<(Value, Vec<(&'static str, String)>), CliError> {
    use bayes_core::conjugate::describe;
    Ok(match p {
        Posterior::Univariate(d) => (json!(d), vec![("posterior", describe(d))]),
        Posterior::Nig(m) => {
            let mu = m.mu_marginal()?;
            let s2 = m.sigma2_marginal()?;
            (
                json!({
                    "family": "normal_inverse_gamma",
                    "xi": m.xi,
                    "lambda_mu": m.lambda_mu,
                    "lambda_sigma": m.lambda_sigma,
                    "alpha": m.alpha,
                    "mu_marginal": mu,
                    "sigma2_marginal": s2,
                }),
                vec![
                    (
                        "posterior",
                        format!(
                            "NormalInverseGamma(xi={}, lambda_mu={}, lambda_sigma={}, alpha={})",
                            m.xi, m.lambda_mu, m.lambda_sigma, m.alpha
                        ),
                    ),
                    ("mu marginal", describe(&mu)),
                    ("sigma2 marginal", describe(&s2)),
                ],
            )
        }
        Posterior::CauchyNormal { data, prior_var } => (
            json!({ "family": "cauchy_normal_grid", "data": data, "prior_variance": prior_var }),
            vec![("posterior", format!("Cauchy location, N(0, {prior_var}) prior, {} observations", data.len()))],
        ),
    })
}

/// Text for an optional float.
pub fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}
