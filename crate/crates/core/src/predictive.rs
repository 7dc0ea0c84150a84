//! Posterior predictive distributions for the normal model and
//! leave-one-out predictive outlier detection.

use std::io::{self, Write};

use serde::Serialize;

use crate::conjugate::{jeffreys_normal_posterior, NormalInvGammaModel, SummaryStats};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::hpd::GridDensity;

/// Student-t predictive for the next observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictiveT {
    pub location: f64,
    pub scale: f64,
    pub df: f64,
}

impl PredictiveT {
    pub fn distribution(&self) -> Distribution {
        Distribution::student_t(self.df, self.location, self.scale)
            .expect("predictive parameters are validated on construction")
    }

    pub fn log_density(&self, x: f64) -> f64 {
        self.distribution().log_density(x)
    }

    pub fn density(&self, x: f64) -> f64 {
        self.distribution().density(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.distribution().cdf(x)
    }

    /// Predictive density on `points` equally spaced values over
    /// location ± `sds`·scale.
    pub fn grid(&self, sds: f64, points: usize) -> Result<GridDensity> {
        let half = sds * self.scale;
        let xs = crate::quadrature::linspace(self.location - half, self.location + half, points);
        GridDensity::from_fn(xs, |x| self.log_density(x))
    }
}

/// Predictive of x_{n+1} under a proper NIG posterior (ξ, λ_μ, λ_σ, α):
/// Student-t with ν = 2λ_σ, location ξ and scale² = α(λ_μ + 1)/(λ_μ ν).
///
/// Integrating N(x; μ, σ²) against the posterior leaves the kernel
/// [α + λ_μ/(λ_μ + 1)(x − ξ)²]^{−(ν+1)/2}, and the scale above is the one
/// that kernel implies.
pub fn predictive_from_posterior(m: &NormalInvGammaModel) -> Result<PredictiveT> {
    if !m.is_proper() {
        return Err(Error::ImproperPosterior(format!(
            "predictive needs lambda_mu, lambda_sigma, alpha > 0 (got {}, {}, {})",
            m.lambda_mu, m.lambda_sigma, m.alpha
        )));
    }
    let df = 2.0 * m.lambda_sigma;
    let scale = (m.alpha * (m.lambda_mu + 1.0) / (m.lambda_mu * df)).sqrt();
    Distribution::student_t(df, m.xi, scale)?;
    Ok(PredictiveT { location: m.xi, scale, df })
}

/// Noninformative-prior predictive from summary statistics (n ≥ 2):
/// df n, location x̄, scale s_x·√(n+1)/n.
pub fn noninformative_predictive(stats: &SummaryStats) -> Result<PredictiveT> {
    predictive_from_posterior(&jeffreys_normal_posterior(stats)?)
}

/// F_i together with a flag for a degenerate leave-one-out sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LooCdf {
    pub value: f64,
    pub degenerate: bool,
}

fn check_min_len(data: &[f64]) -> Result<()> {
    if data.len() < 3 {
        return Err(Error::invalid(format!(
            "leave-one-out prediction needs at least 3 observations, got {}",
            data.len()
        )));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("observations must be finite"));
    }
    Ok(())
}

/// F_i(x_i): the noninformative predictive built without x_i, evaluated at
/// x_i. If the remaining values are all equal the predictive is a point
/// mass, and F_i is 0.5 at that value, otherwise 0 or 1 by side.
pub fn loo_predictive_cdf(data: &[f64], i: usize) -> Result<LooCdf> {
    check_min_len(data)?;
    if i >= data.len() {
        return Err(Error::invalid(format!("index {i} out of range (n = {})", data.len())));
    }
    Ok(loo_unchecked(data, i))
}

fn loo_unchecked(data: &[f64], i: usize) -> LooCdf {
    let rest: Vec<f64> = data.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, x)| *x).collect();
    let stats = SummaryStats::from_sample(&rest).expect("n - 1 >= 2 finite values");
    let x = data[i];
    // Rounding noise in the two-pass variance of a constant sample.
    let noise = 16.0 * f64::EPSILON * f64::EPSILON * stats.mean * stats.mean * rest.len() as f64;
    if stats.sum_sq_dev <= noise {
        let value = if x == stats.mean {
            0.5
        } else if x < stats.mean {
            0.0
        } else {
            1.0
        };
        return LooCdf { value, degenerate: true };
    }
    let pred = noninformative_predictive(&stats).expect("proper once the sample varies");
    LooCdf { value: pred.cdf(x), degenerate: false }
}

/// a = 1 − α^{1/n}, the per-observation level with 1 − (1 − a)ⁿ = 1 − α.
pub fn bonferroni_bound(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("bonferroni bound needs n >= 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    // −expm1(ln α / n) keeps precision when a is tiny.
    Ok(-(alpha.ln() / n as f64).exp_m1())
}

/// How the per-observation bound a is spread over the two tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// Flag iff F_i < a/2 or F_i > 1 − a/2, so each observation is flagged
    /// with probability a under uniform F_i.
    #[default]
    Split,
    /// Flag iff F_i < a or F_i > 1 − a: probability 2a per observation.
    PerTail,
}

impl TailRule {
    fn flags(self, f: f64, a: f64) -> bool {
        let t = match self {
            TailRule::Split => 0.5 * a,
            TailRule::PerTail => a,
        };
        f < t || f > 1.0 - t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutlierRow {
    pub index: usize,
    pub value: f64,
    pub loo_cdf: f64,
    pub flagged: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub n: usize,
    pub alpha: f64,
    pub bound_a: f64,
    pub tail_rule: TailRule,
    pub rows: Vec<OutlierRow>,
}

impl OutlierReport {
    pub fn flagged_indices(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.flagged).map(|r| r.index).collect()
    }

    /// CSV with header `index,value,F_i,flagged`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,value,F_i,flagged")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.index, r.value, r.loo_cdf, r.flagged)?;
        }
        Ok(())
    }
}

/// Leave-one-out outlier scan with the default [`TailRule::Split`].
pub fn detect_outliers(data: &[f64], alpha: f64) -> Result<OutlierReport> {
    detect_outliers_with(data, alpha, TailRule::default())
}

/// Computes every F_i and flags those beyond the Bonferroni bound for `alpha`.
pub fn detect_outliers_with(data: &[f64], alpha: f64, rule: TailRule) -> Result<OutlierReport> {
    check_min_len(data)?;
    let bound_a = bonferroni_bound(data.len(), alpha)?;
    let rows = (0..data.len())
        .map(|i| {
            let f = loo_unchecked(data, i);
            OutlierRow {
                index: i,
                value: data[i],
                loo_cdf: f.value,
                flagged: rule.flags(f.value, bound_a),
                degenerate: f.degenerate,
            }
        })
        .collect();
    Ok(OutlierReport { n: data.len(), alpha, bound_a, tail_rule: rule, rows })
}
