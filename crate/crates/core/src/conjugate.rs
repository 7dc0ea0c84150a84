//! Conjugate posterior updates and Bayes point estimators.
//!
//! Four families are covered: Beta–Binomial, Gamma–Poisson (with exposures),
//! Normal mean with known variance, and Normal–Inverse-Gamma for a normal
//! sample with both parameters unknown. Normal data enters through
//! [`SummaryStats`] (n, x̄, Σ(x_i − x̄)²), which is sufficient for both
//! normal models.

use serde::Serialize;

use crate::distributions::{seeded_rng, Distribution, Kind, Mode};
use crate::error::{Error, Result};
use crate::hpd::GridDensity;
use crate::optimize::golden_section_max;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaBinomialModel {
    pub prior_a: f64,
    pub prior_b: f64,
}

impl BetaBinomialModel {
    pub fn new(prior_a: f64, prior_b: f64) -> Result<Self> {
        Distribution::beta(prior_a, prior_b)?;
        Ok(Self { prior_a, prior_b })
    }

    /// The uniform prior Be(1, 1).
    pub fn uniform() -> Self {
        Self { prior_a: 1.0, prior_b: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPoissonModel {
    pub prior_shape: f64,
    pub prior_rate: f64,
}

impl GammaPoissonModel {
    pub fn new(prior_shape: f64, prior_rate: f64) -> Result<Self> {
        Distribution::gamma(prior_shape, prior_rate)?;
        Ok(Self { prior_shape, prior_rate })
    }

    /// Exponential prior with the given rate, i.e. Gamma(1, rate).
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(1.0, rate)
    }
}

/// Normal mean μ with known variance under the prior N(ξ/λ, 1/λ).
/// λ = 0 encodes the flat prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalKnownVarModel {
    pub xi: f64,
    pub lambda: f64,
}

impl NormalKnownVarModel {
    pub fn new(xi: f64, lambda: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::invalid("xi must be finite"));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self { xi, lambda })
    }

    pub fn flat() -> Self {
        Self { xi: 0.0, lambda: 0.0 }
    }

    /// Prior mean ξ/λ; `None` for the flat prior.
    pub fn prior_mean(&self) -> Option<f64> {
        (self.lambda > 0.0).then(|| self.xi / self.lambda)
    }
}

/// Normal–Inverse-Gamma hyperparameters: σ² ~ IG(λ_σ, α/2) and
/// μ | σ² ~ N(ξ, σ²/λ_μ). The prior density is
/// (σ²)^(−λ_σ − 3/2) exp{−(λ_μ(μ − ξ)² + α)/(2σ²)}; the all-zero setting is
/// the noninformative limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalInvGammaModel {
    pub xi: f64,
    pub lambda_mu: f64,
    pub lambda_sigma: f64,
    pub alpha: f64,
}

impl NormalInvGammaModel {
    pub fn new(xi: f64, lambda_mu: f64, lambda_sigma: f64, alpha: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::invalid("xi must be finite"));
        }
        for (name, v) in [("lambda_mu", lambda_mu), ("lambda_sigma", lambda_sigma), ("alpha", alpha)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(Self { xi, lambda_mu, lambda_sigma, alpha })
    }

    pub fn noninformative() -> Self {
        Self { xi: 0.0, lambda_mu: 0.0, lambda_sigma: 0.0, alpha: 0.0 }
    }

    pub fn is_proper(&self) -> bool {
        self.lambda_mu > 0.0 && self.lambda_sigma > 0.0 && self.alpha > 0.0
    }

    fn ensure_proper(&self) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(Error::ImproperPosterior(format!(
                "normal-inverse-gamma needs lambda_mu, lambda_sigma, alpha > 0 (got {}, {}, {})",
                self.lambda_mu, self.lambda_sigma, self.alpha
            )))
        }
    }

    /// Marginal of σ²: IG(λ_σ, α/2).
    pub fn sigma2_marginal(&self) -> Result<Distribution> {
        self.ensure_proper()?;
        Distribution::inverse_gamma(self.lambda_sigma, 0.5 * self.alpha)
    }

    /// Conditional of μ given σ²: N(ξ, σ²/λ_μ).
    pub fn mu_conditional(&self, sigma2: f64) -> Result<Distribution> {
        self.ensure_proper()?;
        Distribution::normal(self.xi, sigma2 / self.lambda_mu)
    }

    /// Marginal of μ: Student-t with 2λ_σ degrees of freedom, location ξ and
    /// scale √(α / (2 λ_σ λ_μ)).
    pub fn mu_marginal(&self) -> Result<Distribution> {
        self.ensure_proper()?;
        let scale = (0.5 * self.alpha / (self.lambda_sigma * self.lambda_mu)).sqrt();
        Distribution::student_t(2.0 * self.lambda_sigma, self.xi, scale)
    }

    /// Normalized joint log-density of (μ, σ²).
    pub fn joint_log_density(&self, mu: f64, sigma2: f64) -> Result<f64> {
        if sigma2 <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.sigma2_marginal()?.log_density(sigma2) + self.mu_conditional(sigma2)?.log_density(mu))
    }
}

/// Sufficient statistics of a normal sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: u64,
    pub mean: f64,
    /// Σ(x_i − x̄)².
    pub sum_sq_dev: f64,
}

impl SummaryStats {
    pub fn new(n: u64, mean: f64, sum_sq_dev: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("summary statistics need n >= 1".into()));
        }
        if !mean.is_finite() {
            return Err(Error::invalid("mean must be finite"));
        }
        if !(sum_sq_dev.is_finite() && sum_sq_dev >= 0.0) {
            return Err(Error::invalid(format!("sum of squared deviations must be >= 0, got {sum_sq_dev}")));
        }
        Ok(Self { n, mean, sum_sq_dev })
    }

    /// Two-pass reduction of a raw sample.
    pub fn from_sample(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptyInput("no observations".into()));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("observations must be finite"));
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let ssd = xs.iter().map(|x| (x - mean).powi(2)).sum();
        Self::new(xs.len() as u64, mean, ssd)
    }

    /// Statistics of the concatenated sample.
    pub fn merge(&self, other: &SummaryStats) -> SummaryStats {
        let (n1, n2) = (self.n as f64, other.n as f64);
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        SummaryStats {
            n: self.n + other.n,
            mean: self.mean + delta * n2 / n,
            sum_sq_dev: self.sum_sq_dev + other.sum_sq_dev + delta * delta * n1 * n2 / n,
        }
    }

    /// Unbiased sample variance s_x²/(n − 1); `None` for n = 1.
    pub fn sample_variance(&self) -> Option<f64> {
        (self.n > 1).then(|| self.sum_sq_dev / (self.n - 1) as f64)
    }
}

/// Beta(a + s, b + n − s).
pub fn update_beta_binomial(m: &BetaBinomialModel, successes: u64, trials: u64) -> Result<Distribution> {
    if successes > trials {
        return Err(Error::invalid(format!("{successes} successes out of {trials} trials")));
    }
    Distribution::beta(m.prior_a + successes as f64, m.prior_b + (trials - successes) as f64)
}

/// Gamma(a + Σx_i, b + ΣN_i) for counts x_i ~ Poisson(N_i θ).
pub fn update_gamma_poisson(m: &GammaPoissonModel, counts: &[u64], exposures: &[f64]) -> Result<Distribution> {
    if counts.len() != exposures.len() {
        return Err(Error::LengthMismatch(format!(
            "{} counts vs {} exposures",
            counts.len(),
            exposures.len()
        )));
    }
    if counts.is_empty() {
        return Err(Error::EmptyInput("no counts".into()));
    }
    if let Some(bad) = exposures.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::invalid(format!("exposures must be > 0, got {bad}")));
    }
    let total: u64 = counts.iter().sum();
    let exposure: f64 = exposures.iter().sum();
    Distribution::gamma(m.prior_shape + total as f64, m.prior_rate + exposure)
}

/// Posterior of μ for n observations with mean x̄ from N(μ, σ²), σ² known:
/// precision n/σ² + λ, mean (n x̄/σ² + ξ)/(n/σ² + λ).
pub fn update_normal_known_var(
    m: &NormalKnownVarModel,
    stats: &SummaryStats,
    known_variance: f64,
) -> Result<Distribution> {
    if !(known_variance.is_finite() && known_variance > 0.0) {
        return Err(Error::invalid(format!("known variance must be > 0, got {known_variance}")));
    }
    let data_precision = stats.n as f64 / known_variance;
    let precision = data_precision + m.lambda;
    if precision <= 0.0 {
        return Err(Error::ImproperPosterior("flat prior with no data".into()));
    }
    Distribution::normal((data_precision * stats.mean + m.xi) / precision, 1.0 / precision)
}

/// Normal–Inverse-Gamma update:
/// ξ' = (λ_μ ξ + n x̄)/(λ_μ + n), λ_μ' = λ_μ + n, λ_σ' = λ_σ + n/2,
/// α' = α + s_x² + n λ_μ/(λ_μ + n) (x̄ − ξ)².
pub fn update_normal_inverse_gamma(m: &NormalInvGammaModel, stats: &SummaryStats) -> Result<NormalInvGammaModel> {
    let n = stats.n as f64;
    let lambda_mu = m.lambda_mu + n;
    let xi = (m.lambda_mu * m.xi + n * stats.mean) / lambda_mu;
    let lambda_sigma = m.lambda_sigma + 0.5 * n;
    let shrink = n * m.lambda_mu / lambda_mu;
    let alpha = m.alpha + stats.sum_sq_dev + shrink * (stats.mean - m.xi).powi(2);
    if !(alpha > 0.0 && lambda_sigma > 0.0) {
        return Err(Error::ImproperPosterior(format!(
            "updated lambda_sigma = {lambda_sigma}, alpha = {alpha}"
        )));
    }
    Ok(NormalInvGammaModel { xi, lambda_mu, lambda_sigma, alpha })
}

/// Posterior under the noninformative (all-zero hyperparameter) prior for a
/// normal sample with unknown mean and variance.
pub fn jeffreys_normal_posterior(stats: &SummaryStats) -> Result<NormalInvGammaModel> {
    if stats.n < 2 {
        return Err(Error::ImproperPosterior("need at least two observations".into()));
    }
    update_normal_inverse_gamma(&NormalInvGammaModel::noninformative(), stats)
}

/// Draws (μ, σ²): σ² ~ IG(λ_σ, α/2), then μ | σ² ~ N(ξ, σ²/λ_μ).
pub fn sample_joint_posterior(m: &NormalInvGammaModel, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let sigma2 = m.sigma2_marginal()?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut rng = seeded_rng(seed);
    let variances = sigma2.sample_with(&mut rng, count);
    let std_normal = Distribution::normal(0.0, 1.0)?;
    let z = std_normal.sample_with(&mut rng, count);
    Ok(variances
        .into_iter()
        .zip(z)
        .map(|(s2, z)| (m.xi + z * (s2 / m.lambda_mu).sqrt(), s2))
        .collect())
}

/// Posterior mean, when it exists.
pub fn posterior_mean(posterior: &Distribution) -> Result<f64> {
    posterior.mean()
}

/// MAP estimate from a closed-form posterior (the mode of the family).
pub fn map_estimate(posterior: &Distribution) -> Mode {
    posterior.mode()
}

/// MAP estimate from a grid: argmax, refined by fitting a parabola to the
/// log-density at the argmax and its two neighbours. A maximum at either end
/// of the grid is returned as-is with `at_boundary` set.
pub fn map_estimate_grid(g: &GridDensity) -> Mode {
    let i = g.argmax();
    let (xs, v) = (g.xs(), g.log_vals());
    if i == 0 || i + 1 == xs.len() {
        return Mode { value: xs[i], at_boundary: true };
    }
    let (x0, x1, x2) = (xs[i - 1], xs[i], xs[i + 1]);
    let (y0, y1, y2) = (v[i - 1], v[i], v[i + 1]);
    if !(y0.is_finite() && y2.is_finite()) {
        return Mode { value: x1, at_boundary: false };
    }
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature >= 0.0 {
        return Mode { value: x1, at_boundary: false };
    }
    // Vertex of the interpolating parabola.
    let vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    Mode { value: vertex.clamp(x0, x2), at_boundary: false }
}

/// MAP estimate of an evaluable log-density: grid argmax refined by
/// golden-section search to 1e-8 on the bracketing cells.
pub fn map_estimate_fn<F: Fn(f64) -> f64>(log_density: F, grid: &[f64]) -> Result<Mode> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("empty grid".into()));
    }
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = log_density(x);
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    if best == 0 || best + 1 == grid.len() {
        return Ok(Mode { value: grid[best], at_boundary: true });
    }
    let value = golden_section_max(&log_density, grid[best - 1], grid[best + 1], 1e-8);
    Ok(Mode { value, at_boundary: false })
}

/// Hyperparameters of a conjugate posterior, for reporting.
pub fn describe(d: &Distribution) -> String {
    match *d.kind() {
        Kind::Beta { a, b } => format!("Beta({a}, {b})"),
        Kind::Gamma { shape, rate } => format!("Gamma({shape}, {rate})"),
        Kind::Normal { mean, variance } => format!("Normal({mean}, {variance})"),
        Kind::InverseGamma { shape, scale } => format!("InverseGamma({shape}, {scale})"),
        Kind::StudentT { df, location, scale } => format!("StudentT({df}, {location}, {scale})"),
        Kind::Cauchy { location, scale } => format!("Cauchy({location}, {scale})"),
        Kind::Binomial { n, p } => format!("Binomial({n}, {p})"),
        Kind::Poisson { rate } => format!("Poisson({rate})"),
    }
}
