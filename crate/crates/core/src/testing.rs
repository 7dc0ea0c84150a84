//! Bayesian hypothesis tests: 0–1 loss decisions, Bayes factors, point-null
//! tests with a spike-and-slab prior, the improper-prior pathologies and
//! posterior model probabilities.

use std::f64::consts::{LN_10, PI};
use std::io::{self, Write};

use serde::Serialize;

use crate::distributions::{Distribution, Kind};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{log_sum_exp, std_normal_cdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    #[serde(rename = "accept_H0")]
    AcceptH0,
    #[serde(rename = "reject_H0")]
    RejectH0,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::AcceptH0 => "accept_H0",
            Decision::RejectH0 => "reject_H0",
        }
    }
}

/// Outcome of the 0–1 loss rule. `tie` is set when the posterior null
/// probability is exactly 1/2, which resolves to rejection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecisionOutcome {
    pub decision: Decision,
    pub tie: bool,
}

/// Accept H0 iff its posterior probability is strictly above 1/2.
pub fn decide_zero_one(posterior_null_prob: f64) -> DecisionOutcome {
    DecisionOutcome {
        decision: if posterior_null_prob > 0.5 { Decision::AcceptH0 } else { Decision::RejectH0 },
        tie: posterior_null_prob == 0.5,
    }
}

/// Strength of evidence against H0 on the log10 Bayes-factor scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceLabel {
    None,
    Poor,
    Substantial,
    Strong,
    Decisive,
}

impl EvidenceLabel {
    pub fn stars(self) -> &'static str {
        match self {
            EvidenceLabel::None => "",
            EvidenceLabel::Poor => "(*)",
            EvidenceLabel::Substantial => "(**)",
            EvidenceLabel::Strong => "(***)",
            EvidenceLabel::Decisive => "(****)",
        }
    }
}

pub const EVIDENCE_LEGEND: &str = "evidence against H0: (****) decisive, (***) strong, (**) substantial, (*) poor";

/// Jeffreys-scale cutoffs: ≤ 0 none, (0, 0.5] poor, (0.5, 1] substantial,
/// (1, 2] strong, > 2 decisive.
pub fn evidence_label(log10_bf: f64) -> EvidenceLabel {
    if log10_bf > 2.0 {
        EvidenceLabel::Decisive
    } else if log10_bf > 1.0 {
        EvidenceLabel::Strong
    } else if log10_bf > 0.5 {
        EvidenceLabel::Substantial
    } else if log10_bf > 0.0 {
        EvidenceLabel::Poor
    } else {
        EvidenceLabel::None
    }
}

/// Point-null prior ρ·δ_{θ0} + (1 − ρ)·π1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointNullSpec {
    pub theta0: f64,
    pub rho: f64,
    pub slab: Distribution,
}

impl PointNullSpec {
    pub fn new(theta0: f64, rho: f64, slab: Distribution) -> Result<Self> {
        check_rho(rho)?;
        if !theta0.is_finite() {
            return Err(Error::invalid("theta0 must be finite"));
        }
        Ok(Self { theta0, rho, slab })
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("prior null weight rho must lie in (0, 1), got {rho}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub bf10: f64,
    pub log10_bf10: f64,
    pub posterior_null_prob: f64,
    pub decision: Decision,
    pub tie: bool,
    pub evidence: EvidenceLabel,
}

impl TestResult {
    /// Assemble from ln B10 and the prior null weight:
    /// P(H0 | x) = [1 + ((1 − ρ)/ρ) B10]⁻¹.
    pub fn from_ln_bf10(ln_bf10: f64, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let prob = posterior_prob_from_ln_bf(ln_bf10, rho);
        let outcome = decide_zero_one(prob);
        let log10_bf10 = ln_bf10 / LN_10;
        Ok(TestResult {
            bf10: ln_bf10.exp(),
            log10_bf10,
            posterior_null_prob: prob,
            decision: outcome.decision,
            tie: outcome.tie,
            evidence: evidence_label(log10_bf10),
        })
    }
}

// 1 / (1 + e^{ln((1−ρ)/ρ) + ln B10}) as a logistic, stable for any ln B10.
fn posterior_prob_from_ln_bf(ln_bf10: f64, rho: f64) -> f64 {
    let t = ((1.0 - rho) / rho).ln() + ln_bf10;
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

/// ln B10 for H0: μ = 0 vs H1: μ ~ N(0, τ²), with x ~ N(μ, σ²).
pub fn ln_bf10_normal_point_null(x: f64, sigma: f64, tau: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_positive("tau", tau)?;
    let s2 = sigma * sigma;
    let v = s2 + tau * tau;
    // ln(σ/√(σ²+τ²)) + x²τ² / (2σ²(σ²+τ²))
    Ok(0.5 * (s2 / v).ln() + x * x * tau * tau / (2.0 * s2 * v))
}

/// B10 = σ/√(σ²+τ²) · exp(−x²/2(σ²+τ²)) / exp(−x²/2σ²).
pub fn bf10_normal_point_null(x: f64, sigma: f64, tau: f64) -> Result<f64> {
    Ok(ln_bf10_normal_point_null(x, sigma, tau)?.exp())
}

/// π(μ = 0 | x) = [1 + (1−ρ)/ρ · √(σ²/(σ²+τ²)) · exp(τ²x²/(2σ²(σ²+τ²)))]⁻¹.
pub fn posterior_null_prob_normal(x: f64, sigma: f64, tau: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(posterior_prob_from_ln_bf(ln_bf10_normal_point_null(x, sigma, tau)?, rho))
}

/// Full test report for the normal point null.
pub fn test_normal_point_null(x: f64, sigma: f64, tau: f64, rho: f64) -> Result<TestResult> {
    TestResult::from_ln_bf10(ln_bf10_normal_point_null(x, sigma, tau)?, rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub tau: f64,
    pub bf10: f64,
    pub posterior_null_prob: f64,
}

/// B10 and P(H0 | x) along a grid of slab standard deviations τ.
pub fn lindley_sweep(x: f64, sigma: f64, rho: f64, tau_grid: &[f64]) -> Result<Vec<SweepPoint>> {
    check_rho(rho)?;
    if tau_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("tau grid must be sorted"));
    }
    tau_grid
        .iter()
        .map(|&tau| {
            let ln_bf = ln_bf10_normal_point_null(x, sigma, tau)?;
            Ok(SweepPoint {
                tau,
                bf10: ln_bf.exp(),
                posterior_null_prob: posterior_prob_from_ln_bf(ln_bf, rho),
            })
        })
        .collect()
}

/// CSV with header `tau,bf10,posterior_prob`.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "tau,bf10,posterior_prob")?;
    for p in points {
        writeln!(out, "{},{},{}", p.tau, p.bf10, p.posterior_null_prob)?;
    }
    Ok(())
}

/// P(μ = 0 | x) for x ~ N(μ, 1) under ½δ₀ + ½·(Lebesgue measure):
/// 1 / (1 + √(2π) e^{x²/2}). Never exceeds 1/(1 + √(2π)).
pub fn improper_point_null_prob(x: f64) -> f64 {
    // ln B10 = ln √(2π) + x²/2 with ρ = 1/2.
    posterior_prob_from_ln_bf(0.5 * (2.0 * PI).ln() + 0.5 * x * x, 0.5)
}

/// π(θ ≤ 0 | x) = Φ(−x) for x ~ N(θ, 1) under a flat prior on θ.
pub fn one_sided_posterior_prob(x: f64) -> f64 {
    std_normal_cdf(-x)
}

/// Prior on θ under one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HypothesisPrior {
    /// Dirac mass at θ0.
    PointMass { theta0: f64 },
    Proper { prior: Distribution },
    /// Lebesgue measure on ℝ. Its normalizing constant is arbitrary, so
    /// Bayes factors built on it are refused.
    Flat,
}

/// Marginal m(x) = ∫ N(x; θ, σ²) π(dθ) for one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalSpec {
    pub sigma: f64,
    pub prior: HypothesisPrior,
}

/// ln m(x), with the integral over θ done by adaptive quadrature (or
/// exactly for a point mass).
pub fn log_marginal(spec: &MarginalSpec, x: f64) -> Result<f64> {
    check_positive("sigma", spec.sigma)?;
    let lik = Distribution::normal(0.0, spec.sigma * spec.sigma)?;
    let log_lik = |theta: f64| lik.log_density(x - theta);
    match spec.prior {
        HypothesisPrior::PointMass { theta0 } => Ok(log_lik(theta0)),
        HypothesisPrior::Flat => Err(Error::ImproperPrior(
            "a flat prior has no normalizing constant, so its marginal cannot weigh against another hypothesis"
                .into(),
        )),
        HypothesisPrior::Proper { prior } => {
            if prior.is_discrete() {
                return Err(Error::invalid("discrete priors on a location are not supported"));
            }
            // Shift by the likelihood maximum so the integrand stays O(1).
            let shift = log_lik(x);
            let integrand = |theta: f64| (log_lik(theta) + prior.log_density(theta) - shift).exp();
            let (lo, hi) = prior.support();
            let center = match *prior.kind() {
                Kind::Normal { mean, .. } => mean,
                Kind::StudentT { location, .. } | Kind::Cauchy { location, .. } => location,
                _ => prior.mode().value,
            };
            let mut cuts = vec![lo, x.clamp(lo, hi), center.clamp(lo, hi), hi];
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 4000 };
            let mut total = 0.0;
            for w in cuts.windows(2) {
                total += integrate(integrand, w[0], w[1], opts)?.value;
            }
            if !(total.is_finite() && total > 0.0) {
                return Err(Error::Numerical(format!("marginal integral is {total}")));
            }
            Ok(total.ln() + shift)
        }
    }
}

/// B10 = m1(x)/m0(x) by quadrature of both marginals, formed in log space.
/// Flat (improper) priors on either side are an error.
pub fn bf_by_quadrature(m0: &MarginalSpec, m1: &MarginalSpec, x: f64) -> Result<f64> {
    let l0 = log_marginal(m0, x)?;
    let l1 = log_marginal(m1, x)?;
    Ok((l1 - l0).exp())
}

/// π(M_i | x) ∝ p_i m_i(x), normalized with log-sum-exp.
pub fn model_posterior_probs(log_marginals: &[f64], prior_weights: &[f64]) -> Result<Vec<f64>> {
    if log_marginals.len() != prior_weights.len() {
        return Err(Error::LengthMismatch(format!(
            "{} marginals vs {} prior weights",
            log_marginals.len(),
            prior_weights.len()
        )));
    }
    if log_marginals.is_empty() {
        return Err(Error::EmptyInput("no models".into()));
    }
    if prior_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::invalid("prior weights must be >= 0"));
    }
    let total: f64 = prior_weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("prior weights sum to {total}, not 1")));
    }
    if log_marginals.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(Error::invalid("log marginals must be finite or -inf"));
    }
    let scores: Vec<f64> = log_marginals
        .iter()
        .zip(prior_weights)
        .map(|(l, w)| if *w == 0.0 { f64::NEG_INFINITY } else { l + w.ln() })
        .collect();
    let norm = log_sum_exp(&scores);
    if norm == f64::NEG_INFINITY {
        return Err(Error::Numerical("every model has zero posterior mass".into()));
    }
    Ok(scores.iter().map(|s| (s - norm).exp()).collect())
}
