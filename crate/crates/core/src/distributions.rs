//! Univariate distributions with exact densities, CDFs, quantiles and
//! seeded sampling.
//!
//! Densities are evaluated in log space. CDFs reduce to the regularized
//! incomplete gamma and beta functions in [`crate::special`]. Quantiles of
//! continuous families invert the CDF by bracketing and bisection.
//!
//! # Random streams
//!
//! Sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. ChaCha output is specified bit-for-bit and
//! does not depend on platform endianness or word size, so a given
//! `(distribution, count, seed)` always yields the same sequence.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{bisect, expand_bracket};
use crate::special::{beta_inc, gamma_p, gamma_q, ln_beta, ln_gamma, std_normal_cdf};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Seeded generator used for every sampling routine in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters of a distribution. Read-only: build values through the
/// validating constructors on [`Distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Kind {
    Normal { mean: f64, variance: f64 },
    /// Shape–rate parameterization: density ∝ x^(shape−1) e^(−rate·x).
    Gamma { shape: f64, rate: f64 },
    /// Density ∝ x^(−shape−1) e^(−scale/x).
    InverseGamma { shape: f64, scale: f64 },
    Beta { a: f64, b: f64 },
    Binomial { n: u64, p: f64 },
    Poisson { rate: f64 },
    StudentT { df: f64, location: f64, scale: f64 },
    Cauchy { location: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    kind: Kind,
}

/// A mode, flagged when it sits on the edge of the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub value: f64,
    pub at_boundary: bool,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {v}")))
    }
}

impl Distribution {
    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        finite("normal mean", mean)?;
        positive("normal variance", variance)?;
        Ok(Self { kind: Kind::Normal { mean, variance } })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        positive("gamma shape", shape)?;
        positive("gamma rate", rate)?;
        Ok(Self { kind: Kind::Gamma { shape, rate } })
    }

    pub fn inverse_gamma(shape: f64, scale: f64) -> Result<Self> {
        positive("inverse-gamma shape", shape)?;
        positive("inverse-gamma scale", scale)?;
        Ok(Self { kind: Kind::InverseGamma { shape, scale } })
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        positive("beta a", a)?;
        positive("beta b", b)?;
        Ok(Self { kind: Kind::Beta { a, b } })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("binomial p must lie in [0, 1], got {p}")));
        }
        Ok(Self { kind: Kind::Binomial { n, p } })
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        positive("poisson rate", rate)?;
        Ok(Self { kind: Kind::Poisson { rate } })
    }

    pub fn student_t(df: f64, location: f64, scale: f64) -> Result<Self> {
        positive("student-t df", df)?;
        finite("student-t location", location)?;
        positive("student-t scale", scale)?;
        Ok(Self { kind: Kind::StudentT { df, location, scale } })
    }

    pub fn cauchy(location: f64, scale: f64) -> Result<Self> {
        finite("cauchy location", location)?;
        positive("cauchy scale", scale)?;
        Ok(Self { kind: Kind::Cauchy { location, scale } })
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Normal { .. } => "normal",
            Kind::Gamma { .. } => "gamma",
            Kind::InverseGamma { .. } => "inverse_gamma",
            Kind::Beta { .. } => "beta",
            Kind::Binomial { .. } => "binomial",
            Kind::Poisson { .. } => "poisson",
            Kind::StudentT { .. } => "student_t",
            Kind::Cauchy { .. } => "cauchy",
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, Kind::Binomial { .. } | Kind::Poisson { .. })
    }

    /// Closed support bounds (lo, hi).
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            Kind::Normal { .. } | Kind::StudentT { .. } | Kind::Cauchy { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Kind::Gamma { .. } | Kind::InverseGamma { .. } | Kind::Poisson { .. } => (0.0, f64::INFINITY),
            Kind::Beta { .. } => (0.0, 1.0),
            Kind::Binomial { n, .. } => (0.0, n as f64),
        }
    }

    /// Natural log of the density (continuous) or mass (discrete) at `x`;
    /// −∞ outside the support.
    pub fn log_density(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Normal { mean, variance } => {
                let z = x - mean;
                -LN_SQRT_2PI - 0.5 * variance.ln() - 0.5 * z * z / variance
            }
            Kind::Gamma { shape, rate } => {
                if x < 0.0 || (x == 0.0 && shape > 1.0) {
                    return f64::NEG_INFINITY;
                }
                if x == 0.0 {
                    return if shape == 1.0 { rate.ln() } else { f64::INFINITY };
                }
                shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
            }
            Kind::InverseGamma { shape, scale } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - scale / x
            }
            Kind::Beta { a, b } => {
                if !(0.0..=1.0).contains(&x) {
                    return f64::NEG_INFINITY;
                }
                let left = if x == 0.0 { boundary_term(a) } else { (a - 1.0) * x.ln() };
                let right = if x == 1.0 { boundary_term(b) } else { (b - 1.0) * (1.0 - x).ln() };
                left + right - ln_beta(a, b)
            }
            Kind::Binomial { n, p } => {
                let Some(k) = as_count(x) else {
                    return f64::NEG_INFINITY;
                };
                if k > n {
                    return f64::NEG_INFINITY;
                }
                let (k, n) = (k as f64, n as f64);
                let ln_choose = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
                ln_choose + xlogy(k, p) + xlogy(n - k, 1.0 - p)
            }
            Kind::Poisson { rate } => {
                let Some(k) = as_count(x) else {
                    return f64::NEG_INFINITY;
                };
                let k = k as f64;
                k * rate.ln() - rate - ln_gamma(k + 1.0)
            }
            Kind::StudentT { df, location, scale } => {
                let t = (x - location) / scale;
                ln_gamma(0.5 * (df + 1.0))
                    - ln_gamma(0.5 * df)
                    - 0.5 * (df * PI).ln()
                    - scale.ln()
                    - 0.5 * (df + 1.0) * (t * t / df).ln_1p()
            }
            Kind::Cauchy { location, scale } => {
                let t = (x - location) / scale;
                -(PI * scale).ln() - (t * t).ln_1p()
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// P(X ≤ x).
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match self.kind {
            Kind::Normal { mean, variance } => std_normal_cdf((x - mean) / variance.sqrt()),
            Kind::Gamma { shape, rate } => gamma_p(shape, rate * x.max(0.0)),
            Kind::InverseGamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_q(shape, scale / x)
                }
            }
            Kind::Beta { a, b } => beta_inc(a, b, x),
            Kind::Binomial { n, p } => {
                if x < 0.0 {
                    return 0.0;
                }
                let k = x.floor();
                if k >= n as f64 {
                    return 1.0;
                }
                if p == 0.0 {
                    return 1.0;
                }
                if p == 1.0 {
                    return 0.0;
                }
                beta_inc(n as f64 - k, k + 1.0, 1.0 - p)
            }
            Kind::Poisson { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    gamma_q(x.floor() + 1.0, rate)
                }
            }
            Kind::StudentT { df, location, scale } => student_t_cdf((x - location) / scale, df),
            Kind::Cauchy { location, scale } => 0.5 + ((x - location) / scale).atan() / PI,
        }
    }

    /// Inverse CDF. Continuous families are inverted by bisection to an
    /// absolute tolerance of 1e-10 or better; discrete families return the
    /// smallest k with cdf(k) ≥ p.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("quantile level must lie in (0, 1), got {p}")));
        }
        if self.is_discrete() {
            return Ok(self.discrete_quantile(p));
        }
        let (min, max) = self.support();
        let (center, spread) = self.center_and_spread();
        let lo0 = (center - spread).max(min);
        let hi0 = (center + spread).min(max);
        let g = |x: f64| self.cdf(x) - p;
        let (lo, hi) = expand_bracket(&g, lo0, hi0, min, max)?;
        bisect(g, lo, hi, 1e-13)
    }

    fn discrete_quantile(&self, p: f64) -> f64 {
        let (_, hi) = self.support();
        let mut k = match self.kind {
            Kind::Binomial { n, p: q } => ((n as f64) * q).floor(),
            Kind::Poisson { rate } => rate.floor(),
            _ => unreachable!("continuous family"),
        };
        while k > 0.0 && self.cdf(k - 1.0) >= p {
            k -= 1.0;
        }
        while self.cdf(k) < p && k < hi {
            k += 1.0;
        }
        k
    }

    fn center_and_spread(&self) -> (f64, f64) {
        match self.kind {
            Kind::Normal { mean, variance } => (mean, variance.sqrt()),
            Kind::Gamma { shape, rate } => (shape / rate, shape.sqrt() / rate),
            Kind::InverseGamma { shape, scale } => {
                let m = scale / (shape + 1.0);
                (m, m)
            }
            Kind::Beta { .. } => (0.5, 0.5),
            Kind::StudentT { location, scale, .. } | Kind::Cauchy { location, scale } => (location, scale),
            Kind::Binomial { .. } | Kind::Poisson { .. } => unreachable!("discrete family"),
        }
    }

    /// Expected value; an error for families whose mean does not exist.
    pub fn mean(&self) -> Result<f64> {
        match self.kind {
            Kind::Normal { mean, .. } => Ok(mean),
            Kind::Gamma { shape, rate } => Ok(shape / rate),
            Kind::InverseGamma { shape, scale } if shape > 1.0 => Ok(scale / (shape - 1.0)),
            Kind::InverseGamma { .. } => Err(Error::UndefinedMean("inverse-gamma (shape <= 1)")),
            Kind::Beta { a, b } => Ok(a / (a + b)),
            Kind::Binomial { n, p } => Ok(n as f64 * p),
            Kind::Poisson { rate } => Ok(rate),
            Kind::StudentT { df, location, .. } if df > 1.0 => Ok(location),
            Kind::StudentT { .. } => Err(Error::UndefinedMean("student-t (df <= 1)")),
            Kind::Cauchy { .. } => Err(Error::UndefinedMean("cauchy")),
        }
    }

    /// Variance, when finite.
    pub fn variance(&self) -> Option<f64> {
        match self.kind {
            Kind::Normal { variance, .. } => Some(variance),
            Kind::Gamma { shape, rate } => Some(shape / (rate * rate)),
            Kind::InverseGamma { shape, scale } if shape > 2.0 => {
                Some(scale * scale / ((shape - 1.0).powi(2) * (shape - 2.0)))
            }
            Kind::Beta { a, b } => Some(a * b / ((a + b).powi(2) * (a + b + 1.0))),
            Kind::Binomial { n, p } => Some(n as f64 * p * (1.0 - p)),
            Kind::Poisson { rate } => Some(rate),
            Kind::StudentT { df, scale, .. } if df > 2.0 => Some(scale * scale * df / (df - 2.0)),
            _ => None,
        }
    }

    /// Location of the maximum of the density. Modes on the edge of the
    /// support (Gamma with shape < 1, Beta with a or b ≤ 1) are reported with
    /// `at_boundary` set. The flat Beta(1, 1) reports its midpoint.
    pub fn mode(&self) -> Mode {
        let interior = |value| Mode { value, at_boundary: false };
        let boundary = |value| Mode { value, at_boundary: true };
        match self.kind {
            Kind::Normal { mean, .. } => interior(mean),
            Kind::Gamma { shape, rate } if shape >= 1.0 => {
                let m = (shape - 1.0) / rate;
                if m == 0.0 {
                    boundary(0.0)
                } else {
                    interior(m)
                }
            }
            Kind::Gamma { .. } => boundary(0.0),
            Kind::InverseGamma { shape, scale } => interior(scale / (shape + 1.0)),
            Kind::Beta { a, b } => {
                if a > 1.0 && b > 1.0 {
                    interior((a - 1.0) / (a + b - 2.0))
                } else if a == 1.0 && b == 1.0 {
                    interior(0.5)
                } else if a <= 1.0 && b >= 1.0 {
                    boundary(0.0)
                } else if a >= 1.0 && b <= 1.0 {
                    boundary(1.0)
                } else if a <= b {
                    // U-shaped: both ends unbounded; the lighter exponent wins.
                    boundary(0.0)
                } else {
                    boundary(1.0)
                }
            }
            Kind::Binomial { n, p } => {
                let m = ((n as f64 + 1.0) * p).floor().min(n as f64);
                Mode { value: m, at_boundary: m == 0.0 || m == n as f64 }
            }
            Kind::Poisson { rate } => {
                let m = if rate.fract() == 0.0 { rate - 1.0 } else { rate.floor() };
                Mode { value: m.max(0.0), at_boundary: m <= 0.0 }
            }
            Kind::StudentT { location, .. } | Kind::Cauchy { location, .. } => interior(location),
        }
    }

    /// `count` draws using a fresh generator seeded with `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded_rng(seed);
        self.sample_with(&mut rng, count)
    }

    /// `count` draws from an existing generator.
    pub fn sample_with<R: rand::Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        if count == 0 {
            return Vec::new();
        }
        // Parameters were validated at construction, so the rand_distr
        // constructors below cannot fail.
        match self.kind {
            Kind::Normal { mean, variance } => {
                let d = rand_distr::Normal::new(mean, variance.sqrt()).expect("validated");
                d.sample_iter(rng).take(count).collect()
            }
            Kind::Gamma { shape, rate } => {
                let d = rand_distr::Gamma::new(shape, 1.0 / rate).expect("validated");
                d.sample_iter(rng).take(count).collect()
            }
            Kind::InverseGamma { shape, scale } => {
                let d = rand_distr::Gamma::new(shape, 1.0 / scale).expect("validated");
                d.sample_iter(rng).take(count).map(|g: f64| 1.0 / g).collect()
            }
            Kind::Beta { a, b } => {
                let d = rand_distr::Beta::new(a, b).expect("validated");
                d.sample_iter(rng).take(count).collect()
            }
            Kind::Binomial { n, p } => {
                let d = rand_distr::Binomial::new(n, p).expect("validated");
                d.sample_iter(rng).take(count).map(|k: u64| k as f64).collect()
            }
            Kind::Poisson { rate } => {
                let d = rand_distr::Poisson::new(rate).expect("validated");
                d.sample_iter(rng).take(count).collect()
            }
            Kind::StudentT { df, location, scale } => {
                let d = rand_distr::StudentT::new(df).expect("validated");
                d.sample_iter(rng).take(count).map(|t: f64| location + scale * t).collect()
            }
            Kind::Cauchy { location, scale } => {
                let d = rand_distr::Cauchy::new(location, scale).expect("validated");
                d.sample_iter(rng).take(count).collect()
            }
        }
    }
}

fn boundary_term(exponent: f64) -> f64 {
    // (e − 1)·ln 0 with the conventions 0·ln 0 = 0.
    if exponent == 1.0 {
        0.0
    } else if exponent > 1.0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    }
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn as_count(x: f64) -> Option<u64> {
    if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
        Some(x as u64)
    } else {
        None
    }
}

/// CDF of the standard Student-t with `df` degrees of freedom.
fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let t2 = t * t;
    if t2 < df {
        // Central region: I_{t²/(ν+t²)}(1/2, ν/2) keeps precision near 0.
        let half = 0.5 * beta_inc(0.5, 0.5 * df, t2 / (df + t2));
        if t >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    } else {
        let tail = 0.5 * beta_inc(0.5 * df, 0.5, df / (df + t2));
        if t >= 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }
}
