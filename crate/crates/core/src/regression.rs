//! Linear regression under Zellner's g-prior.
//!
//! Model: y | β, σ² ~ N(Xβ, σ²I), β | σ² ~ N(0, gσ²(XᵀX)⁻¹), π(σ²) = σ⁻².
//! Integrating β and then σ² gives
//!
//! ```text
//! m(y) = π^{-n/2} Γ(n/2) (1+g)^{-p/2} Q^{-n/2},   Q = yᵀy − g/(1+g) · yᵀP_X y
//! ```
//!
//! where P_X is the orthogonal projection onto the column space of X. The
//! σ⁻² prior is improper but shared by every submodel, so its arbitrary
//! constant cancels in Bayes factors.

use std::f64::consts::{LN_10, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::ln_gamma;
use crate::testing::{evidence_label, EvidenceLabel};

/// Reciprocal condition number of XᵀX below which X is rejected.
pub const RCOND_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    x: DMatrix<f64>,
    y: DVector<f64>,
    column_names: Vec<String>,
}

impl RegressionData {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, column_names: Vec<String>) -> Result<Self> {
        let (n, p) = x.shape();
        if y.len() != n {
            return Err(Error::LengthMismatch(format!("X has {n} rows but y has {} entries", y.len())));
        }
        if column_names.len() != p {
            return Err(Error::LengthMismatch(format!("X has {p} columns but {} names", column_names.len())));
        }
        if p == 0 {
            return Err(Error::invalid("design matrix needs at least one column"));
        }
        if n <= p {
            return Err(Error::invalid(format!("need more observations than columns (n = {n}, p = {p})")));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("X and y must be finite"));
        }
        let rcond = gram_rcond(&x);
        if rcond.is_nan() || rcond < RCOND_THRESHOLD {
            return Err(Error::RankDeficient(format!(
                "XᵀX is singular or ill-conditioned (reciprocal condition number {rcond:e})"
            )));
        }
        Ok(Self { x, y, column_names })
    }

    /// Build X from named covariate columns, optionally prefixed by an
    /// all-ones column named `(Intercept)`.
    pub fn from_columns(y: Vec<f64>, columns: Vec<(String, Vec<f64>)>, intercept: bool) -> Result<Self> {
        let n = y.len();
        let mut names = Vec::with_capacity(columns.len() + 1);
        let mut data = Vec::with_capacity(n * (columns.len() + 1));
        if intercept {
            names.push("(Intercept)".to_string());
            data.extend(std::iter::repeat_n(1.0, n));
        }
        for (name, col) in columns {
            if col.len() != n {
                return Err(Error::LengthMismatch(format!("column {name} has {} rows, y has {n}", col.len())));
            }
            names.push(name);
            data.extend(col);
        }
        let p = names.len();
        Self::new(DMatrix::from_vec(n, p, data), DVector::from_vec(y), names)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// The same data with column `j` removed.
    pub fn drop_column(&self, j: usize) -> Result<Self> {
        if j >= self.p() {
            return Err(Error::invalid(format!("column index {j} out of range (p = {})", self.p())));
        }
        if self.p() == 1 {
            return Err(Error::invalid("cannot drop the only column of X"));
        }
        let mut names = self.column_names.clone();
        names.remove(j);
        Self::new(self.x.clone().remove_column(j), self.y.clone(), names)
    }

    /// Least-squares fit through a thin QR of X.
    pub fn least_squares(&self) -> Fit {
        let qr = self.x.clone().qr();
        let q = qr.q();
        let r = qr.r();
        let qty = q.transpose() * &self.y;
        let beta_hat = r
            .solve_upper_triangular(&qty)
            .expect("R is invertible once XᵀX passed the conditioning check");
        let residual = &self.y - &q * &qty;
        Fit {
            beta_hat: beta_hat.iter().copied().collect(),
            rss: residual.norm_squared(),
            projected_sq_norm: qty.norm_squared(),
        }
    }
}

fn gram_rcond(x: &DMatrix<f64>) -> f64 {
    let gram = x.transpose() * x;
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Least-squares quantities: β̂, residual sum of squares ‖y − P_X y‖² and
/// ‖P_X y‖².
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub beta_hat: Vec<f64>,
    pub rss: f64,
    pub projected_sq_norm: f64,
}

fn check_g(g: f64) -> Result<()> {
    if g.is_finite() && g > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("g must be finite and > 0, got {g}")))
    }
}

/// ln m(y) under the g-prior with π(σ²) = σ⁻².
pub fn log_marginal_gprior(data: &RegressionData, g: f64) -> Result<f64> {
    check_g(g)?;
    let fit = data.least_squares();
    let (n, p) = (data.n() as f64, data.p() as f64);
    // Q = RSS + ‖P_X y‖²/(1+g), the same as yᵀy − g/(1+g)·yᵀP_X y without
    // the cancellation.
    let q = fit.rss + fit.projected_sq_norm / (1.0 + g);
    if !(q > 0.0) {
        return Err(Error::Numerical(format!("quadratic form Q = {q} is not positive")));
    }
    Ok(-0.5 * n * PI.ln() + ln_gamma(0.5 * n) - 0.5 * p * g.ln_1p() - 0.5 * n * q.ln())
}

/// B10 for H0: β_j = 0, comparing the full model with the one lacking column
/// `j`. Returns (B10, log10 B10).
pub fn bf_coefficient_nullity(data: &RegressionData, j: usize, g: f64) -> Result<(f64, f64)> {
    let reduced = data.drop_column(j)?;
    let ln_bf = log_marginal_gprior(data, g)? - log_marginal_gprior(&reduced, g)?;
    Ok((ln_bf.exp(), ln_bf / LN_10))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    /// None when the column cannot be dropped (a one-column design).
    pub bf10: Option<f64>,
    pub log10_bf10: Option<f64>,
    pub evidence: Option<EvidenceLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GPriorPosteriorSummary {
    pub g: f64,
    pub n: usize,
    pub beta_hat: Vec<f64>,
    pub beta_post_mean: Vec<f64>,
    pub rows: Vec<CoefficientRow>,
}

/// Report with g = n.
pub fn regression_report(data: &RegressionData) -> Result<GPriorPosteriorSummary> {
    regression_report_with_g(data, data.n() as f64)
}

/// Posterior means (g/(g+1))β̂ and a nullity Bayes factor per coefficient,
/// in input column order.
pub fn regression_report_with_g(data: &RegressionData, g: f64) -> Result<GPriorPosteriorSummary> {
    check_g(g)?;
    let fit = data.least_squares();
    let shrink = g / (g + 1.0);
    let beta_post_mean: Vec<f64> = fit.beta_hat.iter().map(|b| shrink * b).collect();
    let mut rows = Vec::with_capacity(data.p());
    for (j, name) in data.column_names().iter().enumerate() {
        let (bf10, log10_bf10) = if data.p() > 1 {
            let (bf, lbf) = bf_coefficient_nullity(data, j, g)?;
            (Some(bf), Some(lbf))
        } else {
            (None, None)
        };
        rows.push(CoefficientRow {
            name: name.clone(),
            estimate: beta_post_mean[j],
            bf10,
            log10_bf10,
            evidence: log10_bf10.map(evidence_label),
        });
    }
    Ok(GPriorPosteriorSummary { g, n: data.n(), beta_hat: fit.beta_hat, beta_post_mean, rows })
}
