//! Bayesian inference toolkit for standard models.
//!
//! The crate covers the closed-form and numerical procedures that come up
//! when working with small conjugate models by hand:
//!
//! - [`distributions`]: univariate families with exact densities, CDFs,
//!   quantiles and seeded sampling, backed by the in-house [`special`]
//!   functions.
//! - [`conjugate`]: Beta–Binomial, Gamma–Poisson, Normal (known variance)
//!   and Normal–Inverse-Gamma updates, posterior means and MAP estimates.
//! - [`hpd`]: grid densities and highest-posterior-density regions, on a
//!   grid or from a posterior sample.
//! - [`testing`]: Bayes factors, point-null tests, 0–1 loss decisions and
//!   model posterior probabilities.
//! - [`regression`]: Zellner g-prior marginal likelihoods and per-coefficient
//!   nullity Bayes factors.
//! - [`predictive`]: Student-t posterior predictives and leave-one-out
//!   outlier detection.

pub mod conjugate;
pub mod distributions;
pub mod error;
pub mod hpd;
pub mod optimize;
pub mod predictive;
pub mod quadrature;
pub mod regression;
pub mod special;
pub mod testing;

pub use error::{Error, Result};
