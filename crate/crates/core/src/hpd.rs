//! Grid densities and highest-posterior-density regions.
//!
//! A [`GridDensity`] holds log-density values on an increasing grid. Once
//! normalized (trapezoid integral = 1) it supports [`hpd_from_grid`], which
//! bisects on the density threshold k until the region {θ : π(θ) ≥ k} holds
//! the requested mass. Coverage is the mass of the piecewise-linear
//! interpolant above k, so it is continuous and nonincreasing in k.
//!
//! For joint posteriors that can be sampled and evaluated pointwise,
//! [`hpd_from_sample`] keeps the highest-density fraction of the draws.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{linspace, trapezoid};

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 4001;
/// Half-width of the default grid, in standard deviations of the
/// moment-matched Gaussian.
pub const DEFAULT_GRID_SDS: f64 = 10.0;

const COVERAGE_TOL: f64 = 1e-6;
const THRESHOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDensity {
    xs: Vec<f64>,
    log_vals: Vec<f64>,
    normalized: bool,
    log_norm_const: f64,
}

impl GridDensity {
    /// Wrap unnormalized log-density values. `xs` must be strictly increasing
    /// with at least three points.
    pub fn new(xs: Vec<f64>, log_vals: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptyInput("grid has no points".into()));
        }
        if xs.len() != log_vals.len() {
            return Err(Error::LengthMismatch(format!(
                "{} abscissae vs {} log-density values",
                xs.len(),
                log_vals.len()
            )));
        }
        if xs.len() < 3 {
            return Err(Error::invalid("grid needs at least 3 points"));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("grid abscissae must be finite"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid abscissae must be strictly increasing"));
        }
        if log_vals.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::invalid("log-density values must be < +inf and not NaN"));
        }
        Ok(GridDensity { xs, log_vals, normalized: false, log_norm_const: 0.0 })
    }

    /// Evaluate `log_density` on `xs`.
    pub fn from_fn<F: Fn(f64) -> f64>(xs: Vec<f64>, log_density: F) -> Result<Self> {
        let vals = xs.iter().map(|&x| log_density(x)).collect();
        Self::new(xs, vals)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn log_vals(&self) -> &[f64] {
        &self.log_vals
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Log of the trapezoid integral removed by [`normalize`]; zero before.
    pub fn log_norm_const(&self) -> f64 {
        self.log_norm_const
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// exp(log_vals).
    pub fn densities(&self) -> Vec<f64> {
        self.log_vals.iter().map(|v| v.exp()).collect()
    }

    /// Index of the largest log-density value (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.log_vals.iter().enumerate() {
            if *v > self.log_vals[best] {
                best = i;
            }
        }
        best
    }

    /// Trapezoid moments (mean, variance) of the density.
    pub fn moments(&self) -> (f64, f64) {
        let max = self.log_vals[self.argmax()];
        let w: Vec<f64> = self.log_vals.iter().map(|v| (v - max).exp()).collect();
        let total = trapezoid(&self.xs, &w);
        let xw: Vec<f64> = self.xs.iter().zip(&w).map(|(x, w)| x * w).collect();
        let mean = trapezoid(&self.xs, &xw) / total;
        let vw: Vec<f64> = self.xs.iter().zip(&w).map(|(x, w)| (x - mean).powi(2) * w).collect();
        (mean, trapezoid(&self.xs, &vw) / total)
    }

    /// Two-column CSV (`x,density`) for plotting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,density")?;
        for (x, v) in self.xs.iter().zip(&self.log_vals) {
            writeln!(out, "{},{}", x, v.exp())?;
        }
        Ok(())
    }
}

/// Rescale so the trapezoid integral of exp(log_vals) is 1. The removed
/// log-constant is recorded in `log_norm_const`.
pub fn normalize(g: &GridDensity) -> Result<GridDensity> {
    let max = g.log_vals[g.argmax()];
    if max == f64::NEG_INFINITY {
        return Err(Error::Numerical("density is zero on the whole grid".into()));
    }
    let shifted: Vec<f64> = g.log_vals.iter().map(|v| (v - max).exp()).collect();
    let area = trapezoid(&g.xs, &shifted);
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::Numerical(format!("grid integral is not positive: {area}")));
    }
    let log_norm_const = max + area.ln();
    Ok(GridDensity {
        xs: g.xs.clone(),
        log_vals: g.log_vals.iter().map(|v| v - log_norm_const).collect(),
        normalized: true,
        log_norm_const,
    })
}

/// A highest-posterior-density region on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpdRegion {
    /// Disjoint, sorted intervals whose union is the region.
    pub intervals: Vec<(f64, f64)>,
    /// Density threshold on the normalized scale.
    pub k_alpha: f64,
    pub coverage: f64,
    /// True when an interval ends at the first or last grid point, i.e. the
    /// grid may be truncating the region.
    pub touches_grid_edge: bool,
}

impl HpdRegion {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }
}

// Region {x : d(x) ≥ k} of the piecewise-linear interpolant, and its mass.
fn region_at(xs: &[f64], dens: &[f64], k: f64) -> (Vec<(f64, f64)>, f64) {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut mass = 0.0;
    let mut open: Option<f64> = if dens[0] >= k { Some(xs[0]) } else { None };
    for i in 0..xs.len() - 1 {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let (d0, d1) = (dens[i], dens[i + 1]);
        let (in0, in1) = (d0 >= k, d1 >= k);
        match (in0, in1) {
            (true, true) => mass += 0.5 * (x1 - x0) * (d0 + d1),
            (true, false) => {
                let xc = x0 + (x1 - x0) * (d0 - k) / (d0 - d1);
                mass += 0.5 * (xc - x0) * (d0 + k);
                intervals.push((open.take().unwrap_or(x0), xc));
            }
            (false, true) => {
                let xc = x0 + (x1 - x0) * (k - d0) / (d1 - d0);
                mass += 0.5 * (x1 - xc) * (k + d1);
                open = Some(xc);
            }
            (false, false) => {}
        }
    }
    if let Some(lo) = open {
        intervals.push((lo, xs[xs.len() - 1]));
    }
    (intervals, mass)
}

/// HPD region with posterior mass 1 − `alpha`.
///
/// Bisects the threshold over (0, max density] and stops once the coverage
/// is within 1e-6 of the target or the threshold bracket is below 1e-12.
pub fn hpd_from_grid(g: &GridDensity, alpha: f64) -> Result<HpdRegion> {
    if !g.normalized {
        return Err(Error::invalid("hpd_from_grid needs a normalized grid density"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let target = 1.0 - alpha;
    let dens = g.densities();
    let max = dens.iter().copied().fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, max);
    let mut best = (max, region_at(&g.xs, &dens, max));
    loop {
        let k = 0.5 * (lo + hi);
        let (intervals, coverage) = region_at(&g.xs, &dens, k);
        let closer = (coverage - target).abs() < (best.1 .1 - target).abs();
        if closer {
            best = (k, (intervals, coverage));
        }
        if (coverage - target).abs() <= COVERAGE_TOL || hi - lo < THRESHOLD_TOL {
            break;
        }
        // Coverage decreases as the threshold rises.
        if coverage > target {
            lo = k;
        } else {
            hi = k;
        }
    }
    let (k_alpha, (intervals, coverage)) = best;
    let (first, last) = (g.xs[0], g.xs[g.xs.len() - 1]);
    let touches_grid_edge = intervals.iter().any(|&(a, b)| a <= first || b >= last);
    Ok(HpdRegion { intervals, k_alpha, coverage, touches_grid_edge })
}

/// Grid of `points` values spanning mean ± 10 sd of the Gaussian matched to
/// the first two moments of `log_density` on a pilot grid over
/// [`pilot_lo`, `pilot_hi`].
pub fn moment_matched_grid<F: Fn(f64) -> f64>(
    log_density: F,
    pilot_lo: f64,
    pilot_hi: f64,
    points: usize,
) -> Result<Vec<f64>> {
    let pilot = GridDensity::from_fn(linspace(pilot_lo, pilot_hi, points.max(3)), &log_density)?;
    let (mean, var) = pilot.moments();
    if !(mean.is_finite() && var.is_finite() && var > 0.0) {
        return Err(Error::Numerical("pilot grid moments are degenerate".into()));
    }
    let half = DEFAULT_GRID_SDS * var.sqrt();
    Ok(linspace(mean - half, mean + half, points))
}

/// Unnormalized log-posterior of a Cauchy(μ, 1) location under a N(0, v)
/// prior: −μ²/(2v) − Σ log(1 + (x_i − μ)²), evaluated on `grid`.
pub fn cauchy_normal_log_posterior(data: &[f64], prior_variance: f64, grid: &[f64]) -> Result<GridDensity> {
    if data.is_empty() {
        return Err(Error::EmptyInput("no observations".into()));
    }
    if grid.is_empty() {
        return Err(Error::EmptyInput("empty grid".into()));
    }
    if !(prior_variance.is_finite() && prior_variance > 0.0) {
        return Err(Error::invalid("prior variance must be > 0"));
    }
    GridDensity::from_fn(grid.to_vec(), |mu| cauchy_normal_log_kernel(data, prior_variance, mu))
}

pub fn cauchy_normal_log_kernel(data: &[f64], prior_variance: f64, mu: f64) -> f64 {
    -mu * mu / (2.0 * prior_variance) - data.iter().map(|x| (x - mu).powi(2).ln_1p()).sum::<f64>()
}

/// Default grid for the Cauchy–normal posterior: a pilot over
/// [min(data) − 10s, max(data) + 10s] with s = max(1, √v), then refit to
/// mean ± 10 sd of the moment-matched Gaussian.
pub fn cauchy_normal_default_grid(data: &[f64], prior_variance: f64, points: usize) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptyInput("no observations".into()));
    }
    let scale = prior_variance.sqrt().max(1.0);
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min) - 10.0 * scale;
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 10.0 * scale;
    moment_matched_grid(|mu| cauchy_normal_log_kernel(data, prior_variance, mu), lo, hi, points)
}

/// Indices of the draws forming a pointwise HPD approximation: the
/// ⌈(1 − alpha)·count⌉ points with the highest log-posterior, plus any
/// points tied with the last one kept. Indices come back in input order.
pub fn hpd_from_sample<T, F: Fn(&T) -> f64>(points: &[T], log_post: F, alpha: f64) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("empty sample".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let values: Vec<f64> = points.iter().map(log_post).collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Numerical("log-posterior returned NaN".into()));
    }
    let keep = (((1.0 - alpha) * points.len() as f64).ceil() as usize).clamp(1, points.len());
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let cut = values[order[keep - 1]];
    let mut kept: Vec<usize> = order.into_iter().filter(|&i| values[i] >= cut).collect();
    kept.sort_unstable();
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution;
    use crate::quadrature::{integrate, QuadOptions};

    fn std_normal_grid() -> GridDensity {
        let d = Distribution::normal(0.0, 1.0).unwrap();
        GridDensity::from_fn(linspace(-8.0, 8.0, 4001), |x| d.log_density(x)).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(GridDensity::new(vec![], vec![]).is_err());
        assert!(GridDensity::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(GridDensity::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(GridDensity::new(vec![0.0, 1.0, 2.0], vec![0.0; 2]).is_err());
        assert!(GridDensity::new(vec![0.0, 1.0, 2.0], vec![0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let g = normalize(&std_normal_grid()).unwrap();
        assert!(g.log_norm_const().abs() < 1e-8);
        assert!((trapezoid(g.xs(), &g.densities()) - 1.0).abs() < 1e-12);

        let d = Distribution::normal(0.0, 1.0).unwrap();
        let scaled = GridDensity::from_fn(linspace(-8.0, 8.0, 4001), |x| d.log_density(x) + 7f64.ln()).unwrap();
        let n = normalize(&scaled).unwrap();
        assert!((n.log_norm_const() - 7f64.ln()).abs() < 1e-8);

        let zero = GridDensity::new(vec![0.0, 1.0, 2.0], vec![f64::NEG_INFINITY; 3]).unwrap();
        assert!(normalize(&zero).is_err());
    }

    #[test]
    fn cauchy_normalizer_matches_quadrature() {
        let data = [-4.3, 3.2];
        let grid = cauchy_normal_default_grid(&data, 10.0, DEFAULT_GRID_POINTS).unwrap();
        let g = normalize(&cauchy_normal_log_posterior(&data, 10.0, &grid).unwrap()).unwrap();
        let oracle = integrate(
            |mu| cauchy_normal_log_kernel(&data, 10.0, mu).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            QuadOptions::default(),
        )
        .unwrap();
        let rel = (g.log_norm_const().exp() - oracle.value).abs() / oracle.value;
        assert!(rel < 1e-6, "relative error {rel}");
    }

    #[test]
    fn cauchy_posterior_shapes() {
        let grid = linspace(-15.0, 15.0, 3001);
        let g = cauchy_normal_log_posterior(&[-4.3, 3.2], 10.0, &grid).unwrap();
        let v = g.log_vals();
        let local_max: Vec<f64> = (1..v.len() - 1)
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
            .map(|i| grid[i])
            .collect();
        assert_eq!(local_max.len(), 2, "{local_max:?}");
        assert!((local_max[0] + 4.3).abs() < 1.0 && (local_max[1] - 3.2).abs() < 1.0);

        let g = cauchy_normal_log_posterior(&[0.0], 1e12, &linspace(-5.0, 5.0, 1001)).unwrap();
        let v = g.log_vals();
        assert_eq!(g.argmax(), 500);
        for i in 0..500 {
            assert!((v[i] - v[1000 - i]).abs() < 1e-12);
        }

        // Dense-grid argmax oracle for a single datum: shrunk toward 0.
        let grid = linspace(-2.0, 7.0, 90_001);
        let g = cauchy_normal_log_posterior(&[5.0], 10.0, &grid).unwrap();
        let m = grid[g.argmax()];
        assert!(m > 0.0 && m < 5.0, "{m}");

        assert!(cauchy_normal_log_posterior(&[], 10.0, &grid).is_err());
        assert!(cauchy_normal_log_posterior(&[1.0], 10.0, &[]).is_err());
    }

    #[test]
    fn normal_hpd_is_the_central_interval() {
        let g = normalize(&std_normal_grid()).unwrap();
        let r = hpd_from_grid(&g, 0.05).unwrap();
        assert_eq!(r.intervals.len(), 1);
        let (lo, hi) = r.intervals[0];
        assert!((lo + 1.959_963_984_540_054).abs() < 2e-3);
        assert!((hi - 1.959_963_984_540_054).abs() < 2e-3);
        assert!((r.coverage - 0.95).abs() < 1e-5);
        assert!(!r.touches_grid_edge);
    }

    #[test]
    fn bimodal_mixture_gives_two_intervals() {
        let a = Distribution::normal(-5.0, 0.25).unwrap();
        let b = Distribution::normal(5.0, 0.25).unwrap();
        let xs = linspace(-10.0, 10.0, 4001);
        let g = GridDensity::from_fn(xs.clone(), |x| (0.5 * a.density(x) + 0.5 * b.density(x)).ln()).unwrap();
        let g = normalize(&g).unwrap();
        let r = hpd_from_grid(&g, 0.05).unwrap();
        assert_eq!(r.intervals.len(), 2);

        // Brute-force oracle: scan thresholds on a fine ladder, take the
        // largest one whose grid-point mass still reaches 95%.
        let dens = g.densities();
        let dx = xs[1] - xs[0];
        let mut k_scan = 0.0;
        for step in 1..20_000 {
            let k = step as f64 * 1e-4;
            let mass: f64 = dens.iter().filter(|&&d| d >= k).sum::<f64>() * dx;
            if mass >= 0.95 {
                k_scan = k;
            }
        }
        assert!((r.k_alpha - k_scan).abs() < 5e-3, "{} vs {}", r.k_alpha, k_scan);
    }

    #[test]
    fn hpd_rejects_bad_input() {
        let raw = std_normal_grid();
        assert!(hpd_from_grid(&raw, 0.05).is_err());
        let g = normalize(&raw).unwrap();
        assert!(hpd_from_grid(&g, 0.0).is_err());
        assert!(hpd_from_grid(&g, 1.0).is_err());
    }

    #[test]
    fn region_points_respect_threshold() {
        let d = Distribution::gamma(3.0, 1.5).unwrap();
        let g = normalize(&GridDensity::from_fn(linspace(0.0, 15.0, 4001), |x| d.log_density(x)).unwrap()).unwrap();
        let r = hpd_from_grid(&g, 0.1).unwrap();
        let dens = g.densities();
        for (x, dv) in g.xs().iter().zip(&dens) {
            let inside = r.intervals.iter().any(|&(lo, hi)| *x >= lo && *x <= hi);
            if inside {
                assert!(*dv >= r.k_alpha - 1e-12);
            } else {
                assert!(*dv < r.k_alpha);
            }
        }
        for &(lo, hi) in &r.intervals {
            assert!((d.density(lo) - r.k_alpha).abs() < 1e-5);
            assert!((d.density(hi) - r.k_alpha).abs() < 1e-5);
        }
    }

    #[test]
    fn sample_hpd_keeps_top_fraction() {
        let pts: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let kept = hpd_from_sample(&pts, |x| -(x - 500.0).abs(), 0.9).unwrap();
        assert_eq!(kept.len(), 100 + 1); // |x-500| ties at the cut
        let kept = hpd_from_sample(&pts, |x| -(x - 500.3).abs(), 0.9).unwrap();
        assert_eq!(kept.len(), 100);
        assert!(kept.iter().all(|&i| (i as f64 - 500.3).abs() < 51.0));

        let all = hpd_from_sample(&pts, |x| -x, 1e-9).unwrap();
        assert_eq!(all.len(), 1000);

        let empty: Vec<f64> = vec![];
        assert!(hpd_from_sample(&empty, |x| *x, 0.5).is_err());
    }

    #[test]
    fn csv_export() {
        let g = GridDensity::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, f64::NEG_INFINITY]).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,density\n0,1\n1,1\n2,0\n");
    }
}
