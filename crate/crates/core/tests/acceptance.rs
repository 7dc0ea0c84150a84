//! Acceptance checks. Each test prints one `[PASS]`/`[FAIL]` line with the
//! measured values and the tolerance, then fails if the check failed.
//!
//! Run with `cargo test -p bayes-core --test acceptance -- --nocapture
//! --test-threads 1` for an ordered listing.

use std::f64::consts::PI;

use bayes_core::conjugate::{
    posterior_mean, update_beta_binomial, update_gamma_poisson, BetaBinomialModel, GammaPoissonModel, SummaryStats,
};
use bayes_core::distributions::{seeded_rng, Distribution, Kind};
use bayes_core::hpd::{cauchy_normal_default_grid, cauchy_normal_log_posterior, hpd_from_grid, normalize, GridDensity};
use bayes_core::predictive::{bonferroni_bound, detect_outliers, noninformative_predictive, predictive_from_posterior};
use bayes_core::quadrature::{integrate, linspace, logspace, trapezoid, QuadOptions};
use bayes_core::regression::{bf_coefficient_nullity, log_marginal_gprior, RegressionData};
use bayes_core::testing::{
    evidence_label, improper_point_null_prob, lindley_sweep, model_posterior_probs, one_sided_posterior_prob,
    posterior_null_prob_normal,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    println!("[{}] {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_beta_binomial() {
    let post = update_beta_binomial(&BetaBinomialModel::uniform(), 38, 58).unwrap();
    let mean = posterior_mean(&post).unwrap();
    let exact = *post.kind() == Kind::Beta { a: 39.0, b: 21.0 };
    verdict(
        1,
        "beta-binomial",
        exact && mean == 39.0 / 60.0 && mean == 0.65,
        &format!("posterior {:?}, mean {mean} (exact Beta(39, 21), mean 0.65)", post.kind()),
    );
}

#[test]
fn criterion_02_cancer_gamma_poisson() {
    let prior = GammaPoissonModel::new(1.0, 2.0).unwrap();
    let nm = update_gamma_poisson(&prior, &[77, 51, 7], &[87.0, 62.0, 10.0]).unwrap();
    let m = update_gamma_poisson(&prior, &[51, 38, 6], &[64.0, 58.0, 9.0]).unwrap();
    let exact = *nm.kind() == Kind::Gamma { shape: 136.0, rate: 161.0 } && *m.kind() == Kind::Gamma { shape: 96.0, rate: 133.0 };
    let mut rng = seeded_rng(2024);
    let draws = 100_000;
    let a = nm.sample_with(&mut rng, draws);
    let b = m.sample_with(&mut rng, draws);
    let p = a.iter().zip(&b).filter(|(x, y)| x > y).count() as f64 / draws as f64;
    verdict(
        2,
        "cancer gamma-poisson",
        exact && p > 0.5,
        &format!("{:?} and {:?} (exact (136, 161), (96, 133)); P(theta_nm > theta_m) = {p} from 1e5 paired draws (> 0.5)", nm.kind(), m.kind()),
    );
}

#[test]
fn criterion_03_point_null_table() {
    let printed = [
        (0.0, 1.0, 0.586),
        (0.68, 1.0, 0.557),
        (1.28, 1.0, 0.484),
        (1.96, 1.0, 0.351),
        (0.0, 10.0, 0.768),
        (0.68, 10.0, 0.729),
        (1.28, 10.0, 0.612),
        (1.96, 10.0, 0.366),
    ];
    let mut misses = Vec::new();
    let mut worst = 0.0f64;
    for (z, tau_sq, want) in printed {
        let got = posterior_null_prob_normal(z, 1.0, f64::sqrt(tau_sq), 0.5).unwrap();
        worst = worst.max((got - want).abs());
        if (got - want).abs() > 5e-4 {
            misses.push(format!("z={z}, tau^2={tau_sq}: {got:.6} vs {want}"));
        }
    }
    verdict(
        3,
        "point-null probabilities",
        misses.is_empty(),
        &format!("max |error| {worst:.3e} (tol 5e-4); outside tolerance: {misses:?}"),
    );
}

#[test]
fn criterion_04_improper_point_null_table() {
    let printed = [(0.0, 0.285), (1.0, 0.195), (1.96, 0.055), (2.58, 0.014)];
    let worst = printed.iter().map(|&(x, p)| (improper_point_null_prob(x) - p).abs()).fold(0.0, f64::max);
    let at_165 = improper_point_null_prob(1.65);
    let formula_165 = 1.0 / (1.0 + (2.0 * PI).sqrt() * (1.65f64 * 1.65 / 2.0).exp());
    let bound = 1.0 / (1.0 + (2.0 * PI).sqrt());
    let sup = linspace(-10.0, 10.0, 200_001).into_iter().map(improper_point_null_prob).fold(0.0, f64::max);
    let pass = worst <= 5e-4 && (at_165 - 0.0928).abs() < 5e-5 && (at_165 - formula_165).abs() < 1e-15
        && sup <= bound && (bound - sup).abs() < 1e-15 && (bound - 0.285).abs() < 5e-4;
    verdict(
        4,
        "improper point-null probabilities",
        pass,
        &format!("max |error| {worst:.3e} (tol 5e-4); x=1.65 gives {at_165:.6} (formula 0.0928); sup on grid {sup:.8} = bound 1/(1+sqrt(2 pi)) {bound:.8} (printed 0.285)"),
    );
}

#[test]
fn criterion_05_cauchy_hpd() {
    let data = [-4.3, 3.2];
    let grid = cauchy_normal_default_grid(&data, 10.0, 4001).unwrap();
    let g = normalize(&cauchy_normal_log_posterior(&data, 10.0, &grid).unwrap()).unwrap();
    let r = hpd_from_grid(&g, 0.05).unwrap();
    verdict(
        5,
        "cauchy-normal HPD",
        (r.k_alpha - 0.0415).abs() <= 0.003 && (r.coverage - 0.95).abs() <= 1e-5,
        &format!("k_alpha {:.5} (0.0415 ± 0.003), coverage {:.8} (0.95 ± 1e-5), region {:?}", r.k_alpha, r.coverage, r.intervals),
    );
}

#[test]
fn criterion_06_jeffreys_lindley() {
    let far = posterior_null_prob_normal(1.96, 1.0, 1e8, 0.5).unwrap();
    let sweep = lindley_sweep(1.96, 1.0, 0.5, &logspace(1e-4, 10.0, 1000)).unwrap();
    let finite = sweep.iter().all(|p| p.bf10.is_finite() && p.posterior_null_prob.is_finite());
    let max_step = sweep.windows(2).map(|w| (w[1].posterior_null_prob - w[0].posterior_null_prob).abs()).fold(0.0, f64::max);
    verdict(
        6,
        "Jeffreys-Lindley behaviour",
        far > 0.999 && finite && max_step < 0.01,
        &format!("P(H0|x) at tau=1e8 is {far:.7} (> 0.999); 1000-point sweep finite: {finite}, largest step {max_step:.2e}"),
    );
}

fn synthetic_regression(seed: u64, n: usize, beta: &[f64]) -> RegressionData {
    let mut rng = seeded_rng(seed);
    let p = beta.len();
    let x = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { rng.sample(StandardNormal) });
    let noise = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = &x * DVector::from_column_slice(beta) + noise;
    RegressionData::new(x, y, (0..p).map(|j| format!("c{j}")).collect()).unwrap()
}

/// y ~ N(0, σ²(I + gX(XᵀX)⁻¹Xᵀ)) through an n×n Cholesky, integrated over
/// u = ln σ² (so dσ²/σ² = du) by adaptive quadrature.
fn oracle_log_marginal(data: &RegressionData, g: f64) -> f64 {
    let (x, y, n) = (data.x(), data.y(), data.n() as f64);
    let cov = DMatrix::identity(data.n(), data.n()) + x * (x.transpose() * x).try_inverse().unwrap() * x.transpose() * g;
    let chol = cov.cholesky().unwrap();
    let log_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let q = y.dot(&chol.solve(y));
    let log_f = |u: f64| -0.5 * n * (2.0 * PI).ln() - 0.5 * log_det - 0.5 * n * u - 0.5 * q * (-u).exp();
    let peak = (q / n).ln();
    let shift = log_f(peak);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 4000 };
    let f = |u: f64| (log_f(u) - shift).exp();
    let total = integrate(f, f64::NEG_INFINITY, peak, opts).unwrap().value + integrate(f, peak, f64::INFINITY, opts).unwrap().value;
    total.ln() + shift
}

#[test]
fn criterion_07_gprior_oracle() {
    let (mut worst_oracle, mut worst_recip, mut worst_col, mut worst_resp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..10 {
        let data = synthetic_regression(100 + seed, 20, &[0.5, 1.5, -0.3]);
        let g = data.n() as f64;
        let closed = log_marginal_gprior(&data, g).unwrap();
        worst_oracle = worst_oracle.max(((closed - oracle_log_marginal(&data, g)) / closed).abs());

        let rescaled_y =
            RegressionData::new(data.x().clone(), data.y() * -3.7, data.column_names().to_vec()).unwrap();
        for j in 0..data.p() {
            let (bf10, _) = bf_coefficient_nullity(&data, j, g).unwrap();
            let reduced = data.drop_column(j).unwrap();
            let bf01 = (log_marginal_gprior(&reduced, g).unwrap() - log_marginal_gprior(&data, g).unwrap()).exp();
            worst_recip = worst_recip.max((bf10 * bf01 - 1.0).abs());

            let (bf_y, _) = bf_coefficient_nullity(&rescaled_y, j, g).unwrap();
            worst_resp = worst_resp.max((bf_y / bf10 - 1.0).abs());

            for k in 0..data.p() {
                let mut x = data.x().clone();
                x.column_mut(k).scale_mut(2.5);
                let scaled = RegressionData::new(x, data.y().clone(), data.column_names().to_vec()).unwrap();
                let (bf_c, _) = bf_coefficient_nullity(&scaled, j, g).unwrap();
                worst_col = worst_col.max((bf_c / bf10 - 1.0).abs());
            }
        }
    }
    verdict(
        7,
        "g-prior closed form",
        worst_oracle < 1e-6 && worst_recip < 1e-12 && worst_col < 1e-9 && worst_resp < 1e-9,
        &format!(
            "10 datasets: oracle rel err {worst_oracle:.2e} (1e-6), |BF10*BF01 - 1| {worst_recip:.2e} (1e-12), column scale {worst_col:.2e} (1e-9), response scale {worst_resp:.2e} (1e-9)"
        ),
    );
}

#[test]
fn criterion_08_evidence_labels() {
    let printed = [
        (1.4205, "(***)"),
        (0.8502, "(**)"),
        (0.5664, "(**)"),
        (-0.3609, ""),
        (0.4520, "(*)"),
        (0.4007, "(*)"),
        (-0.4412, ""),
        (-0.4404, ""),
        (-0.3383, ""),
        (-0.0424, ""),
        (-0.3838, ""),
    ];
    let wrong: Vec<_> = printed.iter().filter(|(l, s)| evidence_label(*l).stars() != *s).collect();
    verdict(8, "evidence labels", wrong.is_empty(), &format!("11 rows, mismatches: {wrong:?}"));
}

#[test]
fn criterion_09_predictive() {
    let mut rng = seeded_rng(9);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 4000 };
    let (mut worst_mass, mut worst_kernel) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let prior = bayes_core::conjugate::NormalInvGammaModel::new(
            rng.random_range(-5.0..5.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.6..10.0),
            rng.random_range(0.1..10.0),
        )
        .unwrap();
        let pred = predictive_from_posterior(&prior).unwrap();
        let mass = integrate(|x| pred.density(x), f64::NEG_INFINITY, pred.location, opts).unwrap().value
            + integrate(|x| pred.density(x), pred.location, f64::INFINITY, opts).unwrap().value;
        worst_mass = worst_mass.max((mass - 1.0).abs());

        // Noninformative case: [s² + n/(n+1)(x − x̄)²]^{−(n+1)/2}, normalized by quadrature.
        let n = rng.random_range(2u64..60);
        let stats = SummaryStats::new(n, rng.random_range(-3.0..3.0), rng.random_range(0.05..40.0)).unwrap();
        let nf = n as f64;
        let kernel = |x: f64| {
            (stats.sum_sq_dev + nf / (nf + 1.0) * (x - stats.mean).powi(2)).powf(-(nf + 1.0) / 2.0)
                / stats.sum_sq_dev.powf(-(nf + 1.0) / 2.0)
        };
        let z = integrate(kernel, f64::NEG_INFINITY, stats.mean, opts).unwrap().value
            + integrate(kernel, stats.mean, f64::INFINITY, opts).unwrap().value;
        let np = noninformative_predictive(&stats).unwrap();
        let spread = (stats.sum_sq_dev / nf).sqrt();
        for k in -20..=20 {
            let x = stats.mean + 0.25 * k as f64 * spread;
            worst_kernel = worst_kernel.max((kernel(x) / z - np.density(x)).abs());
        }
    }
    verdict(
        9,
        "posterior predictive",
        worst_mass <= 1e-8 && worst_kernel <= 1e-10,
        &format!("50 cases: max |mass - 1| {worst_mass:.2e} (1e-8), max kernel mismatch {worst_kernel:.2e} (1e-10)"),
    );
}

#[test]
fn criterion_10_outliers() {
    let worst_identity = [1usize, 10, 100, 1000]
        .iter()
        .map(|&n| {
            let a = bonferroni_bound(n, 0.95).unwrap();
            ((1.0 - (1.0 - a).powi(n as i32)) - 0.05).abs()
        })
        .fold(0.0, f64::max);

    let mut rng = seeded_rng(31);
    let mut planted: Vec<f64> = (0..29).map(|_| rng.sample(StandardNormal)).collect();
    planted.insert(7, 8.0);
    let planted_flagged = detect_outliers(&planted, 0.95).unwrap().flagged_indices().contains(&7);

    let replications = 100;
    let flagged_reps = (0..replications)
        .filter(|&seed| {
            let mut rng = seeded_rng(seed);
            let data: Vec<f64> = (0..50).map(|_| rng.sample(StandardNormal)).collect();
            !detect_outliers(&data, 0.95).unwrap().flagged_indices().is_empty()
        })
        .count();
    let rate = flagged_reps as f64 / replications as f64;
    verdict(
        10,
        "outlier detection",
        worst_identity < 1e-12 && planted_flagged && rate <= 0.05,
        &format!(
            "bound identity err {worst_identity:.2e} (1e-12); planted 8 sigma flagged: {planted_flagged}; null n=50 replications with a flag: {flagged_reps}/{replications} (<= 5%)"
        ),
    );
}

#[test]
fn criterion_11_property_suites() {
    let mut rng = seeded_rng(11);
    let mut failures = Vec::new();

    // Batch and one-at-a-time conjugate updates agree.
    let mut worst_seq = 0.0f64;
    for _ in 0..200 {
        let counts: Vec<u64> = (0..rng.random_range(1..20)).map(|_| rng.random_range(0..50)).collect();
        let exposures: Vec<f64> = counts.iter().map(|_| rng.random_range(0.1..20.0)).collect();
        let prior = GammaPoissonModel::new(rng.random_range(0.1..5.0), rng.random_range(0.1..5.0)).unwrap();
        let batch = update_gamma_poisson(&prior, &counts, &exposures).unwrap();
        let mut seq = prior;
        for (c, e) in counts.iter().zip(&exposures) {
            let Kind::Gamma { shape, rate } = *update_gamma_poisson(&seq, &[*c], &[*e]).unwrap().kind() else { unreachable!() };
            seq = GammaPoissonModel::new(shape, rate).unwrap();
        }
        let Kind::Gamma { shape, rate } = *batch.kind() else { unreachable!() };
        worst_seq = worst_seq.max(((shape - seq.prior_shape) / shape).abs()).max(((rate - seq.prior_rate) / rate).abs());
    }
    if worst_seq > 1e-12 {
        failures.push(format!("batch vs sequential {worst_seq:.2e}"));
    }

    // HPD regions rescale with the variable.
    let mut worst_scale = 0.0f64;
    for _ in 0..20 {
        let d = Distribution::gamma(rng.random_range(2.0..20.0), rng.random_range(0.5..5.0)).unwrap();
        let xs = linspace(d.quantile(1e-9).unwrap(), d.quantile(1.0 - 1e-9).unwrap(), 2001);
        let c = rng.random_range(0.01..100.0);
        let base = hpd_from_grid(&normalize(&GridDensity::from_fn(xs.clone(), |x| d.log_density(x)).unwrap()).unwrap(), 0.1).unwrap();
        let scaled_xs: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let scaled = hpd_from_grid(
            &normalize(&GridDensity::from_fn(scaled_xs, |x| d.log_density(x / c) - c.ln()).unwrap()).unwrap(),
            0.1,
        )
        .unwrap();
        for ((a, b), (sa, sb)) in base.intervals.iter().zip(&scaled.intervals) {
            worst_scale = worst_scale.max(((sa / c) - a).abs() / a.abs().max(1.0)).max(((sb / c) - b).abs() / b.abs().max(1.0));
        }
        worst_scale = worst_scale.max((scaled.k_alpha * c / base.k_alpha - 1.0).abs());
    }
    if worst_scale > 1e-9 {
        failures.push(format!("HPD scale invariance {worst_scale:.2e}"));
    }

    // HPD is no longer than the shortest brute-force interval, to one cell.
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..10 {
        let d = Distribution::beta(rng.random_range(1.5..8.0), rng.random_range(1.5..8.0)).unwrap();
        let xs = linspace(0.0, 1.0, 401);
        let g = normalize(&GridDensity::from_fn(xs.clone(), |x| d.log_density(x)).unwrap()).unwrap();
        let dens = g.densities();
        let region = hpd_from_grid(&g, 0.1).unwrap();
        let mut shortest = f64::INFINITY;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                if trapezoid(&xs[i..=j], &dens[i..=j]) >= 0.9 {
                    shortest = shortest.min(xs[j] - xs[i]);
                    break;
                }
            }
        }
        worst_excess = worst_excess.max(region.total_length() - shortest);
    }
    if worst_excess > 1.0 / 400.0 {
        failures.push(format!("HPD longer than brute force by {worst_excess:.2e}"));
    }

    // One-sided probability against quadrature of the N(x, 1) posterior.
    let mut worst_one_sided = 0.0f64;
    for _ in 0..100 {
        let x = rng.random_range(-6.0..6.0);
        let post = Distribution::normal(x, 1.0).unwrap();
        let q = integrate(|t| post.density(t), f64::NEG_INFINITY, 0.0, QuadOptions::default()).unwrap().value;
        worst_one_sided = worst_one_sided.max((one_sided_posterior_prob(x) - q).abs());
    }
    if worst_one_sided > 1e-8 {
        failures.push(format!("one-sided vs quadrature {worst_one_sided:.2e}"));
    }

    // Model probabilities normalize and keep their argmax under shifts.
    let mut worst_norm = 0.0f64;
    for _ in 0..200 {
        let k = rng.random_range(2..8);
        let logs: Vec<f64> = (0..k).map(|_| rng.random_range(-40.0..40.0)).collect();
        let w = vec![1.0 / k as f64; k];
        if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            continue;
        }
        let shift = rng.random_range(-500.0..500.0);
        let p = model_posterior_probs(&logs, &w).unwrap();
        let q = model_posterior_probs(&logs.iter().map(|l| l + shift).collect::<Vec<_>>(), &w).unwrap();
        worst_norm = worst_norm.max((p.iter().sum::<f64>() - 1.0).abs());
        let argmax = |v: &[f64]| v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        if argmax(&p) != argmax(&q) {
            failures.push("argmax moved under a common shift".into());
        }
        worst_norm = worst_norm.max(p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    if worst_norm > 1e-12 {
        failures.push(format!("model probabilities {worst_norm:.2e}"));
    }

    verdict(
        11,
        "property suites",
        failures.is_empty(),
        &format!(
            "sequential {worst_seq:.1e} (1e-12), HPD scale {worst_scale:.1e} (1e-9), HPD minus shortest {worst_excess:.1e} (one cell 2.5e-3), one-sided {worst_one_sided:.1e} (1e-8), model probs {worst_norm:.1e} (1e-12); failures {failures:?}"
        ),
    );
}
