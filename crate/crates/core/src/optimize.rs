//! One-dimensional root finding and maximization.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Root of `f` in [lo, hi] by bisection. `f(lo)` and `f(hi)` must differ in
/// sign. Stops when the bracket is narrower than `tol` or cannot shrink.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numerical(format!(
            "root not bracketed in [{lo}, {hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grow [lo, hi] geometrically until `f` changes sign across it. `f` is
/// assumed monotone. Bounds are clamped to `[min, max]`.
pub fn expand_bracket<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    min: f64,
    max: f64,
) -> Result<(f64, f64)> {
    let up = f(hi) > f(lo);
    for _ in 0..200 {
        let (flo, fhi) = (f(lo), f(hi));
        if flo.signum() != fhi.signum() || flo == 0.0 || fhi == 0.0 {
            return Ok((lo, hi));
        }
        let width = (hi - lo).max(1.0);
        // Both endpoints on the same side: move the one facing the root.
        if (flo > 0.0) == up {
            lo = (lo - width).max(min);
            if min > f64::NEG_INFINITY && lo == min && f(min).signum() == flo.signum() {
                break;
            }
        } else {
            hi = (hi + width).min(max);
            if max < f64::INFINITY && hi == max && f(max).signum() == fhi.signum() {
                break;
            }
        }
    }
    Err(Error::Numerical("could not bracket root".into()))
}

/// Location of the maximum of a unimodal `f` on [lo, hi] by golden-section
/// search, to within `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    0.5 * (lo + hi)
}
