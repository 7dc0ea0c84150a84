//! Numerical integration: globally adaptive Gauss–Kronrod (7/15) on finite
//! and infinite ranges, plus the composite trapezoid rule used on grids.

use crate::error::{Error, Result};

// QUADPACK qk15 abscissae and weights, digits as published.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrate `f` over [a, b]; either bound may be infinite.
///
/// Infinite ranges are mapped onto finite ones (x = t/(1−t²) on (−1, 1),
/// x = a + t/(1−t) on [0, 1)). Fails if the integrand produces a non-finite
/// value or the tolerance is not met within `max_intervals` bisections.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::invalid("integration bounds must not be NaN"));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(Integral { value: -r.value, error: r.error });
    }
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => adaptive(
            |t: f64| {
                let d = 1.0 - t * t;
                if d <= 0.0 {
                    return 0.0;
                }
                let x = t / d;
                scaled(f(x), (1.0 + t * t) / (d * d))
            },
            -1.0,
            1.0,
            opts,
        ),
        (false, true) => adaptive(
            |t: f64| {
                let d = 1.0 - t;
                if d <= 0.0 {
                    return 0.0;
                }
                scaled(f(a + t / d), 1.0 / (d * d))
            },
            0.0,
            1.0,
            opts,
        ),
        (true, false) => adaptive(
            |t: f64| {
                let d = 1.0 - t;
                if d <= 0.0 {
                    return 0.0;
                }
                scaled(f(b - t / d), 1.0 / (d * d))
            },
            0.0,
            1.0,
            opts,
        ),
        (false, false) => adaptive(f, a, b, opts),
    }
}

// At the far ends of a mapped infinite range the Jacobian can overflow while
// the integrand underflows to zero; 0·∞ counts as zero there.
fn scaled(fx: f64, jacobian: f64) -> f64 {
    if fx == 0.0 {
        0.0
    } else {
        fx * jacobian
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    let mut segments = vec![kronrod15(&f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Integral { value, error });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature did not converge: estimate {value}, error {error}"
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Interval can no longer be split in floating point; accept it.
            segments.push(Segment { error: 0.0, ..s });
            continue;
        }
        segments.push(kronrod15(&f, s.a, mid));
        segments.push(kronrod15(&f, mid, s.b));
    }
}

/// Composite trapezoid rule over a (possibly non-uniform) grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `points` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// `points` log-spaced values from `lo` to `hi` inclusive (both > 0).
pub fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(lo.ln(), hi.ln(), points).into_iter().map(f64::exp).collect();
    // exp(ln x) need not round-trip; pin the ends.
    if let Some(first) = out.first_mut() {
        *first = lo;
    }
    if points > 1 {
        out[points - 1] = hi;
    }
    out
}
