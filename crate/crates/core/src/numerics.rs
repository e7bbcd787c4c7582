//! Shared numerical kernels: log-gamma, adaptive Gauss–Kronrod quadrature,
//! and bracketed root finding.
//!
//! These are deliberately small, self-contained routines rather than pulls
//! from a numerics crate: every caller in this crate needs them generic over
//! the scalar type, and the test suite cross-checks them against independent
//! references.

use thiserror::Error;

use crate::scalar::Scalar;

/// Lanczos coefficients for g = 7, n = 9 (Godfrey's set). Relative error of
/// the resulting `ln_gamma` is below ~1e-14 over the positive reals.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive real `x`
/// (reflection handles `x < 0.5`, so anything non-integer works).
pub fn ln_gamma<F: Scalar>(x: F) -> F {
    let half = F::of(0.5);
    if x < half {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let pi = F::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(F::one() - x);
    }
    let z = x - F::one();
    let mut acc = F::of(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += F::of(c) / (z + F::of(i as f64));
    }
    let base = z + F::of(LANCZOS_G) + half;
    F::of(0.918_938_533_204_672_8) // ln(2π)/2
        + (z + half) * base.ln()
        - base
        + acc.ln()
}

/// ln(n!) via `ln_gamma`.
pub fn ln_factorial<F: Scalar>(n: usize) -> F {
    ln_gamma(F::of(n as f64 + 1.0))
}

// Kronrod 15-point nodes on [0, 1] by |abscissa|; odd indices are the
// embedded Gauss 7-point nodes.
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<F> {
    pub rel_tol: F,
    pub abs_tol: F,
    /// Cap on adaptive subdivisions before giving up.
    pub max_segments: usize,
}

impl<F: Scalar> Default for QuadOptions<F> {
    fn default() -> Self {
        QuadOptions {
            rel_tol: F::of(1e-10),
            abs_tol: F::of(1e-12),
            max_segments: 2048,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<F> {
    pub value: F,
    pub error_estimate: F,
    pub evaluations: usize,
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature failed to reach tolerance: value ~{value}, error estimate {error}")]
    ToleranceNotMet { value: f64, error: f64 },
    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },
}

/// One Gauss–Kronrod 7/15 evaluation on [a, b]: returns (K15 value, |K15 − G7|).
fn gk15<F: Scalar, G: Fn(F) -> F>(f: &G, a: F, b: F) -> Result<(F, F), QuadError> {
    let half = F::of(0.5);
    let center = (a + b) * half;
    let half_width = (b - a) * half;
    let mut kronrod = F::zero();
    let mut gauss = F::zero();
    for (i, &node) in KRONROD_NODES.iter().enumerate() {
        let offset = half_width * F::of(node);
        let (lo, hi) = (center - offset, center + offset);
        let sum = if node == 0.0 {
            f(center)
        } else {
            f(lo) + f(hi)
        };
        if !sum.is_finite() {
            return Err(QuadError::NonFinite { at: lo.as_f64() });
        }
        kronrod += sum * F::of(KRONROD_WEIGHTS[i]);
        if i % 2 == 1 {
            gauss += sum * F::of(GAUSS_WEIGHTS[i / 2]);
        }
    }
    let value = kronrod * half_width;
    let err = ((kronrod - gauss) * half_width).abs();
    Ok((value, err))
}

/// Globally adaptive Gauss–Kronrod integration of `f` over [a, b]:
/// repeatedly bisects the segment with the largest error estimate until the
/// summed estimate meets `max(abs_tol, rel_tol · |value|)`.
pub fn integrate<F: Scalar, G: Fn(F) -> F>(
    f: G,
    a: F,
    b: F,
    opts: QuadOptions<F>,
) -> Result<QuadResult<F>, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: F::zero(),
            error_estimate: F::zero(),
            evaluations: 0,
        });
    }
    let mut evaluations = 15usize;
    let (v, e) = gk15(&f, a, b)?;
    let mut segments = vec![(a, b, v, e)];
    loop {
        let total: F = segments.iter().map(|s| s.2).sum();
        let err: F = segments.iter().map(|s| s.3).sum();
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult {
                value: total,
                error_estimate: err,
                evaluations,
            });
        }
        if segments.len() >= opts.max_segments {
            return Err(QuadError::ToleranceNotMet {
                value: total.as_f64(),
                error: err.as_f64(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let (sa, sb, _, _) = segments.swap_remove(worst);
        let mid = (sa + sb) * F::of(0.5);
        if mid == sa || mid == sb {
            // Interval width hit machine precision; keep whatever we had.
            let (v, e) = gk15(&f, sa, sb)?;
            segments.push((sa, sb, v, e));
            let total: F = segments.iter().map(|s| s.2).sum();
            let err: F = segments.iter().map(|s| s.3).sum();
            return Ok(QuadResult {
                value: total,
                error_estimate: err,
                evaluations,
            });
        }
        let (v1, e1) = gk15(&f, sa, mid)?;
        let (v2, e2) = gk15(&f, mid, sb)?;
        evaluations += 30;
        segments.push((sa, mid, v1, e1));
        segments.push((mid, sb, v2, e2));
    }
}

/// A sign change of a scalar function, found by grid scanning.
#[derive(Clone, Copy, Debug)]
pub struct Bracket<F> {
    pub lo: F,
    pub hi: F,
    pub g_lo: F,
    pub g_hi: F,
}

/// Samples `g` on a uniform grid of `steps + 1` points over [lo, hi] and
/// collects every bracket where the sign flips (or the sample is exactly
/// zero). Returns the brackets in ascending order together with the full
/// sample table for diagnostics.
pub fn scan_sign_changes<F: Scalar, G: Fn(F) -> F>(
    g: &G,
    lo: F,
    hi: F,
    steps: usize,
) -> (Vec<Bracket<F>>, Vec<(F, F)>) {
    let mut samples = Vec::with_capacity(steps + 1);
    let width = hi - lo;
    for k in 0..=steps {
        let x = lo + width * F::of(k as f64 / steps as f64);
        samples.push((x, g(x)));
    }
    let mut brackets = Vec::new();
    for w in samples.windows(2) {
        let (x0, g0) = w[0];
        let (x1, g1) = w[1];
        if g0 == F::zero() {
            brackets.push(Bracket {
                lo: x0,
                hi: x0,
                g_lo: g0,
                g_hi: g0,
            });
        } else if g0 * g1 < F::zero() {
            brackets.push(Bracket {
                lo: x0,
                hi: x1,
                g_lo: g0,
                g_hi: g1,
            });
        }
    }
    // An exact zero at the final sample would be missed by the loop above.
    if let Some(&(x, gx)) = samples.last() {
        if gx == F::zero() {
            brackets.push(Bracket {
                lo: x,
                hi: x,
                g_lo: gx,
                g_hi: gx,
            });
        }
    }
    (brackets, samples)
}

#[derive(Clone, Copy, Debug)]
pub struct BisectResult<F> {
    pub root: F,
    pub residual: F,
    pub iterations: usize,
}

/// Bisects `g` inside `bracket` until `|g| < residual_tol` or the interval
/// collapses to machine precision. The caller is responsible for checking
/// the achieved residual.
pub fn bisect<F: Scalar, G: Fn(F) -> F>(
    g: &G,
    bracket: Bracket<F>,
    residual_tol: F,
    max_iter: usize,
) -> BisectResult<F> {
    if bracket.g_lo == F::zero() {
        return BisectResult {
            root: bracket.lo,
            residual: F::zero(),
            iterations: 0,
        };
    }
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let (mut g_lo, mut best, mut best_g) = (bracket.g_lo, bracket.lo, bracket.g_lo);
    for i in 0..max_iter {
        let mid = (lo + hi) * F::of(0.5);
        if mid == lo || mid == hi {
            return BisectResult {
                root: best,
                residual: best_g.abs(),
                iterations: i,
            };
        }
        let g_mid = g(mid);
        if g_mid.abs() < best_g.abs() {
            best = mid;
            best_g = g_mid;
        }
        if g_mid.abs() < residual_tol {
            return BisectResult {
                root: mid,
                residual: g_mid.abs(),
                iterations: i + 1,
            };
        }
        if (g_mid > F::zero()) == (g_lo > F::zero()) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    BisectResult {
        root: best,
        residual: best_g.abs(),
        iterations: max_iter,
    }
}
