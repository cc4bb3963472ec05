//! Standard normal density, distribution function and quantile.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal density φ(x).
#[inline]
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function G(x), accurate to a few ulps
/// in both tails through `erfc`.
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

// Acklam's rational approximation, relative error below 1.15e-9.
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

/// Fast inverse of [`cdf`] for `p` in (0, 1); relative error below 1.2e-9.
///
/// Used for Gaussian increments, where speed matters more than the last
/// digits. Use [`quantile`] when the value itself is reported.
#[inline]
pub fn quantile_fast(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Inverse of [`cdf`]: the rational approximation refined by one Newton
/// step on the distribution function. Returns ±∞ at the endpoints and NaN
/// outside [0, 1].
pub fn quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let x = quantile_fast(p);
    // Newton on G(x) - p; the lower tail form keeps the residual accurate.
    let residual = if x <= 0.0 {
        cdf(x) - p
    } else {
        (1.0 - p) - cdf(-x)
    };
    let density = pdf(x);
    if density > 0.0 {
        x - residual / density
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_symmetry_and_known_points() {
        assert_eq!(cdf(0.0), 0.5);
        for &x in &[0.3, 1.0, 2.5, 6.0] {
            assert!((cdf(x) + cdf(-x) - 1.0).abs() < 1e-15);
        }
        assert!((cdf(1.959963984540054) - 0.975).abs() < 1e-15);
    }

    #[test]
    fn quantile_round_trip() {
        for &p in &[1e-12, 1e-6, 0.01, 0.02425, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-9] {
            let x = quantile(p);
            let back = cdf(x);
            assert!(
                (back - p).abs() <= 1e-9 * p.min(1.0 - p).max(1e-300) + 1e-15,
                "p={p} x={x} back={back}"
            );
        }
    }

    fn bisect_quantile(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if cdf(m) < p {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn fast_quantile_accuracy() {
        for i in 1..2000 {
            let p = i as f64 / 2000.0;
            let exact = bisect_quantile(p);
            let fast = quantile_fast(p);
            assert!(
                (fast - exact).abs() <= 1.2e-9 * exact.abs() + 1e-15,
                "p={p}"
            );
            assert!(
                (quantile(p) - exact).abs() <= 1e-14 * exact.abs().max(1.0),
                "p={p}"
            );
        }
        assert!((quantile(0.01) + 2.326_347_874_040_841).abs() < 1e-14);
    }

    #[test]
    fn quantile_edges() {
        assert_eq!(quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(quantile(1.0), f64::INFINITY);
        assert!(quantile(1.5).is_nan());
        assert_eq!(quantile(0.5), 0.0);
    }
}
