//! Bias and variance transport through smooth maps, and the quote band
//! built from them.
//!
//! An uncertain quantity is summarised by its estimated value, the bias of
//! its estimator and the (co)variance of the estimator. Smooth functions of
//! such quantities transport these two moments by first- and second-order
//! chain rules:
//!
//! ```text
//! Γ[F(U)] = Σ ∂ᵢF ∂ⱼF Γ[Uᵢ,Uⱼ]
//! A[F(U)] = Σ ∂ᵢF A[Uᵢ] + ½ Σ ∂ᵢⱼF Γ[Uᵢ,Uⱼ]
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::normal;

/// Relative round-off tolerance used when clamping quadratic forms.
const CLAMP_TOL: f64 = 1e-12;
/// Pivot tolerance of the semi-definiteness check, relative to the trace.
const PIVOT_TOL: f64 = 1e-10;

/// Estimated parameter values together with the bias vector and covariance
/// matrix of their estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainParamSet {
    values: Vec<f64>,
    bias: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl UncertainParamSet {
    /// Validates dimensions, symmetry and positive semi-definiteness of `cov`.
    pub fn new(values: Vec<f64>, bias: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::input("parameter set must have at least one entry"));
        }
        if bias.len() != n {
            return Err(Error::input(format!(
                "bias has length {} but there are {n} parameters",
                bias.len()
            )));
        }
        if cov.len() != n || cov.iter().any(|row| row.len() != n) {
            return Err(Error::input(format!("covariance must be {n}x{n}")));
        }
        if values
            .iter()
            .chain(&bias)
            .chain(cov.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::input("parameter set contains non-finite entries"));
        }
        let scale = cov.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                if (cov[i][j] - cov[j][i]).abs() > CLAMP_TOL * scale {
                    return Err(Error::input(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        check_psd(&cov)?;
        Ok(Self { values, bias, cov })
    }

    /// One parameter with estimate `value`, estimator bias `bias` and variance `var`.
    pub fn scalar(value: f64, bias: f64, var: f64) -> Result<Self> {
        Self::new(vec![value], vec![bias], vec![vec![var]])
    }

    /// Parameters known exactly: zero bias and zero covariance.
    pub fn certain(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![0.0; n], vec![vec![0.0; n]; n])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn cov(&self) -> &[Vec<f64>] {
        &self.cov
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn cov_entry(&self, i: usize, j: usize) -> f64 {
        self.cov[i][j]
    }

    /// Lower Cholesky-type factor `L` with `L Lᵀ = cov` (rows of zeros for
    /// degenerate directions). Used to draw Gaussian perturbations.
    pub fn cov_factor(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let (l, d) = ldl(&self.cov).expect("covariance validated at construction");
        let mut f = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                f[i][j] = l[i][j] * d[j].max(0.0).sqrt();
            }
        }
        f
    }

    /// True when neither bias nor covariance carries any uncertainty.
    pub fn is_certain(&self) -> bool {
        self.bias.iter().all(|b| *b == 0.0) && self.cov.iter().flatten().all(|c| *c == 0.0)
    }
}

/// LDLᵀ without pivoting; semi-definite directions get a zero pivot.
fn ldl(cov: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = cov.len();
    let trace: f64 = (0..n).map(|i| cov[i][i].abs()).sum();
    let tol = PIVOT_TOL * trace.max(f64::MIN_POSITIVE);
    let mut l = vec![vec![0.0; n]; n];
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = cov[j][j];
        for k in 0..j {
            dj -= l[j][k] * l[j][k] * d[k];
        }
        if dj < -tol {
            return Err(Error::input("covariance is not positive semi-definite"));
        }
        l[j][j] = 1.0;
        if dj <= tol {
            d[j] = 0.0;
            for i in j + 1..n {
                let mut r = cov[i][j];
                for k in 0..j {
                    r -= l[i][k] * l[j][k] * d[k];
                }
                if r.abs() > tol.sqrt() * trace.sqrt().max(f64::MIN_POSITIVE) {
                    return Err(Error::input("covariance is not positive semi-definite"));
                }
            }
            continue;
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut r = cov[i][j];
            for k in 0..j {
                r -= l[i][k] * l[j][k] * d[k];
            }
            l[i][j] = r / dj;
        }
    }
    Ok((l, d))
}

fn check_psd(cov: &[Vec<f64>]) -> Result<()> {
    ldl(cov).map(|_| ())
}

/// Evaluates gᵀ Σ g, clamping round-off negatives to zero.
fn quadratic_form(grad: &[f64], cov: &[Vec<f64>]) -> Result<f64> {
    let n = grad.len();
    let mut q = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += cov[i][j] * grad[j];
        }
        q += grad[i] * row;
    }
    if q >= 0.0 {
        return Ok(q);
    }
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    let cnorm = cov.iter().flatten().map(|c| c * c).sum::<f64>().sqrt();
    if q >= -CLAMP_TOL * g2 * cnorm {
        Ok(0.0)
    } else {
        Err(Error::numeric(format!(
            "propagated variance is negative ({q:e})"
        )))
    }
}

/// Variance of `F(U)` from the gradient of `F` at the estimate.
pub fn propagate_variance(grad: &[f64], params: &UncertainParamSet) -> Result<f64> {
    if grad.len() != params.dim() {
        return Err(Error::input(format!(
            "gradient has length {} but there are {} parameters",
            grad.len(),
            params.dim()
        )));
    }
    quadratic_form(grad, &params.cov)
}

/// Bias of `F(U)` from the gradient and Hessian of `F` at the estimate.
pub fn propagate_bias(grad: &[f64], hess: &[Vec<f64>], params: &UncertainParamSet) -> Result<f64> {
    let n = params.dim();
    if grad.len() != n || hess.len() != n || hess.iter().any(|r| r.len() != n) {
        return Err(Error::input(format!(
            "gradient/Hessian dimensions do not match {n} parameters"
        )));
    }
    let first: f64 = grad.iter().zip(&params.bias).map(|(g, b)| g * b).sum();
    let mut second = 0.0;
    for i in 0..n {
        for j in 0..n {
            second += hess[i][j] * params.cov[i][j];
        }
    }
    Ok(first + 0.5 * second)
}

/// How the risk tolerance is turned into a band multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuoteMethod {
    /// Gaussian approximation of the price error: the (1-α) normal quantile.
    Gaussian,
    /// Distribution-free one-sided Chebyshev (Cantelli) bound.
    Chebyshev,
}

impl fmt::Display for QuoteMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuoteMethod::Gaussian => "gaussian",
            QuoteMethod::Chebyshev => "chebyshev",
        })
    }
}

impl FromStr for QuoteMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(QuoteMethod::Gaussian),
            "chebyshev" => Ok(QuoteMethod::Chebyshev),
            other => Err(Error::input(format!(
                "method must be `gaussian` or `chebyshev`, got `{other}`"
            ))),
        }
    }
}

/// Checks `0 < alpha < 0.5`.
pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::input("alpha must lie in (0, 0.5)"))
    }
}

/// Band half-width per unit of standard deviation.
///
/// Gaussian: `N_{1-α}`. Chebyshev: the `k` with `1/(1+k²) = α`, i.e.
/// `√((1-α)/α)`.
pub fn quantile_multiplier(alpha: f64, method: QuoteMethod) -> Result<f64> {
    validate_alpha(alpha)?;
    Ok(match method {
        QuoteMethod::Gaussian => -normal::quantile(alpha),
        QuoteMethod::Chebyshev => ((1.0 - alpha) / alpha).sqrt(),
    })
}

/// A bid/mid/ask band around a reference price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuoteBand {
    pub center: f64,
    pub bias_term: f64,
    pub std_term: f64,
    pub alpha: f64,
    pub method: QuoteMethod,
    pub bid: f64,
    pub mid: f64,
    pub ask: f64,
    pub spread: f64,
}

impl QuoteBand {
    /// Band multiplier `k` that produced this quote.
    pub fn multiplier(&self) -> f64 {
        quantile_multiplier(self.alpha, self.method).expect("alpha validated at construction")
    }
}

/// Builds the quote band `mid = center + bias_term`, `mid ± k·√variance`.
///
/// `bid` is chosen so that `ask + bid == 2·mid` holds in floating point.
pub fn make_quote(
    center: f64,
    bias_term: f64,
    variance: f64,
    alpha: f64,
    method: QuoteMethod,
) -> Result<QuoteBand> {
    if !center.is_finite() || !bias_term.is_finite() || !variance.is_finite() {
        return Err(Error::numeric("quote inputs must be finite"));
    }
    let scale = center.abs().max(1.0).powi(2);
    let variance = if variance < 0.0 {
        if variance >= -CLAMP_TOL * scale {
            0.0
        } else {
            return Err(Error::numeric(format!(
                "negative price variance {variance:e}"
            )));
        }
    } else {
        variance
    };
    let k = quantile_multiplier(alpha, method)?;
    let std_term = variance.sqrt();
    let (mid, half) = on_common_grid(center + bias_term, k * std_term);
    let ask = mid + half;
    let bid = mid - half;
    Ok(QuoteBand {
        center,
        bias_term,
        std_term,
        alpha,
        method,
        bid,
        mid,
        ask,
        spread: ask - bid,
    })
}

/// Rounds `mid` and `half` onto the power-of-two grid fixed by the magnitude
/// of `|mid| + half`. Both `mid ± half` are then exact, which makes
/// `ask + bid == 2·mid` hold exactly; the rounding moves `mid` by at most one
/// ulp of the ask.
fn on_common_grid(mid: f64, half: f64) -> (f64, f64) {
    if half == 0.0 {
        return (mid, 0.0);
    }
    let top = mid.abs() + half;
    let exp = top.log2().floor() as i32;
    let q = 2f64.powi(exp - 51);
    if q == 0.0 || !q.is_normal() {
        return (mid, half);
    }
    ((mid / q).round() * q, (half / q).round() * q)
}

/// Empirical frequency of `sample - mean >= k·std`.
pub fn chebyshev_tail_check(samples: &[f64], mean: f64, std: f64, k: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::input("no samples"));
    }
    if !(std > 0.0) {
        return Err(Error::input("std must be positive"));
    }
    if !(k >= 1.0) {
        return Err(Error::input("k must be at least 1"));
    }
    let hits = samples.iter().filter(|s| **s - mean >= k * std).count();
    Ok(hits as f64 / samples.len() as f64)
}

/// One-sided Chebyshev (Cantelli) bound `1/(1+k²)`.
pub fn cantelli_bound(k: f64) -> f64 {
    1.0 / (1.0 + k * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params2(cov: [[f64; 2]; 2], bias: [f64; 2]) -> UncertainParamSet {
        UncertainParamSet::new(
            vec![1.0, 1.0],
            bias.to_vec(),
            cov.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn variance_examples() {
        let p = UncertainParamSet::scalar(0.2, 0.0, 4e-4).unwrap();
        assert_eq!(propagate_variance(&[1.0], &p).unwrap(), 4e-4);
        let p2 = params2([[1.0, 0.5], [0.5, 2.0]], [0.0, 0.0]);
        assert_eq!(propagate_variance(&[0.0, 0.0], &p2).unwrap(), 0.0);
        assert!((propagate_variance(&[2.0, -1.0], &p2).unwrap() - 4.0).abs() < 1e-14);
        assert!(propagate_variance(&[1.0], &p2).unwrap_err().is_input());
    }

    #[test]
    fn bias_examples() {
        let p = UncertainParamSet::scalar(0.3, 0.07, 0.5).unwrap();
        assert_eq!(propagate_bias(&[1.0], &[vec![0.0]], &p).unwrap(), 0.07);
        let p = UncertainParamSet::scalar(0.0, 0.0, 0.25).unwrap();
        assert_eq!(propagate_bias(&[0.0], &[vec![2.0]], &p).unwrap(), 0.25);
        let p2 = params2([[0.04, 0.0], [0.0, 0.09]], [0.1, -0.1]);
        let b = propagate_bias(&[1.0, 1.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], &p2).unwrap();
        assert!((b - 0.065).abs() < 1e-15);
        assert!(propagate_bias(&[1.0], &[vec![1.0]], &p2).is_err());
    }

    #[test]
    fn construction_rejects_bad_covariances() {
        assert!(UncertainParamSet::scalar(0.2, 0.0, -1e-4)
            .unwrap_err()
            .is_input());
        let asym = UncertainParamSet::new(
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![vec![1.0, 0.5], vec![0.4, 1.0]],
        );
        assert!(asym.is_err());
        let indefinite = UncertainParamSet::new(
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
        );
        assert!(indefinite.is_err());
        // Rank-deficient but PSD.
        let singular = UncertainParamSet::new(
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
        );
        assert!(singular.is_ok());
        assert!(UncertainParamSet::new(vec![1.0], vec![0.0, 0.0], vec![vec![1.0]]).is_err());
    }

    #[test]
    fn cov_factor_reproduces_covariance() {
        let p = params2([[0.04, 0.01], [0.01, 0.09]], [0.0, 0.0]);
        let f = p.cov_factor();
        for i in 0..2 {
            for j in 0..2 {
                let s: f64 = (0..2).map(|k| f[i][k] * f[j][k]).sum();
                assert!((s - p.cov_entry(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn multipliers() {
        assert!(quantile_multiplier(0.4999999, QuoteMethod::Gaussian).unwrap() > 0.0);
        assert!(quantile_multiplier(0.4999999, QuoteMethod::Gaussian).unwrap() < 1e-6);
        assert!(
            (quantile_multiplier(0.01, QuoteMethod::Chebyshev).unwrap() - 99f64.sqrt()).abs()
                < 1e-15
        );
        assert!(quantile_multiplier(0.5, QuoteMethod::Gaussian).is_err());
        assert!(quantile_multiplier(0.0, QuoteMethod::Chebyshev).is_err());
        assert!(quantile_multiplier(0.7, QuoteMethod::Gaussian).is_err());
        assert_eq!(
            "chebyshev".parse::<QuoteMethod>().unwrap(),
            QuoteMethod::Chebyshev
        );
        assert!("normal".parse::<QuoteMethod>().is_err());
    }

    #[test]
    fn zero_variance_quote_collapses() {
        let q = make_quote(7.5, 0.0, 0.0, 0.05, QuoteMethod::Gaussian).unwrap();
        assert_eq!((q.bid, q.mid, q.ask, q.spread), (7.5, 7.5, 7.5, 0.0));
        assert!(make_quote(1.0, 0.0, -1.0, 0.05, QuoteMethod::Gaussian).is_err());
        assert_eq!(
            make_quote(1.0, 0.0, -1e-15, 0.05, QuoteMethod::Gaussian)
                .unwrap()
                .spread,
            0.0
        );
    }

    #[test]
    fn tail_check() {
        let s = vec![1.0; 10];
        assert_eq!(chebyshev_tail_check(&s, 1.0, 0.5, 2.0).unwrap(), 0.0);
        assert!(chebyshev_tail_check(&[], 0.0, 1.0, 1.0).is_err());
        assert!(chebyshev_tail_check(&s, 0.0, 0.0, 1.0).is_err());
        assert!(chebyshev_tail_check(&s, 0.0, 1.0, 0.5).is_err());
        assert_eq!(cantelli_bound(1.0), 0.5);
        assert!((cantelli_bound(3.0) - 0.1).abs() < 1e-16);
    }

    proptest! {
        #[test]
        fn variance_is_quadratic(a in -50.0..50.0f64, g0 in -3.0..3.0f64, g1 in -3.0..3.0f64) {
            let p = params2([[0.04, 0.01], [0.01, 0.09]], [0.0, 0.0]);
            let v = propagate_variance(&[g0, g1], &p).unwrap();
            let va = propagate_variance(&[a * g0, a * g1], &p).unwrap();
            prop_assert!((va - a * a * v).abs() <= 1e-12 * (1.0 + va.abs()));
        }

        #[test]
        fn chain_rule_composes(
            u in 0.1..2.0f64, b in -0.1..0.1f64, v in 0.0..0.05f64,
        ) {
            // F(u) = exp(u), G(y) = y³
            let p = UncertainParamSet::scalar(u, b, v).unwrap();
            let (f1, f2) = (u.exp(), u.exp());
            let y = u.exp();
            let (g1, g2) = (3.0 * y * y, 6.0 * y);
            let var_f = propagate_variance(&[f1], &p).unwrap();
            let bias_f = propagate_bias(&[f1], &[vec![f2]], &p).unwrap();
            let py = UncertainParamSet::scalar(y, bias_f, var_f).unwrap();
            let var_two = propagate_variance(&[g1], &py).unwrap();
            let bias_two = propagate_bias(&[g1], &[vec![g2]], &py).unwrap();
            let d1 = g1 * f1;
            let d2 = g2 * f1 * f1 + g1 * f2;
            let var_one = propagate_variance(&[d1], &p).unwrap();
            let bias_one = propagate_bias(&[d1], &[vec![d2]], &p).unwrap();
            prop_assert!((var_one - var_two).abs() <= 1e-12 * var_one.abs().max(1e-300));
            prop_assert!((bias_one - bias_two).abs() <= 1e-12 * bias_one.abs().max(1e-12));
        }

        #[test]
        fn quote_symmetry(
            c in -100.0..1000.0f64, b in -5.0..5.0f64, v in 0.0..50.0f64,
            alpha in 0.001..0.499f64, cheb in any::<bool>(),
        ) {
            let method = if cheb { QuoteMethod::Chebyshev } else { QuoteMethod::Gaussian };
            let q = make_quote(c, b, v, alpha, method).unwrap();
            prop_assert_eq!(q.ask + q.bid, 2.0 * q.mid);
            prop_assert!(q.bid <= q.mid && q.mid <= q.ask);
            let other = make_quote(c, b, v, 0.25, method).unwrap();
            prop_assert!((q.mid - other.mid).abs() <= 1e-14 * q.ask.abs().max(q.bid.abs()).max(1.0));
            prop_assert_eq!(q.center + q.bias_term, other.center + other.bias_term);
        }

        #[test]
        fn chebyshev_dominates_gaussian(alpha in 1e-6..0.4999f64) {
            let g = quantile_multiplier(alpha, QuoteMethod::Gaussian).unwrap();
            let c = quantile_multiplier(alpha, QuoteMethod::Chebyshev).unwrap();
            prop_assert!(c >= g);
        }
    }
}
